#include "dflow/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dflow {

namespace fs = std::filesystem;

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  require_square(m, "matrix_to_json");
  require_finite(m, "matrix_to_json");
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rrow = nlohmann::json::array();
    nlohmann::json irow = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im")) {
    throw InvalidInput("matrix JSON must be an object with keys dim, re, im");
  }
  const auto& dim_field = j.at("dim");
  if (!dim_field.is_number_integer() || dim_field.get<long long>() < 1) {
    throw InvalidInput("matrix JSON: dim must be a positive integer");
  }
  const auto d = static_cast<Eigen::Index>(dim_field.get<long long>());
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  auto check_rows = [d](const nlohmann::json& rows, const char* name) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != d) {
      throw InvalidInput(std::string("matrix JSON: ") + name + " must have dim rows");
    }
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
        throw InvalidInput(std::string("matrix JSON: every row of ") + name + " must have dim entries");
      }
      for (const auto& x : row) {
        if (!x.is_number()) throw InvalidInput(std::string("matrix JSON: non-numeric entry in ") + name);
      }
    }
  };
  check_rows(re, "re");
  check_rows(im, "im");
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
    }
  }
  require_finite(m, "matrix_from_json");
  return m;
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw InvalidInput("failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix_json(const fs::path& path, const ComplexMatrix& m) {
  write_text_file(path, matrix_to_json(m).dump() + "\n");
}

ComplexMatrix read_matrix_json(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return matrix_from_json(j);
}

namespace {

std::array<unsigned char, 8> to_le_bytes(double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  std::array<unsigned char, 8> b{};
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
  return b;
}

double from_le_bytes(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_matrix_binary(const fs::path& path, const ComplexMatrix& m) {
  require_square(m, "write_matrix_binary");
  require_finite(m, "write_matrix_binary");
  std::string buf;
  buf.reserve(static_cast<std::size_t>(m.size()) * 16);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (double part : {m(i, j).real(), m(i, j).imag()}) {
        auto b = to_le_bytes(part);
        buf.append(reinterpret_cast<const char*>(b.data()), b.size());
      }
    }
  }
  write_text_file(path, buf);
}

ComplexMatrix read_matrix_binary(const fs::path& path) {
  const std::string buf = read_text_file(path);
  if (buf.size() % 16 != 0) throw InvalidInput(path.string() + ": size is not a multiple of 16 bytes");
  const std::size_t count = buf.size() / 16;
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (d == 0 || d * d != count) throw InvalidInput(path.string() + ": entry count is not a perfect square");
  ComplexMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  for (std::size_t k = 0; k < count; ++k) {
    m.data()[k] = Complex(from_le_bytes(p + 16 * k), from_le_bytes(p + 16 * k + 8));
  }
  require_finite(m, "read_matrix_binary");
  return m;
}

ComplexMatrix read_matrix_file(const fs::path& path) {
  if (path.extension() == ".json") return read_matrix_json(path);
  return read_matrix_binary(path);
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "re,im\n";
  for (const auto& z : s) {
    out += format_double(z.real());
    out += ',';
    out += format_double(z.imag());
    out += '\n';
  }
  return out;
}

void write_spectrum_csv(const fs::path& path, const Spectrum& s) { write_text_file(path, spectrum_csv(s)); }

Spectrum read_spectrum_csv(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "re,im") throw InvalidInput(path.string() + ": missing re,im header");
  Spectrum out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput(path.string() + ": malformed line '" + line + "'");
    double re = 0.0, im = 0.0;
    auto r1 = std::from_chars(line.data(), line.data() + comma, re);
    auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), im);
    if (r1.ec != std::errc() || r2.ec != std::errc()) {
      throw InvalidInput(path.string() + ": malformed number in '" + line + "'");
    }
    out.emplace_back(re, im);
  }
  return out;
}

}  // namespace dflow
