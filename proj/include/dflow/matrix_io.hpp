#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dflow/linalg.hpp"

namespace dflow {

// {"dim": D, "re": [[...]], "im": [[...]]}
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

void write_matrix_json(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_matrix_json(const std::filesystem::path& path);

// Headerless little-endian (re, im) f64 pairs in row-major order; D is recovered from the file size.
void write_matrix_binary(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_matrix_binary(const std::filesystem::path& path);

// Picks the format from the extension: ".json" or anything else as binary.
ComplexMatrix read_matrix_file(const std::filesystem::path& path);

// CSV "re,im" with one eigenvalue per line.
std::string spectrum_csv(const Spectrum& s);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace dflow
