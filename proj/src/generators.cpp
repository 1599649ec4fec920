#include "dflow/generators.hpp"

#include <cmath>
#include <numbers>

#include "dflow/kernels.hpp"

namespace dflow {

std::string GeneratorScheme::name() const {
  switch (kind) {
    case SchemeKind::pc: return "pc";
    case SchemeKind::pc_sorted: return "pc_sorted";
    case SchemeKind::ipc: return "ipc";
    case SchemeKind::ppc: return "ppc";
    case SchemeKind::hpc: return "hpc";
    case SchemeKind::gpc: return "gpc";
    case SchemeKind::r1: return "r1";
    case SchemeKind::r2: return "r2";
    case SchemeKind::r3: return "r3";
    case SchemeKind::powerlaw: return "powerlaw";
  }
  return "unknown";
}

void GeneratorScheme::validate() const {
  if (kind == SchemeKind::ppc && !(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
    throw InvalidInput("ppc: theta must lie in [0, pi/2], got " + std::to_string(theta));
  }
  if (kind == SchemeKind::powerlaw && !std::isfinite(r)) throw InvalidInput("powerlaw: exponent r must be finite");
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) throw InvalidInput("degeneracy cutoff must be finite and >= 0");
}

std::optional<double> GeneratorScheme::rate_exponent() const {
  switch (kind) {
    case SchemeKind::gpc: return 1.0;
    case SchemeKind::r1:
    case SchemeKind::r2: return 2.0;
    case SchemeKind::r3: return 0.0;
    case SchemeKind::powerlaw: return r + 1.0;
    default: return std::nullopt;
  }
}

bool GeneratorScheme::is_entrywise() const { return kind != SchemeKind::r1 && kind != SchemeKind::hpc; }

GeneratorScheme scheme_from_name(const std::string& name) {
  if (name == "pc") return GeneratorScheme::pc();
  if (name == "pc_sorted") return GeneratorScheme::pc_sorted();
  if (name == "ipc") return GeneratorScheme::ipc();
  if (name == "ppc") return GeneratorScheme::ppc(0.0);
  if (name == "hpc") return GeneratorScheme::hpc();
  if (name == "gpc") return GeneratorScheme::gpc();
  if (name == "r1") return GeneratorScheme::r1();
  if (name == "r2") return GeneratorScheme::r2();
  if (name == "r3") return GeneratorScheme::r3();
  if (name == "powerlaw") return GeneratorScheme::powerlaw(0.0);
  throw InvalidInput("unknown generator scheme '" + name + "'");
}

GeneratorScheme scheme_from_json(const nlohmann::json& j) {
  GeneratorScheme s;
  if (j.is_string()) {
    s = scheme_from_name(j.get<std::string>());
  } else if (j.is_object() && j.contains("name") && j.at("name").is_string()) {
    s = scheme_from_name(j.at("name").get<std::string>());
    if (j.contains("theta")) s.theta = j.at("theta").get<double>();
    if (j.contains("r")) s.r = j.at("r").get<double>();
    if (j.contains("cutoff")) s.cutoff = j.at("cutoff").get<double>();
    if (j.contains("ordering")) {
      const auto o = j.at("ordering").get<std::string>();
      if (o == "index") {
        s.ipc_ordering = Ordering::index;
      } else if (o == "diagonal") {
        s.ipc_ordering = Ordering::diagonal;
        if (s.kind == SchemeKind::pc) s.kind = SchemeKind::pc_sorted;
      } else {
        throw InvalidInput("scheme ordering must be 'index' or 'diagonal', got '" + o + "'");
      }
    }
  } else {
    throw InvalidInput("scheme must be a name string or an object with a 'name' field");
  }
  s.validate();
  return s;
}

nlohmann::json scheme_to_json(const GeneratorScheme& s) {
  nlohmann::json j = {{"name", s.name()}};
  switch (s.kind) {
    case SchemeKind::ppc: j["theta"] = s.theta; break;
    case SchemeKind::powerlaw: j["r"] = s.r; j["cutoff"] = s.cutoff; break;
    case SchemeKind::gpc:
    case SchemeKind::r3: j["cutoff"] = s.cutoff; break;
    case SchemeKind::ipc: j["ordering"] = s.ipc_ordering == Ordering::index ? "index" : "diagonal"; break;
    default: break;
  }
  return j;
}

ComplexMatrix eta(const ComplexMatrix& m, const GeneratorScheme& scheme) {
  require_square(m, "eta");
  scheme.validate();
  ComplexMatrix out;
  kernels::generator(m, scheme, m.rows() > 0 ? static_cast<std::size_t>(m.rows() - 1) : 0, out);
  return out;
}

ComplexMatrix eta_pc(const ComplexMatrix& m, bool sorted_variant) {
  return eta(m, sorted_variant ? GeneratorScheme::pc_sorted() : GeneratorScheme::pc());
}
ComplexMatrix eta_ipc(const ComplexMatrix& m, Ordering ordering) { return eta(m, GeneratorScheme::ipc(ordering)); }
ComplexMatrix eta_gpc(const ComplexMatrix& m, double cutoff) { return eta(m, GeneratorScheme::gpc(cutoff)); }
ComplexMatrix eta_r1(const ComplexMatrix& m) { return eta(m, GeneratorScheme::r1()); }
ComplexMatrix eta_r2(const ComplexMatrix& m) { return eta(m, GeneratorScheme::r2()); }
ComplexMatrix eta_r3(const ComplexMatrix& m, double cutoff) { return eta(m, GeneratorScheme::r3(cutoff)); }
ComplexMatrix eta_powerlaw(const ComplexMatrix& m, double r, double cutoff) {
  return eta(m, GeneratorScheme::powerlaw(r, cutoff));
}
ComplexMatrix eta_ppc(const ComplexMatrix& m, double theta) { return eta(m, GeneratorScheme::ppc(theta)); }
ComplexMatrix eta_hpc(const ComplexMatrix& m) { return eta(m, GeneratorScheme::hpc()); }

}  // namespace dflow
