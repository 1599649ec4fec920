#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "dflow/linalg.hpp"

namespace dflow {

inline constexpr double kDefaultDegeneracyCutoff = 1e-10;

enum class SchemeKind { pc, pc_sorted, ipc, ppc, hpc, gpc, r1, r2, r3, powerlaw };

// Which key decides the sign of a pc/ipc entry: the index order, or the diagonal entries
// (Re m_nn for pc, Re(i m_nn) for ipc).
enum class Ordering { index, diagonal };

struct GeneratorScheme {
  SchemeKind kind = SchemeKind::gpc;
  double theta = 0.0;                      // ppc
  double r = 0.0;                          // powerlaw
  double cutoff = kDefaultDegeneracyCutoff;  // gpc, r3, powerlaw
  Ordering ipc_ordering = Ordering::index;

  static GeneratorScheme pc() { return {SchemeKind::pc}; }
  static GeneratorScheme pc_sorted() { return {SchemeKind::pc_sorted}; }
  static GeneratorScheme ipc(Ordering ordering = Ordering::index) {
    GeneratorScheme s{SchemeKind::ipc};
    s.ipc_ordering = ordering;
    return s;
  }
  static GeneratorScheme ppc(double theta) {
    GeneratorScheme s{SchemeKind::ppc};
    s.theta = theta;
    return s;
  }
  static GeneratorScheme hpc() { return {SchemeKind::hpc}; }
  static GeneratorScheme gpc(double cutoff = kDefaultDegeneracyCutoff) {
    GeneratorScheme s{SchemeKind::gpc};
    s.cutoff = cutoff;
    return s;
  }
  static GeneratorScheme r1() { return {SchemeKind::r1}; }
  static GeneratorScheme r2() { return {SchemeKind::r2}; }
  static GeneratorScheme r3(double cutoff = kDefaultDegeneracyCutoff) {
    GeneratorScheme s{SchemeKind::r3};
    s.cutoff = cutoff;
    return s;
  }
  static GeneratorScheme powerlaw(double r, double cutoff = kDefaultDegeneracyCutoff) {
    GeneratorScheme s{SchemeKind::powerlaw};
    s.r = r;
    s.cutoff = cutoff;
    return s;
  }

  std::string name() const;
  void validate() const;

  // Exponent k in the late-flow decay rate |dE|^k of the power-law family (R1 decays like R2
  // at leading order); empty for the pc-type schemes.
  std::optional<double> rate_exponent() const;

  // Whether eta_nj depends only on m_nj and the diagonal (so eta has the band of M).
  bool is_entrywise() const;
};

GeneratorScheme scheme_from_name(const std::string& name);
GeneratorScheme scheme_from_json(const nlohmann::json& j);
nlohmann::json scheme_to_json(const GeneratorScheme& s);

ComplexMatrix eta_pc(const ComplexMatrix& m, bool sorted_variant = false);
ComplexMatrix eta_ipc(const ComplexMatrix& m, Ordering ordering = Ordering::index);
ComplexMatrix eta_gpc(const ComplexMatrix& m, double cutoff = kDefaultDegeneracyCutoff);
ComplexMatrix eta_r1(const ComplexMatrix& m);
ComplexMatrix eta_r2(const ComplexMatrix& m);
ComplexMatrix eta_r3(const ComplexMatrix& m, double cutoff = kDefaultDegeneracyCutoff);
ComplexMatrix eta_powerlaw(const ComplexMatrix& m, double r, double cutoff = kDefaultDegeneracyCutoff);
ComplexMatrix eta_ppc(const ComplexMatrix& m, double theta);
ComplexMatrix eta_hpc(const ComplexMatrix& m);

ComplexMatrix eta(const ComplexMatrix& m, const GeneratorScheme& scheme);

}  // namespace dflow
