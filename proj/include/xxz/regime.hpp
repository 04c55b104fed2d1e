#pragma once

#include <complex>
#include <string>

namespace xxz {

using cplx = std::complex<double>;

enum class RegimeKind { XXX, GenericXXZ, RootOfUnity };

/// Anisotropy of the chain: XXX, XXZ at complex η, or q = e^{iπ/p}.
struct AnisotropyRegime {
  RegimeKind kind = RegimeKind::XXX;
  cplx eta{0.0, 0.0};
  int p = 0;

  static AnisotropyRegime xxx();
  static AnisotropyRegime generic(cplx eta);
  static AnisotropyRegime root_of_unity(int p);

  /// Accepts "xxx", "eta=<complex>" and "p=<int>".
  static AnisotropyRegime parse(const std::string& spec);

  bool is_xxx() const { return kind == RegimeKind::XXX; }
  bool is_xxz() const { return kind != RegimeKind::XXX; }
  bool is_root_of_unity() const { return kind == RegimeKind::RootOfUnity; }
  cplx q() const { return std::exp(eta); }

  /// True when a generic η sits within 1e-12 of iπ/p for some p <= 64.
  bool looks_like_root_of_unity() const;

  std::string to_string() const;

  friend bool operator==(const AnisotropyRegime&, const AnisotropyRegime&) = default;
};

/// Parses "a", "bi", "a+bi", "a-bi" (also "j" for the imaginary unit).
cplx parse_complex(const std::string& text);
std::string format_complex(cplx z);

}  // namespace xxz
