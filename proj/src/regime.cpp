#include "xxz/regime.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xxz {

namespace {

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty()) throw std::invalid_argument("malformed complex number '" + whole + "'");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed complex number '" + whole + "'");
  }
  if (used != s.size()) throw std::invalid_argument("malformed complex number '" + whole + "'");
  return v;
}

double parse_imag_coeff(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  return parse_real(s, whole);
}

// shortest representation that parses back to v
std::string fmt(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

AnisotropyRegime AnisotropyRegime::xxx() { return {}; }

AnisotropyRegime AnisotropyRegime::generic(cplx eta) {
  if (!std::isfinite(eta.real()) || !std::isfinite(eta.imag()))
    throw std::invalid_argument("eta must be finite");
  if (std::abs(eta) == 0.0) throw std::invalid_argument("eta = 0 is the XXX limit; use regime xxx");
  return {RegimeKind::GenericXXZ, eta, 0};
}

AnisotropyRegime AnisotropyRegime::root_of_unity(int p) {
  if (p < 2) throw std::invalid_argument("root-of-unity order p must be >= 2");
  return {RegimeKind::RootOfUnity, cplx(0.0, std::numbers::pi / p), p};
}

AnisotropyRegime AnisotropyRegime::parse(const std::string& spec) {
  if (spec == "xxx" || spec == "XXX") return xxx();
  if (spec.rfind("eta=", 0) == 0) return generic(parse_complex(spec.substr(4)));
  if (spec.rfind("p=", 0) == 0) {
    const std::string digits = spec.substr(2);
    std::size_t used = 0;
    int p = 0;
    try {
      p = std::stoi(digits, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed regime '" + spec + "'");
    }
    if (used != digits.size()) throw std::invalid_argument("malformed regime '" + spec + "'");
    return root_of_unity(p);
  }
  throw std::invalid_argument("unknown regime '" + spec + "' (expected xxx, eta=<complex> or p=<int>)");
}

bool AnisotropyRegime::looks_like_root_of_unity() const {
  if (kind != RegimeKind::GenericXXZ) return false;
  if (std::abs(eta.real()) > 1e-12) return false;
  // q^{2p} = 1 for η = iπ·r/p; any rational with denominator <= 64.
  const double t = eta.imag() / std::numbers::pi;
  for (int d = 1; d <= 64; ++d)
    if (std::abs(t * d - std::round(t * d)) < 1e-12 * d) return true;
  return false;
}

std::string AnisotropyRegime::to_string() const {
  switch (kind) {
    case RegimeKind::XXX:
      return "xxx";
    case RegimeKind::RootOfUnity:
      return "p=" + std::to_string(p);
    case RegimeKind::GenericXXZ:
      return "eta=" + format_complex(eta);
  }
  return "?";
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) throw std::invalid_argument("empty complex number");
  const char last = s.back();
  if (last != 'i' && last != 'j' && last != 'I' && last != 'J') return {parse_real(s, text), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_imag_coeff(s, text)};
  return {parse_real(s.substr(0, split), text), parse_imag_coeff(s.substr(split), text)};
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return fmt(z.real());
  std::string im = fmt(z.imag());
  if (im[0] != '-') im = "+" + im;
  return fmt(z.real()) + im + "i";
}

}  // namespace xxz
