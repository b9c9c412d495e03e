#include "brlab/exactpoly.hpp"

#include <cmath>
#include <sstream>

namespace brlab {

BiPoly::BiPoly(const Rational& constant) {
  if (constant != 0) terms_[{0, 0}] = constant;
}

BiPoly BiPoly::x() { return monomial(1, 0); }
BiPoly BiPoly::y() { return monomial(0, 1); }

BiPoly BiPoly::monomial(int i, int j, const Rational& coeff) {
  BiPoly r;
  r.set(i, j, coeff);
  return r;
}

Rational BiPoly::coeff(int i, int j) const {
  auto it = terms_.find({i, j});
  return it == terms_.end() ? Rational(0) : it->second;
}

void BiPoly::set(int i, int j, const Rational& v) {
  if (i < 0 || j < 0) throw std::invalid_argument("BiPoly: negative exponent");
  if (v == 0)
    terms_.erase({i, j});
  else
    terms_[{i, j}] = v;
}

int BiPoly::degree() const {
  int d = -1;
  for (auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
  return d;
}

double BiPoly::evaluate(double x, double y) const {
  double s = 0;
  for (auto& [e, c] : terms_) s += c.get_d() * std::pow(x, e.first) * std::pow(y, e.second);
  return s;
}

Rational BiPoly::evaluate(const Rational& x, const Rational& y) const {
  Rational s = 0;
  for (auto& [e, c] : terms_) {
    Rational t = c;
    for (int k = 0; k < e.first; ++k) t *= x;
    for (int k = 0; k < e.second; ++k) t *= y;
    s += t;
  }
  return s;
}

BiPoly& BiPoly::operator+=(const BiPoly& o) {
  for (auto& [e, c] : o.terms_) {
    Rational v = coeff(e.first, e.second) + c;
    set(e.first, e.second, v);
  }
  return *this;
}

BiPoly& BiPoly::operator-=(const BiPoly& o) {
  for (auto& [e, c] : o.terms_) {
    Rational v = coeff(e.first, e.second) - c;
    set(e.first, e.second, v);
  }
  return *this;
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
  BiPoly::Terms acc;
  for (auto& [ea, ca] : a.terms_)
    for (auto& [eb, cb] : b.terms_) acc[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
  BiPoly r;
  for (auto& [e, c] : acc) r.set(e.first, e.second, c);
  return r;
}

std::string rational_string(const Rational& r) {
  Rational t = r;
  t.canonicalize();
  return t.get_str();
}

std::string BiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // highest degree first reads more naturally
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    auto [i, j] = it->first;
    Rational c = it->second;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    bool unit = (c == 1) && (i + j > 0);
    if (!unit) os << rational_string(c);
    auto var = [&](const char* v, int k) {
      if (k == 0) return;
      if (!unit) os << "*";
      unit = false;
      os << v;
      if (k > 1) os << "^" << k;
    };
    var("x", i);
    var("y", j);
  }
  return os.str();
}

BiPoly add(const BiPoly& a, const BiPoly& b) { return a + b; }
BiPoly mul(const BiPoly& a, const BiPoly& b) { return a * b; }
BiPoly scale(const BiPoly& a, const Rational& s) { return a * BiPoly(s); }

BiPoly pow(const BiPoly& a, int n) {
  BiPoly r(1);
  for (int k = 0; k < n; ++k) r = r * a;
  return r;
}

BiPoly partial_x(const BiPoly& f) {
  BiPoly r;
  for (auto& [e, c] : f.terms())
    if (e.first > 0) r.set(e.first - 1, e.second, c * e.first);
  return r;
}

BiPoly partial_y(const BiPoly& f) {
  BiPoly r;
  for (auto& [e, c] : f.terms())
    if (e.second > 0) r.set(e.first, e.second - 1, c * e.second);
  return r;
}

BiPoly compose(const BiPoly& f, const BiPoly& gx, const BiPoly& gy) {
  BiPoly r;
  for (auto& [e, c] : f.terms()) r += BiPoly(c) * pow(gx, e.first) * pow(gy, e.second);
  return r;
}

Rational exact_rational(double v, long max_den) {
  if (!std::isfinite(v)) throw DomainError("exact_rational: non-finite value");
  // continued-fraction convergents
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = v;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(rest);
    mpz_class ai(a);
    mpz_class h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    // numerator and denominator are exact doubles here, so the quotient is correctly rounded
    if (h2.get_d() / k2.get_d() == v) {
      Rational cand(h2, k2);
      cand.canonicalize();
      return cand;
    }
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = rest - a;
    if (frac == 0) break;
    rest = 1.0 / frac;
  }
  throw DomainError("parameter " + std::to_string(v) +
                    " has no short exact rational form; pass rationals explicitly");
}

RationalParams exact_params(const Params& p) { return {exact_rational(p.b()), exact_rational(p.c())}; }

Params to_params(const RationalParams& rp) { return Params(rp.b.get_d(), rp.c.get_d()); }

BiPoly field_P(const RationalParams&) { return BiPoly::x() - BiPoly::monomial(1, 1); }

BiPoly field_Q(const RationalParams& p) {
  return BiPoly::monomial(0, 2, p.b) + BiPoly::monomial(0, 1, 1 - p.c) + BiPoly::x();
}

BiPoly lie_derivative(const RationalParams& p, const BiPoly& f) {
  return field_P(p) * partial_x(f) + field_Q(p) * partial_y(f);
}

BiPoly lie_derivative(const Params& p, const BiPoly& f) { return lie_derivative(exact_params(p), f); }

std::vector<std::vector<Rational>> rational_kernel(std::vector<std::vector<Rational>> m, int cols) {
  const int rows = static_cast<int>(m.size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int col = 0; col < cols && r < rows; ++col) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[piv], m[r]);
    Rational inv = 1 / m[r][col];
    for (int j = 0; j < cols; ++j) m[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][col] == 0) continue;
      Rational f = m[i][col];
      for (int j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_col.push_back(col);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, 0);
    v[free] = 1;
    for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i) v[pivot_col[i]] = -m[i][free];
    basis.push_back(v);
  }
  return basis;
}

std::optional<BiPoly> cofactor_of(const RationalParams& p, const BiPoly& f) {
  if (f.is_zero()) throw std::invalid_argument("cofactor_of: zero polynomial");
  BiPoly lf = lie_derivative(p, f);
  // unknowns k0, k1, k2 (K = k0 + k1 x + k2 y) plus the constant column
  std::map<BiPoly::Exponent, std::vector<Rational>> eqs;
  auto row = [&](BiPoly::Exponent e) -> std::vector<Rational>& {
    auto it = eqs.find(e);
    if (it == eqs.end()) it = eqs.emplace(e, std::vector<Rational>(4, 0)).first;
    return it->second;
  };
  for (auto& [e, c] : f.terms()) {
    row(e)[0] += c;
    row({e.first + 1, e.second})[1] += c;
    row({e.first, e.second + 1})[2] += c;
  }
  for (auto& [e, c] : lf.terms()) row(e)[3] -= c;
  std::vector<std::vector<Rational>> m;
  for (auto& [e, r] : eqs) m.push_back(r);
  // K f - L f = 0  <=>  [A | -b] (k, 1) = 0
  auto ker = rational_kernel(m, 4);
  for (auto& v : ker) {
    if (v[3] == 0) continue;
    Rational s = 1 / v[3];
    BiPoly K = BiPoly(v[0] * s) + BiPoly::monomial(1, 0, v[1] * s) + BiPoly::monomial(0, 1, v[2] * s);
    if (K * f == lf) return K;
  }
  return std::nullopt;
}

std::optional<BiPoly> cofactor_of(const Params& p, const BiPoly& f) { return cofactor_of(exact_params(p), f); }

namespace {

std::vector<Rational> basis_coeffs(const BiPoly& k) {
  if (k.degree() > 1) throw std::invalid_argument("darboux_combination: cofactor degree exceeds 1");
  return {k.coeff(0, 0), k.coeff(1, 0), k.coeff(0, 1)};
}

}  // namespace

std::optional<Combination> darboux_combination(const std::vector<BiPoly>& cofactors, CombinationMode mode) {
  if (cofactors.empty()) throw std::invalid_argument("darboux_combination: no cofactors");
  const int n = static_cast<int>(cofactors.size());
  const int cols = mode == CombinationMode::invariant ? n + 1 : n;
  std::vector<std::vector<Rational>> m(3, std::vector<Rational>(cols, 0));
  for (int i = 0; i < n; ++i) {
    auto c = basis_coeffs(cofactors[i]);
    for (int r = 0; r < 3; ++r) m[r][i] = c[r];
  }
  if (mode == CombinationMode::invariant) m[0][n] = 1;  // + s
  auto ker = rational_kernel(m, cols);
  for (auto& v : ker) {
    if (mode == CombinationMode::invariant && v[n] == 0) continue;
    Rational lead = 0;
    for (int i = 0; i < n; ++i)
      if (v[i] != 0) {
        lead = v[i];
        break;
      }
    if (lead == 0) continue;
    Combination comb;
    for (int i = 0; i < n; ++i) comb.lambdas.push_back(v[i] / lead);
    comb.s = mode == CombinationMode::invariant ? Rational(v[n] / lead) : Rational(0);
    for (auto& l : comb.lambdas) l.canonicalize();
    comb.s.canonicalize();
    return comb;
  }
  return std::nullopt;
}

BiPoly combination_residual(const std::vector<BiPoly>& cofactors, const Combination& comb) {
  BiPoly r(comb.s);
  for (size_t i = 0; i < cofactors.size(); ++i) r += scale(cofactors[i], comb.lambdas.at(i));
  return r;
}

}  // namespace brlab
