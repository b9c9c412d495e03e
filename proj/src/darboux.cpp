#include "brlab/darboux.hpp"

#include <cmath>
#include <stdexcept>

namespace brlab {

namespace {

const BiPoly X = BiPoly::x();
const BiPoly Y = BiPoly::y();

RationalParams rp(long bn, long bd, long cn, long cd) {
  Rational b(bn, bd), c(cn, cd);
  b.canonicalize();
  c.canonicalize();
  return {b, c};
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> cat;
  cat.push_back({"f1", "all (b, c)", [](const RationalParams&) { return true; },
                 [](const RationalParams&) { return X; },
                 [](const RationalParams&) { return BiPoly(1) - Y; }, rp(1, 1, 3, 1)});
  cat.push_back({"f2", "c = 2b+1",
                 [](const RationalParams& p) { return p.c == 2 * p.b + 1; },
                 [](const RationalParams& p) {
                   Rational a = (2 * p.b + 1) / 2;
                   return BiPoly::monomial(0, 2, a) - scale(Y, 2 * p.b + 1) + X;
                 },
                 [](const RationalParams& p) { return scale(Y - BiPoly(1), 2 * p.b); }, rp(1, 1, 3, 1)});
  auto special = [](const RationalParams& p) { return p.b == Rational(-1, 4) && p.c == Rational(1, 2); };
  cat.push_back({"f3", "b = -1/4, c = 1/2", special,
                 [](const RationalParams&) { return Y * Y + scale(X, 4); },
                 [](const RationalParams&) { return scale(BiPoly(2) - Y, Rational(1, 2)); },
                 rp(-1, 4, 1, 2)});
  cat.push_back({"f4", "b = -1/4, c = 1/2", special,
                 [](const RationalParams&) { return pow(Y - BiPoly(2), 2) + scale(X, 4); },
                 [](const RationalParams&) { return scale(Y, Rational(-1, 2)); }, rp(-1, 4, 1, 2)});
  cat.push_back({"f5", "b = (1-c)/(2c-3), c != 3/2",
                 [](const RationalParams& p) {
                   return 2 * p.c != 3 && p.b == (1 - p.c) / (2 * p.c - 3);
                 },
                 [](const RationalParams& p) {
                   Rational m = 3 - 2 * p.c;
                   return scale(X, 2 * m) + pow(Y - BiPoly(m), 2);
                 },
                 [](const RationalParams& p) {
                   Rational k = 2 * (p.c - 1) / (3 - 2 * p.c);
                   return scale(Y, k);
                 },
                 rp(1, 3, 6, 5)});
  return cat;
}

bool needs_positive(double e) { return e < 0 || e != std::floor(e); }

// exact check when possible, else |lhs-rhs| < 1e-12 with a warning
bool on_locus(const Params& p, const std::function<bool(const RationalParams&)>& exact,
              double float_defect, std::string& warning) {
  try {
    return exact(exact_params(p));
  } catch (const DomainError&) {
    warning = "locus membership checked to 1e-12 only; exact verification requires rational parameters";
    return std::fabs(float_defect) < 1e-12;
  }
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> cat = build_catalog();
  return cat;
}

const CatalogEntry& catalog_entry(const std::string& id) {
  for (auto& e : catalog())
    if (e.id == id) return e;
  throw std::out_of_range("no catalog entry " + id);
}

double DarbouxExpr::log_abs_spatial(double x, double y) const {
  double s = 0;
  for (auto& f : factors) {
    if (f.exponent == 0) continue;
    if (needs_positive(f.exponent) && f.poly == BiPoly::x() && !(x > 0)) return NAN;
    double v = f.poly.evaluate(x, y);
    if (v == 0) return NAN;
    s += f.exponent * std::log(std::fabs(v));
  }
  return s;
}

double DarbouxExpr::value(double x, double y, double t) const {
  double v = 1;
  for (auto& f : factors) {
    double b = f.poly.evaluate(x, y);
    if (needs_positive(f.exponent) && b < 0) return NAN;
    v *= std::pow(b, f.exponent);
  }
  return v * std::exp(exp_rate * t);
}

bool DarbouxExpr::near_singular(double x, double y, double margin) const {
  for (auto& f : factors)
    if (needs_positive(f.exponent) && std::fabs(f.poly.evaluate(x, y)) <= margin) return true;
  return false;
}

DarbouxExpr first_integral_H(const Params& p) {
  DarbouxExpr e;
  if (!on_locus(p, catalog_entry("f2").valid, p.c() - 2 * p.b() - 1, e.warning))
    throw DomainError("no catalog first integral at " + format_params(p) + " (needs c = 2b+1)");
  RationalParams r;
  try {
    r = exact_params(p);
  } catch (const DomainError&) {
    // f2 coefficients from the nearest short rational of b; c follows from the locus
    r.b = exact_rational(p.b(), 1L << 30);
    r.c = 2 * r.b + 1;
  }
  e.factors = {{BiPoly(2), 1}, {BiPoly::x(), 2 * p.b()}, {catalog_entry("f2").curve(r), 1}};
  e.exp_rate = 0;
  return e;
}

std::pair<DarbouxExpr, DarbouxExpr> invariants_I1_I2(const Params& p) {
  std::string w;
  if (!on_locus(p, catalog_entry("f3").valid, std::fabs(p.b() + 0.25) + std::fabs(p.c() - 0.5), w))
    throw DomainError("I1, I2 exist only at (b, c) = (-1/4, 1/2)");
  RationalParams r = rp(-1, 4, 1, 2);
  DarbouxExpr i1, i2;
  i1.factors = {{BiPoly::x(), -0.5}, {catalog_entry("f3").curve(r), 1}};
  i1.exp_rate = -0.5;
  i2.factors = {{BiPoly::x(), -0.5}, {catalog_entry("f4").curve(r), 1}};
  i2.exp_rate = 0.5;
  i1.warning = i2.warning = w;
  return {i1, i2};
}

DarbouxExpr invariant_I3(const Params& p) {
  DarbouxExpr e;
  const double c = p.c();
  if (c == 1.5) throw DomainError("I3 undefined at c = 3/2");
  if (!on_locus(p, catalog_entry("f5").valid, p.b() - (1 - c) / (2 * c - 3), e.warning))
    throw DomainError("I3 needs b = (1-c)/(2c-3) at " + format_params(p));
  RationalParams r;
  try {
    r = exact_params(p);
  } catch (const DomainError&) {
    r.c = exact_rational(c, 1L << 30);
    r.b = (1 - r.c) / (2 * r.c - 3);
  }
  e.factors = {{BiPoly::x(), 2 * (1 - c) / (2 * c - 3)}, {catalog_entry("f5").curve(r), 1}};
  e.exp_rate = 2 * (1 - c) / (3 - 2 * c);
  return e;
}

DarbouxExpr product(const DarbouxExpr& a, const DarbouxExpr& b) {
  DarbouxExpr r;
  for (auto& f : a.factors) {
    bool merged = false;
    for (auto& g : r.factors)
      if (g.poly == f.poly) g.exponent += f.exponent, merged = true;
    if (!merged) r.factors.push_back(f);
  }
  for (auto& f : b.factors) {
    bool merged = false;
    for (auto& g : r.factors)
      if (g.poly == f.poly) g.exponent += f.exponent, merged = true;
    if (!merged) r.factors.push_back(f);
  }
  r.exp_rate = a.exp_rate + b.exp_rate;
  return r;
}

DriftReport verify_along_flow(const DarbouxExpr& expr, const std::vector<TimedSample>& orbit, double margin) {
  DriftReport rep;
  std::vector<double> ts, ls;
  bool in_gap = false;
  double gap_start = 0;
  for (auto& s : orbit) {
    double l = expr.near_singular(s.q.x, s.q.y, margin) ? NAN : expr.log_abs_spatial(s.q.x, s.q.y);
    if (!std::isfinite(l)) {
      ++rep.samples_excluded;
      if (!in_gap) in_gap = true, gap_start = s.t;
      continue;
    }
    if (in_gap) {
      rep.excluded_segments.push_back({gap_start, s.t});
      in_gap = false;
    }
    ts.push_back(s.t);
    ls.push_back(l);
  }
  if (in_gap) rep.excluded_segments.push_back({gap_start, orbit.back().t});
  rep.samples_used = ts.size();
  if (ts.empty()) return rep;
  const double t0 = ts[0], l0 = ls[0];
  for (size_t i = 0; i < ts.size(); ++i) {
    double r = (ls[i] + expr.exp_rate * ts[i]) - (l0 + expr.exp_rate * t0);
    rep.max_log_residual = std::max(rep.max_log_residual, std::fabs(r));
    rep.max_relative_drift = std::max(rep.max_relative_drift, std::fabs(std::expm1(r)));
  }
  if (ts.size() >= 2) {
    double mt = 0, ml = 0;
    for (size_t i = 0; i < ts.size(); ++i) mt += ts[i], ml += ls[i];
    mt /= ts.size();
    ml /= ts.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < ts.size(); ++i) num += (ts[i] - mt) * (ls[i] - ml), den += (ts[i] - mt) * (ts[i] - mt);
    if (den > 0) rep.measured_rate = -num / den;
  }
  return rep;
}

namespace {

std::string where(const RationalParams& p) {
  return "b=" + rational_string(p.b) + ", c=" + rational_string(p.c);
}

VerificationRow curve_row(const CatalogEntry& e, const RationalParams& p) {
  BiPoly f = e.curve(p), k = e.cofactor(p);
  BiPoly res = lie_derivative(p, f) - k * f;
  return {e.id + ": X(f) = K f", where(p), res.is_zero() && k.degree() <= 1, res.to_string()};
}

bool proportional(const Combination& a, const Combination& b) {
  if (a.lambdas.size() != b.lambdas.size()) return false;
  // find factor from first nonzero entry of a
  Rational f = 0;
  for (size_t i = 0; i < a.lambdas.size(); ++i)
    if (a.lambdas[i] != 0) {
      if (b.lambdas[i] == 0) return false;
      f = b.lambdas[i] / a.lambdas[i];
      break;
    }
  if (f == 0) return false;
  for (size_t i = 0; i < a.lambdas.size(); ++i)
    if (a.lambdas[i] * f != b.lambdas[i]) return false;
  return a.s * f == b.s;
}

VerificationRow combination_row(const std::string& name, const std::vector<CatalogEntry>& cat,
                                 const std::string& id, const RationalParams& p, const Combination& expected,
                                 CombinationMode mode) {
  auto find = [&](const std::string& i) -> const CatalogEntry& {
    for (auto& e : cat)
      if (e.id == i) return e;
    throw std::out_of_range(i);
  };
  std::vector<BiPoly> ks = {find("f1").cofactor(p), find(id).cofactor(p)};
  VerificationRow row{name, where(p), false, ""};
  BiPoly res = combination_residual(ks, expected);
  auto got = darboux_combination(ks, mode);
  row.pass = res.is_zero() && got && proportional(*got, expected) && combination_residual(ks, *got).is_zero();
  row.residual = res.to_string();
  if (!got) row.residual += " (solver: none)";
  return row;
}

Rational q(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

}  // namespace

std::vector<VerificationRow> verification_table(const std::vector<CatalogEntry>& cat) {
  std::vector<VerificationRow> rows;
  for (auto& e : cat) rows.push_back(curve_row(e, e.witness));
  RationalParams p2 = rp(1, 1, 3, 1), p34 = rp(-1, 4, 1, 2), p5 = rp(1, 3, 6, 5);
  rows.push_back(combination_row("2b K1 + K2 = 0", cat, "f2", p2, {{2 * p2.b, 1}, 0},
                                 CombinationMode::first_integral));
  rows.push_back(combination_row("-1/2 K1 + K3 = 1/2", cat, "f3", p34, {{q(-1, 2), 1}, q(-1, 2)},
                                 CombinationMode::invariant));
  rows.push_back(combination_row("-1/2 K1 + K4 = -1/2", cat, "f4", p34, {{q(-1, 2), 1}, q(1, 2)},
                                 CombinationMode::invariant));
  Rational l1 = 2 * (1 - p5.c) / (2 * p5.c - 3), rhs = 2 * (p5.c - 1) / (3 - 2 * p5.c);
  rows.push_back(combination_row("2(1-c)/(2c-3) K1 + K5 = 2(c-1)/(3-2c)", cat, "f5", p5, {{l1, 1}, -rhs},
                                 CombinationMode::invariant));
  return rows;
}

std::vector<VerificationRow> verification_table_at(const std::vector<CatalogEntry>& cat, const RationalParams& p) {
  std::vector<VerificationRow> rows;
  for (auto& e : cat)
    if (e.valid(p)) rows.push_back(curve_row(e, p));
  return rows;
}

}  // namespace brlab
