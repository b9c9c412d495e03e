#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "brlab/model.hpp"

namespace brlab {

using Rational = mpq_class;

// Bivariate polynomial in (x, y) with exact rational coefficients.
class BiPoly {
 public:
  using Exponent = std::pair<int, int>;
  using Terms = std::map<Exponent, Rational>;

  BiPoly() = default;
  BiPoly(const Rational& constant);  // NOLINT: implicit on purpose
  BiPoly(long constant) : BiPoly(Rational(constant)) {}
  BiPoly(int constant) : BiPoly(Rational(constant)) {}

  static BiPoly x();
  static BiPoly y();
  static BiPoly monomial(int i, int j, const Rational& coeff = 1);

  const Terms& terms() const { return terms_; }
  Rational coeff(int i, int j) const;
  void set(int i, int j, const Rational& v);
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // -1 for the zero polynomial

  double evaluate(double x, double y) const;
  Rational evaluate(const Rational& x, const Rational& y) const;

  BiPoly& operator+=(const BiPoly& o);
  BiPoly& operator-=(const BiPoly& o);
  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
  friend BiPoly operator-(const BiPoly& a) { return BiPoly() - a; }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b);
  bool operator==(const BiPoly& o) const { return terms_ == o.terms_; }

  std::string to_string() const;

 private:
  Terms terms_;
};

BiPoly add(const BiPoly& a, const BiPoly& b);
BiPoly mul(const BiPoly& a, const BiPoly& b);
BiPoly scale(const BiPoly& a, const Rational& s);
BiPoly pow(const BiPoly& a, int n);
BiPoly partial_x(const BiPoly& f);
BiPoly partial_y(const BiPoly& f);
// f(gx, gy)
BiPoly compose(const BiPoly& f, const BiPoly& gx, const BiPoly& gy);

struct RationalParams {
  Rational b, c;
};

// Recovers small-denominator rationals from doubles (0.1 -> 1/10); throws
// DomainError when the value has no short exact representation.
Rational exact_rational(double v, long max_den = 1000000);
RationalParams exact_params(const Params& p);
Params to_params(const RationalParams& rp);

BiPoly field_P(const RationalParams& p);
BiPoly field_Q(const RationalParams& p);

BiPoly lie_derivative(const RationalParams& p, const BiPoly& f);
BiPoly lie_derivative(const Params& p, const BiPoly& f);

struct CurveWithCofactor {
  BiPoly curve, cofactor;
};

std::optional<BiPoly> cofactor_of(const RationalParams& p, const BiPoly& f);
std::optional<BiPoly> cofactor_of(const Params& p, const BiPoly& f);

enum class CombinationMode { first_integral, invariant };

struct Combination {
  std::vector<Rational> lambdas;
  Rational s;
};

std::optional<Combination> darboux_combination(const std::vector<BiPoly>& cofactors,
                                               CombinationMode mode);

// sum lambda_i K_i + s, zero for a valid combination
BiPoly combination_residual(const std::vector<BiPoly>& cofactors, const Combination& comb);

// Kernel of a dense rational matrix (rows x cols), RREF based, one vector per free column.
std::vector<std::vector<Rational>> rational_kernel(std::vector<std::vector<Rational>> m, int cols);

std::string rational_string(const Rational& r);

}  // namespace brlab
