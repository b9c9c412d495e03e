#pragma once

#include <functional>
#include <string>
#include <vector>

#include "brlab/exactpoly.hpp"
#include "brlab/model.hpp"

namespace brlab {

struct CatalogEntry {
  std::string id;  // f1..f5
  std::string locus;  // human readable validity condition
  std::function<bool(const RationalParams&)> valid;
  std::function<BiPoly(const RationalParams&)> curve;
  std::function<BiPoly(const RationalParams&)> cofactor;
  RationalParams witness;  // a rational point on the locus, used by the verification table
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& id);

struct DarbouxFactor {
  BiPoly poly;
  double exponent;
};

// prod f_i^{e_i} * exp(exp_rate * t)
struct DarbouxExpr {
  std::vector<DarbouxFactor> factors;
  double exp_rate = 0;
  std::string warning;  // set when locus membership was only checked in floating point

  // log|expr| without the exponential factor; NaN when a factor that needs x>0 or f!=0 is hit
  double log_abs_spatial(double x, double y) const;
  double value(double x, double y, double t) const;
  // true if any factor with a negative or fractional exponent is within margin of zero
  bool near_singular(double x, double y, double margin) const;
};

DarbouxExpr first_integral_H(const Params& p);
std::pair<DarbouxExpr, DarbouxExpr> invariants_I1_I2(const Params& p);
DarbouxExpr invariant_I3(const Params& p);
DarbouxExpr product(const DarbouxExpr& a, const DarbouxExpr& b);

struct TimedSample {
  double t;
  PlanePoint q;
};

struct DriftReport {
  double max_log_residual = 0;  // max |log E(t) - log E(t0)| after removing the known rate
  double max_relative_drift = 0;  // max |E(t)/E(t0) - 1|
  double measured_rate = 0;  // least-squares s with log F(t) + s t = const
  std::size_t samples_used = 0;
  std::size_t samples_excluded = 0;
  std::vector<std::pair<double, double>> excluded_segments;  // time intervals
};

DriftReport verify_along_flow(const DarbouxExpr& expr, const std::vector<TimedSample>& orbit,
                              double margin = 1e-8);

struct VerificationRow {
  std::string name;
  std::string where;
  bool pass;
  std::string residual;  // "0" when exact identity holds
};

// The curve identities of the catalog entries (at their witness points) followed by
// the four combination identities.
std::vector<VerificationRow> verification_table(const std::vector<CatalogEntry>& cat);
// Identities of entries valid at the supplied rational point.
std::vector<VerificationRow> verification_table_at(const std::vector<CatalogEntry>& cat,
                                                   const RationalParams& p);

}  // namespace brlab
