#pragma once

#include <complex>
#include <string>
#include <vector>

#include "brlab/exactpoly.hpp"
#include "brlab/model.hpp"

namespace brlab {

struct BifurcationValues {
  double g0, g1, g2, g3, g4, D1;
};

BifurcationValues bifurcation_values(const Params& p);
Rational D1_exact(const RationalParams& p);

enum class PointKind {
  unstable_node,
  stable_node,
  saddle,
  unstable_focus,
  stable_focus,
  center,
  saddle_node,
  merged,
  non_isolated,  // q1: the whole line x = 0 is singular
};

std::string to_string(PointKind k);

using Complex = std::complex<double>;

struct SeparatrixDirection {
  Vec2 dir;       // unit vector; both signs are separatrix candidates
  double eigenvalue;
};

struct SingularPointInfo {
  std::string id;  // P0, P1, P2
  PlanePoint location;
  std::pair<Complex, Complex> eigenvalues;
  PointKind kind = PointKind::merged;
  std::vector<SeparatrixDirection> separatrix_directions{};
  std::string merged_with{};  // id of the point it coincides with, if any
  bool degenerate = false;  // on a stratum where the classification is non-generic
};

// Sign of v with |v| <= tol treated as zero.
int sign_tol(double v, double tol);

std::vector<SingularPointInfo> finite_singular_points(const Params& p, double tol = 1e-12);
std::pair<Complex, Complex> p2_eigenvalues(const Params& p);
std::vector<SingularPointInfo> classify_finite(const Params& p, double tol = 1e-12);
std::vector<SingularPointInfo> classify_finite(const RationalParams& p);

// numeric eigen-decomposition of a 2x2 matrix
std::pair<Complex, Complex> eigenvalues(const Mat2& m);

}  // namespace brlab
