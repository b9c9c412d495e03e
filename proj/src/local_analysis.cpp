#include "brlab/local_analysis.hpp"

#include <cmath>

namespace brlab {

BifurcationValues bifurcation_values(const Params& p) {
  const double b = p.b(), c = p.c();
  return {b, c - 1, b - c + 1, 2 * b - c + 1, b + 1, c * c - 4 * c * b + 4 * b * b - 6 * c + 8 * b + 5};
}

Rational D1_exact(const RationalParams& p) {
  const Rational &b = p.b, &c = p.c;
  return c * c - 4 * c * b + 4 * b * b - 6 * c + 8 * b + 5;
}

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::unstable_node: return "unstable node";
    case PointKind::stable_node: return "stable node";
    case PointKind::saddle: return "saddle";
    case PointKind::unstable_focus: return "unstable focus";
    case PointKind::stable_focus: return "stable focus";
    case PointKind::center: return "center";
    case PointKind::saddle_node: return "saddle-node";
    case PointKind::merged: return "merged";
    case PointKind::non_isolated: return "non-isolated";
  }
  return "?";
}

int sign_tol(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

std::pair<Complex, Complex> eigenvalues(const Mat2& m) {
  const double tr = m[0][0] + m[1][1], det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double disc = tr * tr / 4 - det;
  if (disc >= 0) {
    double s = std::sqrt(disc);
    // avoid cancellation for the small root
    double l1 = tr / 2 + (tr >= 0 ? s : -s);
    double l2 = l1 != 0 ? det / l1 : tr / 2 - (tr >= 0 ? s : -s);
    return {Complex(std::max(l1, l2)), Complex(std::min(l1, l2))};
  }
  double s = std::sqrt(-disc);
  return {Complex(tr / 2, s), Complex(tr / 2, -s)};
}

std::pair<Complex, Complex> p2_eigenvalues(const Params& p) {
  auto v = bifurcation_values(p);
  if (v.D1 >= 0) {
    double s = std::sqrt(v.D1);
    return {Complex((v.g3 + s) / 2), Complex((v.g3 - s) / 2)};
  }
  double s = std::sqrt(-v.D1);
  return {Complex(v.g3 / 2, s / 2), Complex(v.g3 / 2, -s / 2)};
}

namespace {

struct Signs {
  int g0, g1, g2, g3, D1;
};

Vec2 unit(double a, double b) {
  double n = std::hypot(a, b);
  return {a / n, b / n};
}

// Lower-triangular Jacobian [[a, 0], [1, d]] of a point on x = 0.
std::vector<SeparatrixDirection> axis_directions(double a, double d) {
  return {{unit(a - d, 1), a}, {{0, 1}, d}};
}

PointKind node_or_saddle(int s1, int s2) {
  if (s1 > 0 && s2 > 0) return PointKind::unstable_node;
  if (s1 < 0 && s2 < 0) return PointKind::stable_node;
  return PointKind::saddle;
}

std::vector<SingularPointInfo> classify(const Params& p, const Signs& s) {
  const double b = p.b(), c = p.c();
  std::vector<SingularPointInfo> out;
  const bool q1 = s.g0 == 0 && s.g1 == 0;

  SingularPointInfo P0{"P0", {0, 0}, {Complex(1), Complex(1 - c)}};
  if (q1) {
    P0.kind = PointKind::non_isolated;
    P0.degenerate = true;
  } else if (s.g1 < 0) {
    P0.kind = PointKind::unstable_node;
  } else if (s.g1 > 0) {
    P0.kind = PointKind::saddle;
    P0.separatrix_directions = axis_directions(1, 1 - c);
  } else {
    P0.kind = PointKind::saddle_node;
    P0.degenerate = true;
    P0.separatrix_directions = axis_directions(1, 0);
  }
  out.push_back(P0);

  if (s.g0 != 0) {
    const double y1 = (c - 1) / b, l2 = (b - c + 1) / b;
    SingularPointInfo P1{"P1", {0, y1}, {Complex(c - 1), Complex(l2)}};
    if (s.g1 == 0) {
      P1.kind = PointKind::merged;
      P1.merged_with = "P0";
    } else if (s.g2 == 0) {
      P1.kind = PointKind::merged;
      P1.merged_with = "P2";
    } else {
      P1.kind = node_or_saddle(s.g1, s.g2 * s.g0);
      if (P1.kind == PointKind::saddle) P1.separatrix_directions = axis_directions(l2, c - 1);
    }
    out.push_back(P1);
  }

  SingularPointInfo P2{"P2", {c - b - 1, 1}, p2_eigenvalues(p)};
  if (q1) {
    P2.kind = PointKind::non_isolated;
    P2.degenerate = true;
  } else if (s.D1 >= 0) {
    if (s.g2 < 0)
      P2.kind = s.g3 > 0 ? PointKind::unstable_node : PointKind::stable_node;
    else if (s.g2 > 0)
      P2.kind = PointKind::saddle;
    else
      P2.kind = PointKind::saddle_node;
    P2.degenerate = s.D1 == 0 || s.g2 == 0;
    if (P2.kind == PointKind::saddle || P2.kind == PointKind::saddle_node) {
      const double x2 = c - b - 1;
      for (auto l : {P2.eigenvalues.first.real(), P2.eigenvalues.second.real()}) {
        if (x2 == 0 && l == 0)
          P2.separatrix_directions.push_back({unit(b, -1), 0});
        else if (x2 == 0)
          P2.separatrix_directions.push_back({{0, 1}, l});
        else
          P2.separatrix_directions.push_back({unit(x2, -l), l});
      }
    }
  } else {
    P2.kind = s.g3 > 0 ? PointKind::unstable_focus : (s.g3 < 0 ? PointKind::stable_focus : PointKind::center);
    P2.degenerate = s.g3 == 0;
  }
  if (s.g0 != 0 && s.g2 == 0) P2.merged_with = "P1";
  if (s.g0 != 0 && s.g1 == 0) P0.merged_with = "P1";
  out.front().merged_with = P0.merged_with;
  out.push_back(P2);
  return out;
}

}  // namespace

std::vector<SingularPointInfo> classify_finite(const Params& p, double tol) {
  auto v = bifurcation_values(p);
  return classify(p, {sign_tol(v.g0, tol), sign_tol(v.g1, tol), sign_tol(v.g2, tol), sign_tol(v.g3, tol),
                      sign_tol(v.D1, tol)});
}

std::vector<SingularPointInfo> classify_finite(const RationalParams& p) {
  auto sg = [](const Rational& r) { return sgn(r); };
  Signs s{sg(p.b), sg(p.c - 1), sg(p.b - p.c + 1), sg(2 * p.b - p.c + 1), sg(D1_exact(p))};
  return classify(to_params(p), s);
}

std::vector<SingularPointInfo> finite_singular_points(const Params& p, double tol) {
  auto all = classify_finite(p, tol);
  for (auto& s : all) {
    s.separatrix_directions.clear();
  }
  return all;
}

}  // namespace brlab
