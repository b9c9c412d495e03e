#include "brlab/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace brlab {

namespace {

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

void dp45_step(const Field2& f, const Vec2& z, double h, const Vec2& k1, Vec2& z_new, Vec2& err, Vec2& k7) {
  Vec2 k2, k3, k4, k5, k6, t;
  for (int i = 0; i < 2; ++i) t[i] = z[i] + h * a21 * k1[i];
  k2 = f(t);
  for (int i = 0; i < 2; ++i) t[i] = z[i] + h * (a31 * k1[i] + a32 * k2[i]);
  k3 = f(t);
  for (int i = 0; i < 2; ++i) t[i] = z[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  k4 = f(t);
  for (int i = 0; i < 2; ++i) t[i] = z[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  k5 = f(t);
  for (int i = 0; i < 2; ++i)
    t[i] = z[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  k6 = f(t);
  for (int i = 0; i < 2; ++i)
    z_new[i] = z[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  k7 = f(z_new);
  for (int i = 0; i < 2; ++i)
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
}

double dp45_error_norm(const Vec2& z, const Vec2& z_new, const Vec2& err, double tol) {
  double m = 0;
  for (int i = 0; i < 2; ++i) {
    double sc = tol + tol * std::max(std::fabs(z[i]), std::fabs(z_new[i]));
    m = std::max(m, std::fabs(err[i]) / sc);
  }
  return m;
}

double dp45_factor(double err_norm) {
  if (err_norm == 0) return 5;
  return std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
}

std::vector<TimedSample> integrate_plane(const Params& p, PlanePoint q0, double t_end, double tol, double max_step,
                                         double blowup) {
  Field2 f = [&](const Vec2& z) { return eval_field(p, {z[0], z[1]}); };
  std::vector<TimedSample> out{{0, q0}};
  Vec2 z{q0.x, q0.y}, k1 = f(z), zn, err, k7;
  double t = 0, h = std::min(max_step, 1e-3);
  while (t < t_end) {
    h = std::min({h, t_end - t, max_step});
    dp45_step(f, z, h, k1, zn, err, k7);
    double e = dp45_error_norm(z, zn, err, tol);
    if (e <= 1) {
      t += h;
      z = zn;
      k1 = k7;
      out.push_back({t, {z[0], z[1]}});
      if (std::hypot(z[0], z[1]) > blowup) break;
    }
    h *= dp45_factor(e);
    if (h < 1e-14) break;
  }
  return out;
}

}  // namespace brlab
