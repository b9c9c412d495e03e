#pragma once

#include <functional>
#include <vector>

#include "brlab/darboux.hpp"
#include "brlab/model.hpp"

namespace brlab {

using Field2 = std::function<Vec2(const Vec2&)>;

// One Dormand-Prince 5(4) step. k1 is f(z) on entry; on exit k7 holds f(z_new) (FSAL).
void dp45_step(const Field2& f, const Vec2& z, double h, const Vec2& k1, Vec2& z_new, Vec2& err, Vec2& k7);

// Scaled max-norm of the error estimate with atol = rtol = tol.
double dp45_error_norm(const Vec2& z, const Vec2& z_new, const Vec2& err, double tol);

// Step factor from an error norm (order 5 controller with safety 0.9, clamp [0.2, 5]).
double dp45_factor(double err_norm);

// Plane integration of the reduced field, one sample per accepted step.
// Stops early if |(x, y)| exceeds blowup.
std::vector<TimedSample> integrate_plane(const Params& p, PlanePoint q0, double t_end, double tol,
                                         double max_step = 0.05, double blowup = 1e8);

}  // namespace brlab
