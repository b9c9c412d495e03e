#include "brlab/model.hpp"

#include <cmath>
#include <cstdio>

namespace brlab {

FullParams::FullParams(double c_, double k_, double h_) : c(c_), k(k_), h(h_) {
  if (!(c > 0) || !(k > 0) || !(h > 0) || !std::isfinite(c) || !std::isfinite(k) || !std::isfinite(h))
    throw DomainError("FullParams: c, k, h must be finite and positive");
}

Params::Params(double b, double c) : b_(b), c_(c) {
  if (!std::isfinite(b) || !std::isfinite(c)) throw DomainError("Params: non-finite value");
  if (!(b > -1)) throw DomainError("Params: b must satisfy b > -1");
  if (!(c > 0)) throw DomainError("Params: c must satisfy c > 0");
}

Reduction reduce(const FullParams& fp) {
  // only x is rescaled; time is left alone
  return {Params(fp.h - 1, fp.c), fp.c / fp.k};
}

Vec2 eval_field(const Params& p, PlanePoint q) {
  const double x = q.x, y = q.y;
  return {x * (1 - y), p.b() * y * y + (1 - p.c()) * y + x};
}

Vec2 eval_full_field(const FullParams& fp, PlanePoint q) {
  const double x = q.x, y = q.y;
  return {x * (1 - y), (fp.h - 1) * y * y + (1 - fp.c) * y + (fp.c / fp.k) * x};
}

Mat2 jacobian(const Params& p, PlanePoint q) {
  return {{{1 - q.y, -q.x}, {1, 2 * p.b() * q.y + 1 - p.c()}}};
}

std::string format_params(const Params& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(b=%.17g, c=%.17g)", p.b(), p.c());
  return buf;
}

}  // namespace brlab
