#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace brlab {

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Three-parameter model: x' = x(1 - y), y' = (h-1)y^2 + (1-c)y + (c/k)x.
struct FullParams {
  double c, k, h;
  FullParams(double c_, double k_, double h_);
};

// Reduced parameters, domain b > -1, c > 0.
class Params {
 public:
  Params(double b, double c);
  double b() const { return b_; }
  double c() const { return c_; }
  bool operator==(const Params&) const = default;

 private:
  double b_, c_;
};

struct PlanePoint {
  double x = 0, y = 0;
  bool operator==(const PlanePoint&) const = default;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

struct Reduction {
  Params params;
  double x_scale;  // X = x_scale * x
};

Reduction reduce(const FullParams& fp);

Vec2 eval_field(const Params& p, PlanePoint q);
Vec2 eval_full_field(const FullParams& fp, PlanePoint q);
Mat2 jacobian(const Params& p, PlanePoint q);

std::string format_params(const Params& p);

}  // namespace brlab
