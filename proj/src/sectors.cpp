#include <algorithm>
#include <cmath>

#include "brlab/flow.hpp"

namespace brlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double qpow(double r, int w) { return w == 1 ? r : r * r; }

double quasi_radius(double d1, double d2, int w1, int w2) {
  if (w1 == 1 && w2 == 1) return std::hypot(d1, d2);
  if (w1 == 1 && w2 == 2) {
    double a = d1 * d1;
    return std::sqrt(0.5 * (a + std::sqrt(a * a + 4 * d2 * d2)));
  }
  throw std::invalid_argument("sector_probe: weights must be (1,1) or (1,2)");
}

double quasi_angle(double d1, double d2, double rho, int w1, int w2) {
  return std::atan2(d2 / qpow(rho, w2), d1 / qpow(rho, w1));
}

double angle_gap(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 2 * kPi);
  return std::min(d, 2 * kPi - d);
}

struct Outcome {
  int res = 0;  // +1 out, -1 in, 0 unresolved
  double angle = 0;
};

Outcome run_local(const LocalField& f, Vec2 c, Vec2 z0, double r, double sgn, const ProbeOptions& o) {
  const double r_in = o.in_factor * r, r_out = std::min(o.out_factor * r, o.outer_limit);
  Field2 F = [&](const Vec2& z) {
    Vec2 v = f(z[0], z[1]);
    return Vec2{sgn * v[0], sgn * v[1]};
  };
  Vec2 z = z0, k1 = F(z), zn, err, k7;
  double rho = quasi_radius(z[0] - c[0], z[1] - c[1], o.w1, o.w2);
  double speed = std::max(std::fabs(k1[0]) / qpow(rho, o.w1), std::fabs(k1[1]) / qpow(rho, o.w2));
  if (speed == 0) return {};
  double h = 0.01 / speed;
  for (int step = 0; step < 40000;) {
    dp45_step(F, z, h, k1, zn, err, k7);
    double s1 = qpow(rho, o.w1), s2 = qpow(rho, o.w2);
    double e = std::max(std::fabs(err[0]) / (1e-9 * s1), std::fabs(err[1]) / (1e-9 * s2));
    double disp = std::max(std::fabs(zn[0] - z[0]) / s1, std::fabs(zn[1] - z[1]) / s2);
    if (!(e <= 1)) {
      h *= std::isfinite(e) ? dp45_factor(e) : 0.1;
      if (h < 1e-300) return {};
      continue;
    }
    if (disp > 0.2) {
      h *= std::max(0.1, 0.9 * 0.2 / disp);
      continue;
    }
    ++step;
    z = zn;
    k1 = k7;
    rho = quasi_radius(z[0] - c[0], z[1] - c[1], o.w1, o.w2);
    if (rho < r_in) return {-1, 0};
    if (rho > r_out) return {1, quasi_angle(z[0] - c[0], z[1] - c[1], rho, o.w1, o.w2)};
    h *= dp45_factor(e);
  }
  return {};
}

enum Cls { H, E, PIN, POUT, UNRES };

struct Seed {
  double theta;
  Outcome fwd, bwd;
  Cls cls() const {
    if (fwd.res == 0 || bwd.res == 0) return UNRES;
    if (fwd.res > 0 && bwd.res > 0) return H;
    if (fwd.res < 0 && bwd.res < 0) return E;
    return fwd.res < 0 ? PIN : POUT;
  }
};

Seed probe_seed(const LocalField& f, Vec2 c, double r, double th, const ProbeOptions& o) {
  Vec2 z = quasi_point(c, r, th, o.w1, o.w2);
  return {th, run_local(f, c, z, r, 1, o), run_local(f, c, z, r, -1, o)};
}

bool aspect_differs(const Outcome& a, const Outcome& b) {
  if (a.res != b.res) return true;
  return a.res > 0 && angle_gap(a.angle, b.angle) > 0.5;
}

bool same_side(const Outcome& m, const Outcome& a, const Outcome& b) {
  if (m.res != a.res) return false;
  if (m.res > 0 && b.res > 0) return angle_gap(m.angle, a.angle) <= angle_gap(m.angle, b.angle);
  return true;
}

SectorType sector_of(Cls c) { return c == H ? SectorType::hyperbolic : (c == E ? SectorType::elliptic : SectorType::parabolic); }

struct Run {
  Cls cls;
  int first, last;  // seed indices, inclusive
};

// Runs of equal class; H runs split at exit-angle jumps.
std::vector<Run> runs_of(const std::vector<Seed>& seeds, bool cyclic) {
  std::vector<Run> runs;
  for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
    Cls c = seeds[i].cls();
    bool cont = !runs.empty() && runs.back().cls == c;
    if (cont && c == H)
      cont = !aspect_differs(seeds[i - 1].fwd, seeds[i].fwd) && !aspect_differs(seeds[i - 1].bwd, seeds[i].bwd);
    if (cont)
      runs.back().last = i;
    else
      runs.push_back({c, i, i});
  }
  if (cyclic && runs.size() > 1 && runs.front().cls == runs.back().cls) {
    const Seed &a = seeds.back(), &b = seeds.front();
    bool join = runs.front().cls != H || (!aspect_differs(a.fwd, b.fwd) && !aspect_differs(a.bwd, b.bwd));
    if (join) {
      runs.front().first = runs.back().first - static_cast<int>(seeds.size());
      runs.pop_back();
    }
  }
  return runs;
}

std::vector<Sector> compress(const std::vector<Run>& runs, bool cyclic, const std::vector<double>& theta) {
  // drop thin non-hyperbolic runs squeezed between hyperbolic ones (they are the separatrix itself)
  std::vector<Run> kept;
  for (size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    int len = r.last - r.first + 1;
    bool prev_h = i > 0 ? runs[i - 1].cls == H : (cyclic && runs.back().cls == H);
    bool next_h = i + 1 < runs.size() ? runs[i + 1].cls == H : (cyclic && runs.front().cls == H);
    if (r.cls != H && len <= 2 && prev_h && next_h && runs.size() > 2) continue;
    kept.push_back(r);
  }
  const int n = static_cast<int>(theta.size());
  auto at = [&](int i) { return theta[(i % n + n) % n] + (i < 0 ? -2 * kPi : i >= n ? 2 * kPi : 0); };
  std::vector<Sector> out;
  for (auto& r : kept) {
    SectorType t = sector_of(r.cls);
    if (!out.empty() && out.back().type == t && t != SectorType::hyperbolic) {
      out.back().theta_end = at(r.last);
      continue;
    }
    out.push_back({t, at(r.first), at(r.last)});
  }
  if (cyclic && out.size() > 1 && out.front().type == out.back().type && out.front().type != SectorType::hyperbolic) {
    out.front().theta_begin = out.back().theta_begin - (out.back().theta_begin > out.front().theta_begin ? 2 * kPi : 0);
    out.pop_back();
  }
  return out;
}

std::vector<SectorType> types_of(const std::vector<Sector>& s) {
  std::vector<SectorType> t;
  for (auto& x : s) t.push_back(x.type);
  return t;
}

bool cyclic_equal(const std::vector<SectorType>& a, const std::vector<SectorType>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  for (size_t s = 0; s < a.size(); ++s) {
    bool ok = true;
    for (size_t i = 0; i < a.size() && ok; ++i) ok = a[i] == b[(i + s) % a.size()];
    if (ok) return true;
  }
  return false;
}

}  // namespace

std::string to_string(SectorType s) {
  switch (s) {
    case SectorType::hyperbolic: return "hyperbolic";
    case SectorType::elliptic: return "elliptic";
    case SectorType::parabolic: return "parabolic";
  }
  return "?";
}

int ProbeResult::count(SectorType t) const {
  int n = 0;
  for (auto& s : sectors) n += s.type == t;
  return n;
}

Vec2 quasi_point(Vec2 c, double r, double th, int w1, int w2) {
  return {c[0] + qpow(r, w1) * std::cos(th), c[1] + qpow(r, w2) * std::sin(th)};
}

ProbeResult sector_probe(const LocalField& f, Vec2 point, const ProbeOptions& o) {
  ProbeResult res;
  std::vector<SectorType> prev;
  bool have_prev = false;
  std::vector<Seed> seeds;
  for (double r : o.radii) {
    std::vector<double> th;
    if (o.full_circle) {
      for (int i = 0; i < o.seeds; ++i) th.push_back(o.theta_min + 2 * kPi * i / o.seeds);
    } else {
      for (int i = 0; i <= o.seeds; ++i) th.push_back(o.theta_min + (o.theta_max - o.theta_min) * i / o.seeds);
    }
    for (double a : o.extra_angles) {
      double x = a;
      if (o.full_circle) {
        x = std::fmod(a - o.theta_min, 2 * kPi);
        if (x < 0) x += 2 * kPi;
        x += o.theta_min;
      }
      if (x > o.theta_min && x < (o.full_circle ? o.theta_min + 2 * kPi : o.theta_max)) th.push_back(x);
    }
    std::sort(th.begin(), th.end());
    th.erase(std::unique(th.begin(), th.end(), [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
             th.end());
    seeds.clear();
    for (double a : th) seeds.push_back(probe_seed(f, point, r, a, o));
    // the two ends of an arc probe sit on invariant lines and are not classified
    std::vector<Seed> inner(seeds.begin() + (o.full_circle ? 0 : 1), seeds.end() - (o.full_circle ? 0 : 1));
    bool unresolved = false;
    for (auto& s : inner) unresolved |= s.cls() == UNRES;
    res.radius_used = r;
    if (unresolved) {
      res.diagnostic = "unresolved seeds at radius " + std::to_string(r);
      have_prev = false;
      continue;
    }
    auto runs = runs_of(inner, o.full_circle);
    std::vector<double> theta;
    for (auto& sd : inner) theta.push_back(sd.theta);
    res.sectors = compress(runs, o.full_circle, theta);
    auto types = types_of(res.sectors);
    if (have_prev && (o.full_circle ? cyclic_equal(prev, types) : prev == types)) {
      res.stable = true;
      res.diagnostic.clear();
      break;
    }
    prev = types;
    have_prev = true;
  }
  if (!res.stable) {
    if (res.diagnostic.empty()) res.diagnostic = "sector structure did not stabilise across radii";
    return res;
  }
  // boundary refinement at the radius used
  const double r = res.radius_used;
  const int n = static_cast<int>(seeds.size());
  const int lo = o.full_circle ? 0 : 1, hi = o.full_circle ? n : n - 2;
  for (int i = lo; i < hi; ++i) {
    int j = (i + 1) % n;
    if (!o.full_circle && j >= n - 1) break;
    const Seed &a = seeds[i], &b = seeds[j];
    Cls ca = a.cls(), cb = b.cls();
    if (ca != H && cb != H) continue;
    bool df = aspect_differs(a.fwd, b.fwd), db = aspect_differs(a.bwd, b.bwd);
    if (!df && !db) continue;
    double ta = a.theta, tb = b.theta + (j == 0 ? 2 * kPi : 0);
    Seed sa = a, sb = b;
    for (int it = 0; it < 44; ++it) {
      double tm = 0.5 * (ta + tb);
      Seed m = probe_seed(f, point, r, tm, o);
      bool left = (!df || same_side(m.fwd, sa.fwd, sb.fwd)) && (!db || same_side(m.bwd, sa.bwd, sb.bwd));
      bool right = (!df || same_side(m.fwd, sb.fwd, sa.fwd)) && (!db || same_side(m.bwd, sb.bwd, sa.bwd));
      if (left && !right)
        ta = tm, sa = m;
      else if (right && !left)
        tb = tm, sb = m;
      else {
        // a third behaviour in between: keep the half that still separates a from the middle
        tb = tm, sb = m;
      }
    }
    double th = 0.5 * (ta + tb);
    bool dup = false;
    for (auto& bd : res.boundaries)
      if (angle_gap(bd.theta, th) < 1e-6) {
        bd.trace_forward |= db;
        bd.trace_backward |= df;
        dup = true;
      }
    if (!dup) res.boundaries.push_back({th, db, df});
  }
  return res;
}

}  // namespace brlab
