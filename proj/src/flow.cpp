#include <algorithm>
#include <cmath>
#include <limits>

#include "brlab/flow.hpp"

namespace brlab {

namespace {

std::string finite_label(PointKind k) {
  switch (k) {
    case PointKind::unstable_node:
    case PointKind::unstable_focus: return "source";
    case PointKind::stable_node:
    case PointKind::stable_focus: return "sink";
    case PointKind::saddle: return "saddle";
    case PointKind::saddle_node: return "saddle-node";
    case PointKind::center: return "center";
    default: return "line";
  }
}

std::string infinite_label(InfinityKind k) {
  switch (k) {
    case InfinityKind::nilpotent_elliptic_hyperbolic: return "inf-nilpotent";
    case InfinityKind::saddle: return "inf-saddle";
    case InfinityKind::stable_node: return "inf-sink";
    case InfinityKind::unstable_node: return "inf-source";
    case InfinityKind::saddle_node: return "inf-saddle-node";
  }
  return "inf-?";
}

}  // namespace

double sphere_dist(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

FlowContext make_context(const Params& p) {
  FlowContext ctx{p, [p](ChartId c, double z1, double z2) { return chart_field(p, c, z1, z2); }, {}, false};
  auto fin = classify_finite(p);
  bool q1 = false;
  for (auto& s : fin) {
    if (s.kind == PointKind::merged) continue;
    if (s.kind == PointKind::non_isolated) {
      q1 = true;
      continue;
    }
    std::string lab = finite_label(s.kind);
    FlowNode n{s.id, plane_to_sphere(s.location), lab, false, lab == "saddle" || lab == "saddle-node"};
    if (s.kind == PointKind::saddle) {
      double l1 = s.eigenvalues.first.real(), l2 = s.eigenvalues.second.real();
      double lu = std::max(l1, l2), ls = -std::min(l1, l2);
      n.capture_exp_fwd = 1 / (1 + lu / ls);
      n.capture_exp_bwd = 1 / (1 + ls / lu);
    }
    ctx.nodes.push_back(n);
  }
  if (q1) {
    ctx.singular_line = true;
    // tangency point of the line of equilibria with the orbit family
    ctx.nodes.push_back({"P2", plane_to_sphere({0, 1}), "line-point", false, false});
  }
  for (auto& ip : infinite_singular_points(p)) {
    std::string lab = infinite_label(ip.kind);
    FlowNode n{ip.id, disc_to_sphere(ip.position), lab, true,
               lab == "inf-nilpotent" || lab == "inf-saddle" || lab == "inf-saddle-node"};
    if (ip.kind == InfinityKind::saddle) {
      double lu = std::max(ip.eigenvalues[0], ip.eigenvalues[1]), ls = -std::min(ip.eigenvalues[0], ip.eigenvalues[1]);
      n.capture_exp_fwd = 1 / (1 + lu / ls);
      n.capture_exp_bwd = 1 / (1 + ls / lu);
    }
    ctx.nodes.push_back(n);
  }
  for (auto& n : ctx.nodes) {
    if (n.capture_exp_fwd == 0) continue;
    double m = 2;
    for (auto& o : ctx.nodes)
      if (&o != &n) m = std::min(m, sphere_dist(n.pos, o.pos));
    n.capture_max = 0.05 * m;
  }
  return ctx;
}

std::string to_string(const Termination& t) {
  switch (t.kind) {
    case Termination::singular_point: return "singular point " + t.node;
    case Termination::infinity_point: return "infinite point " + t.node;
    case Termination::singular_line: return "line of singular points";
    case Termination::t_max: return "t_max";
    case Termination::step_underflow: return "step underflow";
    case Termination::max_steps: return "step limit";
  }
  return "?";
}

std::vector<std::pair<double, DiscPoint>> Orbit::samples() const {
  std::vector<std::pair<double, DiscPoint>> out;
  out.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) out.push_back({t[i], sphere_to_disc(pts[i])});
  return out;
}

Orbit integrate(const FlowContext& ctx, const Vec3& start, Direction dir, const FlowOptions& opt, int ignore_node) {
  Orbit orb;
  Vec3 s = start;
  {
    double n = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    for (auto& v : s) v /= n;
  }
  ChartId chart = best_chart(s);
  ChartPoint cp = sphere_to_chart(s, chart);
  Vec2 z{cp.z1, cp.z2};
  const double sign = dir == Direction::forward ? 1 : -1;
  Field2 f = [&](const Vec2& w) {
    Vec2 v = ctx.field(chart, w[0], w[1]);
    double k = sign;
    if (opt.arc_length) {
      double n = std::hypot(v[0], v[1]);
      if (n > 0) k /= n;
    } else {
      double r2 = 1 + w[0] * w[0] + w[1] * w[1];
      k *= ctx.degree == 2 ? 1 / std::sqrt(r2) : std::pow(r2, -0.5 * (ctx.degree - 1));
    }
    return Vec2{k * v[0], k * v[1]};
  };
  const int nn = static_cast<int>(ctx.nodes.size());
  std::vector<char> armed(nn, 1);
  std::vector<double> capture(nn, opt.snap_radius);
  for (int i = 0; i < nn; ++i) {
    const FlowNode& n = ctx.nodes[i];
    double e = dir == Direction::forward ? n.capture_exp_fwd : n.capture_exp_bwd;
    if (e > 0) capture[i] = std::max(opt.snap_radius, std::min(n.capture_max, opt.capture_factor * std::pow(opt.tol, e)));
  }
  if (ignore_node >= 0 && ignore_node < nn) armed[ignore_node] = 0;

  orb.t.push_back(0);
  orb.pts.push_back(s);
  orb.chart_history.push_back({0, chart});

  auto check_nodes = [&](const Vec3& q, double& dmin) -> bool {
    dmin = 1e300;
    for (int i = 0; i < nn; ++i) {
      double d = sphere_dist(q, ctx.nodes[i].pos);
      dmin = std::min(dmin, d);
      if (!armed[i]) {
        if (d > std::max(opt.arm_radius, 2 * capture[i])) armed[i] = 1;
        continue;
      }
      if (d < opt.terminate_radius || (opt.use_snap && ctx.nodes[i].snap && d < capture[i])) {
        orb.termination.kind = ctx.nodes[i].infinite ? Termination::infinity_point : Termination::singular_point;
        orb.termination.node = ctx.nodes[i].id;
        return true;
      }
    }
    return false;
  };
  double dmin;
  if (check_nodes(s, dmin)) return orb;

  double t = 0, h = 1e-4;
  Vec2 k1 = f(z), zn, err, k7;
  long steps = 0;
  for (;;) {
    if (++steps > opt.max_steps) {
      orb.termination.kind = Termination::max_steps;
      break;
    }
    if (h < 1e-14) {
      orb.termination.kind = Termination::step_underflow;
      break;
    }
    // the last step lands on t_max exactly
    const bool last = h >= opt.t_max - t;
    if (last) h = opt.t_max - t;
    dp45_step(f, z, h, k1, zn, err, k7);
    double e = dp45_error_norm(z, zn, err, opt.tol);
    if (!(e <= 1)) {
      h *= std::isfinite(e) ? dp45_factor(e) : 0.1;
      continue;
    }
    Vec3 sn = chart_to_sphere({chart, zn[0], zn[1]});
    if (sn[2] < 0) {
      // clipped back to the equator; only happens from round-off at z2 = 0
      sn[2] = 0;
      double n = std::hypot(sn[0], sn[1]);
      sn[0] /= n;
      sn[1] /= n;
    }
    double disp = sphere_dist(s, sn);
    double lim = std::min(opt.max_disc_step, opt.near_node_factor * dmin);
    if (disp > lim && disp > 0) {
      h *= std::max(0.1, 0.9 * lim / disp);
      continue;
    }
    t = last ? opt.t_max : t + h;
    z = zn;
    s = sn;
    k1 = k7;
    orb.t.push_back(t);
    orb.pts.push_back(s);
    if (check_nodes(s, dmin)) break;
    if (ctx.singular_line && s[2] > 0 && std::fabs(s[0]) < 1e-9 * s[2] && steps > 1) {
      orb.termination.kind = Termination::singular_line;
      break;
    }
    if (t >= opt.t_max) {
      orb.termination.kind = Termination::t_max;
      break;
    }
    h *= dp45_factor(e);
    if (std::max(std::fabs(z[0]), std::fabs(z[1])) > 2) {
      ChartId nc = best_chart(s);
      if (nc != chart) {
        ChartPoint ncp = sphere_to_chart(s, nc);
        Vec3 back = chart_to_sphere(ncp);
        orb.max_switch_jump = std::max(orb.max_switch_jump, std::hypot(back[0] - s[0], back[1] - s[1]));
        chart = nc;
        z = {ncp.z1, ncp.z2};
        k1 = f(z);
        orb.chart_history.push_back({t, chart});
      }
    }
  }
  return orb;
}

Orbit integrate(const Params& p, DiscPoint start, Direction dir, double t_max, double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-3)) throw std::invalid_argument("integrate: tol must lie in [1e-12, 1e-3]");
  FlowContext ctx = make_context(p);
  FlowOptions opt;
  opt.tol = tol;
  opt.t_max = t_max;
  return integrate(ctx, disc_to_sphere(start), dir, opt);
}

RoundTrip round_trip(const Params& p, DiscPoint start, double t, double tol) {
  RoundTrip rt;
  Orbit f = integrate(p, start, Direction::forward, t, tol);
  if (f.termination.kind != Termination::t_max) return rt;
  const DiscPoint e = sphere_to_disc(f.pts.back());
  Orbit g = integrate(p, e, Direction::backward, t, tol);
  if (g.termination.kind != Termination::t_max) return rt;
  const DiscPoint b = sphere_to_disc(g.pts.back());
  rt.error = std::hypot(b.u - start.u, b.v - start.v);
  const double d = 1e-6;
  for (int k = 0; k < 2; ++k) {
    DiscPoint e2 = e;
    double& c = k ? e2.v : e2.u;
    c += std::hypot(e.u + (k ? 0 : d), e.v + (k ? d : 0)) < 1 ? d : -d;
    Orbit h = integrate(p, e2, Direction::backward, t, tol);
    if (h.termination.kind != Termination::t_max) {
      rt.kappa = std::numeric_limits<double>::infinity();
      continue;
    }
    const DiscPoint q = sphere_to_disc(h.pts.back());
    rt.kappa = std::max(rt.kappa, std::hypot(q.u - b.u, q.v - b.v) / d);
  }
  rt.completed = true;
  return rt;
}

std::optional<double> plane_return(const Params& p, PlanePoint start, double tol, double t_max) {
  Field2 f = [&](const Vec2& z) { return eval_field(p, {z[0], z[1]}); };
  const double y0 = start.y;
  Vec2 z{start.x, start.y}, k1 = f(z), zn, err, k7;
  const double up = k1[1] >= 0 ? 1 : -1;
  double t = 0, h = 1e-3;
  bool left = false;  // has been on the other side of the section
  while (t < t_max) {
    dp45_step(f, z, h, k1, zn, err, k7);
    double e = dp45_error_norm(z, zn, err, tol);
    if (e > 1) {
      h *= dp45_factor(e);
      if (h < 1e-14) return std::nullopt;
      continue;
    }
    double before = up * (z[1] - y0), after = up * (zn[1] - y0);
    if (before < 0) left = true;
    if (left && before < 0 && after >= 0) {
      // locate the crossing by re-stepping a fraction of h
      double lo = 0, hi = h;
      Vec2 zz = zn;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * h; ++it) {
        double mid = 0.5 * (lo + hi);
        Vec2 e2, k;
        dp45_step(f, z, mid, k1, zz, e2, k);
        if (up * (zz[1] - y0) < 0)
          lo = mid;
        else
          hi = mid;
      }
      Vec2 e2, k;
      dp45_step(f, z, hi, k1, zz, e2, k);
      return zz[0];
    }
    t += h;
    z = zn;
    k1 = k7;
    h = std::min(h * dp45_factor(e), 0.05);
  }
  return std::nullopt;
}

}  // namespace brlab
