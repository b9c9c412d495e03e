#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "brlab/flow.hpp"

namespace brlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 unit3(Vec3 v) {
  double n = std::sqrt(dot(v, v));
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Tangent frame at n with e1 x e2 = n (counterclockwise as seen in the disc).
struct Frame {
  Vec3 n, e1, e2;
  explicit Frame(const Vec3& p) : n(p) {
    Vec3 a = std::fabs(p[2]) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    e1 = unit3(cross(a, n));
    e2 = cross(n, e1);
  }
  // gnomonic coordinates
  Vec2 project(const Vec3& s) const {
    double d = dot(s, n);
    if (d <= 1e-12) return {1e300, 0};
    Vec3 w{s[0] / d - n[0], s[1] / d - n[1], s[2] / d - n[2]};
    return {dot(w, e1), dot(w, e2)};
  }
};

struct Trace {
  int node;
  Vec3 seed;
  Direction dir;
  double seed_dist;
};

std::vector<Vec3> arc_poly(const Vec3& a, const Vec3& b) {
  double fa = std::atan2(a[1], a[0]), fb = std::atan2(b[1], b[0]);
  double d = fb - fa;
  while (d <= -kPi) d += 2 * kPi;
  while (d > kPi) d -= 2 * kPi;
  std::vector<Vec3> out;
  const int n = 200;
  for (int i = 0; i <= n; ++i) {
    double f = fa + d * i / n;
    out.push_back({std::cos(f), std::sin(f), 0});
  }
  out.front() = a;
  out.back() = b;
  return out;
}

double point_seg_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]}, ap{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
  double l = dot(ab, ab);
  double t = l > 0 ? std::clamp(dot(ap, ab) / l, 0.0, 1.0) : 0;
  Vec3 q{a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]};
  return sphere_dist(p, q);
}

double poly_dist(const Vec3& p, const std::vector<Vec3>& poly) {
  double m = 1e300;
  for (size_t i = 0; i + 1 < poly.size(); ++i) m = std::min(m, point_seg_dist(p, poly[i], poly[i + 1]));
  return m;
}

std::vector<Vec3> resample(const std::vector<Vec3>& poly, int k) {
  std::vector<double> acc{0};
  for (size_t i = 1; i < poly.size(); ++i) acc.push_back(acc.back() + sphere_dist(poly[i - 1], poly[i]));
  std::vector<Vec3> out;
  for (int j = 1; j <= k; ++j) {
    double target = acc.back() * j / (k + 1);
    size_t i = std::lower_bound(acc.begin(), acc.end(), target) - acc.begin();
    out.push_back(poly[std::min(i, poly.size() - 1)]);
  }
  return out;
}

bool same_edge(const SkeletonEdge& a, const SkeletonEdge& b) {
  if (a.from != b.from || a.to != b.to) return false;
  for (auto& p : resample(a.poly, 9))
    if (poly_dist(p, b.poly) > 1e-3) return false;
  for (auto& p : resample(b.poly, 9))
    if (poly_dist(p, a.poly) > 1e-3) return false;
  return true;
}

// Thin out a polyline for the winding tests.
std::vector<DiscPoint> thin(const std::vector<Vec3>& poly, double spacing) {
  std::vector<DiscPoint> out;
  for (size_t i = 0; i < poly.size(); ++i) {
    DiscPoint d = sphere_to_disc(poly[i]);
    if (i == 0 || i + 1 == poly.size() || std::hypot(d.u - out.back().u, d.v - out.back().v) >= spacing)
      out.push_back(d);
  }
  return out;
}

int winding(const std::vector<DiscPoint>& poly, DiscPoint p) {
  int wn = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const DiscPoint &a = poly[i], &b = poly[(i + 1) % n];
    double left = (b.u - a.u) * (p.v - a.v) - (p.u - a.u) * (b.v - a.v);
    if (a.v <= p.v) {
      if (b.v > p.v && left > 0) ++wn;
    } else if (b.v <= p.v && left < 0) {
      --wn;
    }
  }
  return wn;
}

struct Builder {
  Skeleton& sk;
  const FlowContext& ctx;
  const SkeletonOptions& opt;

  int node_index(const std::string& id) const {
    for (size_t i = 0; i < sk.nodes.size(); ++i)
      if (sk.nodes[i].id == id) return static_cast<int>(i);
    return -1;
  }

  double nearest_other(int i) const {
    double m = 1e300;
    for (size_t j = 0; j < sk.nodes.size(); ++j)
      if (static_cast<int>(j) != i) m = std::min(m, sphere_dist(sk.nodes[i].pos, sk.nodes[j].pos));
    return m;
  }

  void add_arcs() {
    // flow on the circle runs V2 -> U1 -> U2 and V2 -> V1 -> U2
    const std::pair<const char*, const char*> arcs[] = {{"V2", "U1"}, {"U1", "U2"}, {"V2", "V1"}, {"V1", "U2"}};
    for (auto& [a, b] : arcs) {
      int ia = node_index(a), ib = node_index(b);
      SkeletonEdge e{ia, ib, arc_poly(sk.nodes[ia].pos, sk.nodes[ib].pos), true, false};
      sk.edges.push_back(std::move(e));
    }
  }

  void add_edge(SkeletonEdge e) {
    // duplicates, including traces that hug a boundary arc
    for (auto& o : sk.edges)
      if (same_edge(o, e)) return;
    sk.edges.push_back(std::move(e));
  }

  void run_trace(const Trace& tr) {
    FlowOptions fo = opt.flow;
    fo.use_snap = true;
    fo.arc_length = true;
    fo.arm_radius = std::max(fo.arm_radius, 3 * tr.seed_dist);
    Orbit orb = integrate(ctx, tr.seed, tr.dir, fo, tr.node);
    int end = -1;
    if (orb.termination.kind == Termination::singular_point || orb.termination.kind == Termination::infinity_point)
      end = node_index(orb.termination.node);
    if (end < 0) {
      DiscPoint d = sphere_to_disc(tr.seed);
      char where[96];
      std::snprintf(where, sizeof where, " (%s, seed u=%.6g v=%.6g)", tr.dir == Direction::forward ? "forward" : "backward",
                    d.u, d.v);
      sk.diagnostics.push_back("separatrix from " + sk.nodes[tr.node].id + " ended by " + to_string(orb.termination) +
                               where);
      return;
    }
    if (end == tr.node) {
      double far = 0;
      for (auto& q : orb.pts) far = std::max(far, sphere_dist(q, sk.nodes[end].pos));
      if (far < 0.05 * nearest_other(end) + 1e-3 && far < 20 * tr.seed_dist + 1e-3) return;  // local return
    }
    SkeletonEdge e;
    e.poly.push_back(sk.nodes[tr.node].pos);
    e.poly.insert(e.poly.end(), orb.pts.begin(), orb.pts.end());
    e.poly.push_back(sk.nodes[end].pos);
    e.from = tr.node;
    e.to = end;
    if (tr.dir == Direction::backward) {
      std::reverse(e.poly.begin(), e.poly.end());
      std::swap(e.from, e.to);
    }
    add_edge(std::move(e));
  }

  std::vector<Trace> saddle_seeds(int i, const SingularPointInfo& info) {
    std::vector<Trace> out;
    for (auto& sd : info.separatrix_directions)
      for (double sg : {1.0, -1.0}) {
        PlanePoint q{info.location.x + sg * 1e-7 * sd.dir[0], info.location.y + sg * 1e-7 * sd.dir[1]};
        if (sd.dir[0] == 0) q.x = info.location.x;  // keep x = 0 exactly
        out.push_back({i, plane_to_sphere(q), sd.eigenvalue > 0 ? Direction::forward : Direction::backward, 1e-7});
      }
    return out;
  }

  std::vector<Trace> probe_seeds(int i, ChartId chart, Vec2 c, ProbeOptions po, const std::string& what) {
    LocalField lf = [this, chart](double z1, double z2) { return ctx.field(chart, z1, z2); };
    ProbeResult pr = sector_probe(lf, c, po);
    std::vector<Trace> out;
    if (!pr.stable) {
      sk.diagnostics.push_back("sector probe at " + sk.nodes[i].id + " (" + what + "): " + pr.diagnostic);
      return out;
    }
    for (auto& bd : pr.boundaries) {
      Vec2 z = quasi_point(c, pr.radius_used, bd.theta, po.w1, po.w2);
      Vec3 s = chart_to_sphere({chart, z[0], z[1]});
      double d = sphere_dist(s, sk.nodes[i].pos);
      if (bd.trace_forward) out.push_back({i, s, Direction::forward, d});
      if (bd.trace_backward) out.push_back({i, s, Direction::backward, d});
    }
    return out;
  }

  // Saddle-node with a zero and a nonzero eigenvalue: the two strong branches plus the
  // centre branch on the hyperbolic side. Seeds outside the disc are dropped.
  std::vector<Trace> saddle_node_seeds(int i, ChartId chart, Vec2 c, const Mat2& J) {
    std::vector<Trace> out;
    const double tr = J[0][0] + J[1][1];
    const double ls = tr;  // the other eigenvalue is 0
    auto eigvec = [&](double mu) {
      Vec2 a{J[0][1], mu - J[0][0]}, b{mu - J[1][1], J[1][0]};
      Vec2 v = std::hypot(a[0], a[1]) > std::hypot(b[0], b[1]) ? a : b;
      double n = std::hypot(v[0], v[1]);
      return Vec2{v[0] / n, v[1] / n};
    };
    Vec2 vs = eigvec(ls), vc = eigvec(0);
    Vec2 w1{J[1][0], -J[0][0]}, w2{J[1][1], -J[0][1]};
    Vec2 w = std::hypot(w1[0], w1[1]) > std::hypot(w2[0], w2[1]) ? w1 : w2;
    if (w[0] * vc[0] + w[1] * vc[1] < 0) w = {-w[0], -w[1]};
    const double delta = 1e-4;
    auto g = [&](double s) {
      Vec2 f = ctx.field(chart, c[0] + s * delta * vc[0], c[1] + s * delta * vc[1]);
      return w[0] * f[0] + w[1] * f[1];
    };
    double gp = g(1), gm = g(-1);
    if ((gp > 0) != (gm > 0)) {
      sk.diagnostics.push_back("centre manifold at " + sk.nodes[i].id + " is not quadratic");
      return out;
    }
    const double away = gp > 0 ? 1 : -1;  // side on which the centre flow leaves the point
    auto push = [&](Vec2 z, Direction d) {
      Vec3 sp = chart_to_sphere({chart, z[0], z[1]});
      if (sp[2] <= 1e-15) return;  // on the circle of infinity or outside the disc
      out.push_back({i, sp, d, sphere_dist(sp, sk.nodes[i].pos)});
    };
    const Direction strong = ls > 0 ? Direction::forward : Direction::backward;
    for (double sg : {1.0, -1.0}) push({c[0] + sg * 1e-7 * vs[0], c[1] + sg * 1e-7 * vs[1]}, strong);
    const double side = ls < 0 ? away : -away;
    push({c[0] + side * 1e-5 * vc[0], c[1] + side * 1e-5 * vc[1]}, ls < 0 ? Direction::forward : Direction::backward);
    return out;
  }

  // Nilpotent points at the ends of the x axis. In the U1 chart the principal part is
  // z1' = z2 + (b+1) z1^2, z2' = z1 z2 with invariant parabola z2 = k z1^2, k = -b - 1/2.
  // For k > 0 its branches lie in the disc and bound the hyperbolic sector (separatrices);
  // for k < 0 they lie in the other hemisphere and the disc side of U1 is one hyperbolic
  // sector bounded by the circle. The V1 side then carries elliptic and parabolic sectors only.
  std::vector<Trace> nilpotent_seeds(int i, ChartId chart) {
    std::vector<Trace> out;
    if (chart != ChartId::U1) return out;
    const double k = -sk.params.b() - 0.5;
    if (k <= 0) return out;
    const double e = 1e-3;
    // refine the seed onto the invariant curve through the next order term
    for (double sg : {1.0, -1.0}) {
      double z1 = sg * e, z2 = k * e * e;
      Vec3 sp = chart_to_sphere({chart, z1, z2});
      out.push_back({i, sp, sg > 0 ? Direction::forward : Direction::backward, sphere_dist(sp, sk.nodes[i].pos)});
    }
    return out;
  }

  void collect() {
    auto fin = classify_finite(sk.params);
    std::vector<Trace> traces;
    for (size_t i = 0; i < sk.nodes.size(); ++i) {
      const FlowNode& nd = sk.nodes[i];
      const int ii = static_cast<int>(i);
      if (!nd.infinite) {
        const SingularPointInfo* info = nullptr;
        for (auto& s : fin)
          if (s.id == nd.id) info = &s;
        if (!info) continue;
        if (nd.label == "saddle") {
          auto t = saddle_seeds(ii, *info);
          traces.insert(traces.end(), t.begin(), t.end());
        } else if (nd.label == "saddle-node") {
          auto t = saddle_node_seeds(ii, ChartId::U3, {info->location.x, info->location.y},
                                     jacobian(sk.params, info->location));
          traces.insert(traces.end(), t.begin(), t.end());
        }
        continue;
      }
      ChartId chart = nd.id == "U1" ? ChartId::U1 : nd.id == "U2" ? ChartId::U2 : nd.id == "V1" ? ChartId::V1 : ChartId::V2;
      const bool v = chart == ChartId::V1 || chart == ChartId::V2;
      if (nd.label == "inf-saddle") {
        // interior eigen-direction is the z2 axis; its eigenvalue is -b in U2 and b in V2
        double lam = chart == ChartId::U2 ? -sk.params.b() : sk.params.b();
        Vec3 s = chart_to_sphere({chart, 0, v ? -1e-7 : 1e-7});
        traces.push_back({ii, s, lam > 0 ? Direction::forward : Direction::backward, 1e-7});
      } else if (nd.label == "inf-saddle-node") {
        auto t = saddle_node_seeds(ii, chart, {0, 0}, chart_jacobian(sk.params, chart, 0, 0));
        traces.insert(traces.end(), t.begin(), t.end());
      } else if (nd.label == "inf-nilpotent") {
        auto t = nilpotent_seeds(ii, chart);
        traces.insert(traces.end(), t.begin(), t.end());
      }
    }
    for (auto& tr : traces) run_trace(tr);
  }

  // ---- combinatorics ----

  void rotation_system() {
    const int nn = static_cast<int>(sk.nodes.size());
    sk.rotation.assign(nn, {});
    std::vector<std::vector<int>> darts(nn);
    for (size_t e = 0; e < sk.edges.size(); ++e) {
      darts[sk.edges[e].from].push_back(static_cast<int>(2 * e));
      darts[sk.edges[e].to].push_back(static_cast<int>(2 * e + 1));
    }
    for (int v = 0; v < nn; ++v) {
      if (darts[v].empty()) continue;
      Frame fr(sk.nodes[v].pos);
      double rho = std::min(0.3, 0.45 * nearest_other(v));
      std::vector<std::pair<double, int>> ang;
      for (int attempt = 0; attempt < 40; ++attempt, rho *= 0.5) {
        ang.clear();
        bool ok = true;
        for (int d : darts[v]) {
          const auto& poly = sk.edges[d / 2].poly;
          const int n = static_cast<int>(poly.size());
          bool found = false;
          Vec2 prev = {0, 0};
          for (int k = 0; k < n; ++k) {
            const Vec3& q = poly[d % 2 == 0 ? k : n - 1 - k];
            Vec2 g = fr.project(q);
            double r = std::hypot(g[0], g[1]);
            if (r > rho) {
              double rp = std::hypot(prev[0], prev[1]);
              double t = (r > 1e299 || r == rp) ? 0 : (rho - rp) / (r - rp);
              Vec2 x = r > 1e299 ? prev : Vec2{prev[0] + t * (g[0] - prev[0]), prev[1] + t * (g[1] - prev[1])};
              ang.push_back({std::atan2(x[1], x[0]), d});
              found = true;
              break;
            }
            prev = g;
          }
          if (!found) {
            ok = false;
            break;
          }
        }
        if (ok) break;
      }
      if (ang.size() != darts[v].size()) {
        sk.diagnostics.push_back("cannot order edges at " + sk.nodes[v].id);
        continue;
      }
      for (auto& a : ang)
        if (a.first < 0) a.first += 2 * kPi;
      std::sort(ang.begin(), ang.end());
      for (size_t k = 0; k + 1 < ang.size(); ++k)
        if (ang[k + 1].first - ang[k].first < 1e-12)
          sk.diagnostics.push_back("ambiguous edge order at " + sk.nodes[v].id);
      for (auto& a : ang) sk.rotation[v].push_back(a.second);
    }
  }

  int dart_node(int d) const { return d % 2 == 0 ? sk.edges[d / 2].from : sk.edges[d / 2].to; }

  int sigma(int d) const {
    const auto& r = sk.rotation[dart_node(d)];
    auto it = std::find(r.begin(), r.end(), d);
    ++it;
    return it == r.end() ? r.front() : *it;
  }

  std::vector<DiscPoint> face_polygon(const std::vector<int>& walk) const {
    std::vector<DiscPoint> poly;
    for (int d : walk) {
      auto pts = thin(sk.edges[d / 2].poly, 1e-3);
      if (d % 2 == 1) std::reverse(pts.begin(), pts.end());
      poly.insert(poly.end(), pts.begin(), pts.end());
    }
    return poly;
  }

  void faces_and_counts() {
    const int nn = static_cast<int>(sk.nodes.size());
    const int nd = static_cast<int>(2 * sk.edges.size());
    // components
    std::vector<int> comp(nn);
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int(int)> find = [&](int a) { return comp[a] == a ? a : comp[a] = find(comp[a]); };
    for (auto& e : sk.edges) comp[find(e.from)] = find(e.to);
    std::map<int, int> cid;
    for (int v = 0; v < nn; ++v) cid.emplace(find(v), static_cast<int>(cid.size()));
    sk.components = static_cast<int>(cid.size());
    sk.regions_euler = static_cast<int>(sk.edges.size()) - nn + sk.components;

    std::vector<int> face_of(nd, -1);
    sk.faces.clear();
    for (int d = 0; d < nd; ++d) {
      if (face_of[d] >= 0) continue;
      FaceInfo f;
      int x = d;
      do {
        face_of[x] = static_cast<int>(sk.faces.size());
        f.darts.push_back(x);
        x = sigma(x ^ 1);
      } while (x != d && f.darts.size() <= static_cast<size_t>(nd));
      sk.faces.push_back(f);
    }
    // planarity per component
    std::map<int, std::array<int, 3>> vef;  // V, E, F
    for (int v = 0; v < nn; ++v) vef[cid[find(v)]][0]++;
    for (auto& e : sk.edges) vef[cid[find(e.from)]][1]++;
    for (auto& f : sk.faces) vef[cid[find(dart_node(f.darts[0]))]][2]++;
    int walk_total = 0;
    for (auto& [c, a] : vef) {
      int F = a[1] == 0 ? 1 : a[2];
      walk_total += F;
      if (a[0] - a[1] + F != 2)
        sk.diagnostics.push_back("edge order not planar in component " + std::to_string(c) + " (V-E+F=" +
                                 std::to_string(a[0] - a[1] + F) + ")");
    }
    if (walk_total - sk.components != sk.regions_euler)
      sk.diagnostics.push_back("face walk count disagrees with Euler formula");

    // the outer face lies to the right of the arc V2 -> U1 traversed from V2
    int outer = face_of[0];
    sk.faces[outer].outer = true;
    main_comp_ = cid[find(sk.edges[0].from)];
    for (size_t e = 0; e < sk.edges.size(); ++e) comp_of_edge_.push_back(cid[find(sk.edges[e].from)]);
    for (int v = 0; v < nn; ++v) comp_of_node_.push_back(cid[find(v)]);
  }

  int main_comp_ = 0;
  std::vector<int> comp_of_edge_{}, comp_of_node_{};

  // faces of the main component containing p (winding -1 for our clockwise walks)
  std::vector<int> containing_faces(const std::vector<std::vector<DiscPoint>>& polys, DiscPoint p) const {
    std::vector<int> hit;
    for (size_t f = 0; f < sk.faces.size(); ++f)
      if (!polys[f].empty() && winding(polys[f], p) == -1) hit.push_back(static_cast<int>(f));
    return hit;
  }

  std::vector<std::vector<DiscPoint>> polys_{};

  // disc distance from q to the nearest edge polyline
  double clearance(DiscPoint q) const {
    double best = 1e9;
    for (auto& e : sk.edges)
      for (size_t k = 0; k + 1 < e.poly.size(); ++k) {
        DiscPoint a = sphere_to_disc(e.poly[k]), b = sphere_to_disc(e.poly[k + 1]);
        double dx = b.u - a.u, dy = b.v - a.v, l2 = dx * dx + dy * dy;
        double t = l2 > 0 ? std::clamp(((q.u - a.u) * dx + (q.v - a.v) * dy) / l2, 0.0, 1.0) : 0.0;
        best = std::min(best, std::hypot(a.u + t * dx - q.u, a.v + t * dy - q.v));
      }
    return best;
  }

  void region_fill() {
    const int N = opt.raster;
    std::vector<std::vector<DiscPoint>>& polys = polys_;
    polys.assign(sk.faces.size(), {});
    for (size_t f = 0; f < sk.faces.size(); ++f)
      if (!sk.faces[f].outer && comp_of_edge_[sk.faces[f].darts[0] / 2] == main_comp_)
        polys[f] = face_polygon(sk.faces[f].darts);

    std::vector<char> blocked(N * N, 0);
    auto pix = [&](double u) { return static_cast<int>(std::floor((u + 1) * 0.5 * N)); };
    auto center = [&](int i) { return -1 + (i + 0.5) * 2.0 / N; };
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        double u = center(i), v = center(j);
        if (u * u + v * v >= 1 - 2.0 / N) blocked[j * N + i] = 1;
      }
    for (auto& e : sk.edges) {
      for (size_t k = 0; k + 1 < e.poly.size(); ++k) {
        DiscPoint a = sphere_to_disc(e.poly[k]), b = sphere_to_disc(e.poly[k + 1]);
        double len = std::hypot(b.u - a.u, b.v - a.v) * N;
        int steps = std::max(1, static_cast<int>(std::ceil(len * 4)));
        for (int s = 0; s <= steps; ++s) {
          double t = static_cast<double>(s) / steps;
          int i = pix(a.u + t * (b.u - a.u)), j = pix(a.v + t * (b.v - a.v));
          if (i >= 0 && i < N && j >= 0 && j < N) blocked[j * N + i] = 1;
        }
      }
    }
    // distance to blocked pixels (4-neighbour BFS)
    std::vector<int> dist(N * N, -1);
    std::deque<int> q;
    for (int k = 0; k < N * N; ++k)
      if (blocked[k]) dist[k] = 0, q.push_back(k);
    auto nbrs = [&](int k, auto&& fn) {
      int i = k % N, j = k / N;
      if (i > 0) fn(k - 1);
      if (i + 1 < N) fn(k + 1);
      if (j > 0) fn(k - N);
      if (j + 1 < N) fn(k + N);
    };
    while (!q.empty()) {
      int k = q.front();
      q.pop_front();
      nbrs(k, [&](int m) {
        if (dist[m] < 0) dist[m] = dist[k] + 1, q.push_back(m);
      });
    }
    std::vector<int> label(N * N, -1);
    std::vector<int> best;
    int ncomp = 0;
    for (int k = 0; k < N * N; ++k) {
      if (blocked[k] || label[k] >= 0) continue;
      int b = k;
      label[k] = ncomp;
      q.push_back(k);
      while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        if (dist[x] > dist[b]) b = x;
        nbrs(x, [&](int m) {
          if (!blocked[m] && label[m] < 0) label[m] = ncomp, q.push_back(m);
        });
      }
      best.push_back(b);
      ++ncomp;
    }
    std::vector<char> filled(sk.faces.size(), 0);
    for (int cpt = 0; cpt < ncomp; ++cpt) {
      DiscPoint p{center(best[cpt] % N), center(best[cpt] / N)};
      auto hit = containing_faces(polys, p);
      if (hit.size() == 1) {
        if (!filled[hit[0]]) sk.faces[hit[0]].rep_point = disc_to_sphere(p);
        filled[hit[0]] = 1;
      } else if (dist[best[cpt]] >= 3) {
        sk.diagnostics.push_back("raster region not inside exactly one face");
      }
    }
    // faces too thin for the raster: offset a point from the face boundary
    for (size_t f = 0; f < sk.faces.size(); ++f) {
      if (polys[f].empty() || filled[f]) continue;
      const auto& poly = polys[f];
      // the candidate farthest from every edge
      double best = -1;
      for (double delta : {1e-3, 3e-4, 1e-4, 3e-5}) {
        for (size_t k = 0; k + 1 < poly.size(); k += std::max<size_t>(1, poly.size() / 200)) {
          const DiscPoint &a = poly[k], &b = poly[k + 1];
          double l = std::hypot(b.u - a.u, b.v - a.v);
          if (l == 0) continue;
          // interior of a clockwise walk is on the right
          DiscPoint p{0.5 * (a.u + b.u) + delta * (b.v - a.v) / l, 0.5 * (a.v + b.v) - delta * (b.u - a.u) / l};
          if (p.u * p.u + p.v * p.v >= 1) continue;
          auto hit = containing_faces(polys, p);
          if (hit.size() != 1 || hit[0] != static_cast<int>(f)) continue;
          double cl = clearance(p);
          if (cl > best) {
            best = cl;
            filled[f] = 1;
            sk.faces[f].rep_point = disc_to_sphere(p);
          }
        }
        if (filled[f]) break;
      }
    }
    int count = 0;
    for (auto c : filled) count += c;
    // nested components contribute their own bounded faces
    std::map<int, int> nested_faces;
    for (auto& fc : sk.faces) {
      int c = comp_of_edge_[fc.darts[0] / 2];
      if (c != main_comp_) nested_faces[c]++;
    }
    for (auto& [c, n] : nested_faces) count += n - 1;
    sk.regions_fill = count;
    if (sk.regions_fill != sk.regions_euler)
      sk.diagnostics.push_back("region fill found " + std::to_string(sk.regions_fill) + " regions, Euler gives " +
                               std::to_string(sk.regions_euler));
    // isolated nodes: which face holds them
    for (size_t v = 0; v < sk.nodes.size(); ++v) {
      if (comp_of_node_[v] == main_comp_) continue;
      bool has_edge = false;
      for (auto& e : sk.edges) has_edge |= e.from == static_cast<int>(v) || e.to == static_cast<int>(v);
      auto hit = containing_faces(polys, sphere_to_disc(sk.nodes[v].pos));
      if (hit.size() == 1 && !has_edge) sk.faces[hit[0]].contents.push_back(static_cast<int>(v));
    }
  }

  // points just inside face f, offset from its boundary
  std::vector<DiscPoint> inner_points(size_t f) const {
    std::vector<DiscPoint> out;
    const auto& poly = polys_[f];
    for (double delta : {3e-3, 1e-3, 3e-4, 1e-4}) {
      for (size_t k = 0; k + 1 < poly.size(); k += std::max<size_t>(1, poly.size() / 40)) {
        const DiscPoint &a = poly[k], &b = poly[k + 1];
        double l = std::hypot(b.u - a.u, b.v - a.v);
        if (l == 0) continue;
        DiscPoint p{0.5 * (a.u + b.u) + delta * (b.v - a.v) / l, 0.5 * (a.v + b.v) - delta * (b.u - a.u) / l};
        if (p.u * p.u + p.v * p.v >= 1) continue;
        auto hit = containing_faces(polys_, p);
        if (hit.size() == 1 && hit[0] == static_cast<int>(f)) out.push_back(p);
      }
    }
    return out;
  }

  void representatives() {
    FlowOptions fo = opt.flow;
    fo.use_snap = false;
    fo.arc_length = true;
    auto end_of = [&](const Orbit& o) {
      if (o.termination.kind == Termination::singular_line) return -2;
      if (o.termination.kind == Termination::singular_point || o.termination.kind == Termination::infinity_point)
        return node_index(o.termination.node);
      return -1;
    };
    // an orbit of an open region cannot tend to a hyperbolic saddle
    auto at_saddle = [&](int n) { return n >= 0 && (sk.nodes[n].label == "saddle" || sk.nodes[n].label == "inf-saddle"); };
    for (size_t fi = 0; fi < sk.faces.size(); ++fi) {
      auto& f = sk.faces[fi];
      if (f.outer || comp_of_edge_[f.darts[0] / 2] != main_comp_) continue;
      Orbit fw = integrate(ctx, f.rep_point, Direction::forward, fo);
      Orbit bw = integrate(ctx, f.rep_point, Direction::backward, fo);
      // the orbit must stay inside its face, which rules out points misplaced by polyline sag
      auto stays = [&](const Orbit& o) {
        const size_t step = std::max<size_t>(1, o.pts.size() / 60);
        for (size_t k = 0; k < o.pts.size(); k += step) {
          bool near_node = false;
          for (auto& n : sk.nodes) near_node |= sphere_dist(o.pts[k], n.pos) < 0.03;
          DiscPoint q = sphere_to_disc(o.pts[k]);
          // membership is unreliable where boundaries run tangent to the circle
          if (near_node || q.u * q.u + q.v * q.v > 0.996) continue;
          auto hit = containing_faces(polys_, q);
          if (hit.size() == 1 && hit[0] != static_cast<int>(fi) && clearance(q) > 2e-3) return false;
        }
        return true;
      };
      auto good = [&](const Orbit& a, const Orbit& b) {
        return !at_saddle(end_of(a)) && !at_saddle(end_of(b)) && stays(a) && stays(b);
      };
      if (!good(fw, bw)) {
        bool found = false;
        for (const DiscPoint& p : inner_points(fi)) {
          Vec3 s = disc_to_sphere(p);
          Orbit f2 = integrate(ctx, s, Direction::forward, fo);
          if (at_saddle(end_of(f2)) || !stays(f2)) continue;
          Orbit b2 = integrate(ctx, s, Direction::backward, fo);
          if (!good(f2, b2)) continue;
          f.rep_point = s, fw = std::move(f2), bw = std::move(b2), found = true;
          break;
        }
        if (!found) sk.diagnostics.push_back("no representative orbit found inside a region");
      }
      f.omega = end_of(fw);
      f.alpha = end_of(bw);
      if (f.alpha == -1 && f.omega == -1 && !f.contents.empty())
        f.rep_kind = "periodic";
      else if (f.alpha == -2 || f.omega == -2)
        f.rep_kind = "line";
      else if (f.alpha >= 0 && f.omega >= 0)
        f.rep_kind = "flow";
      else
        f.rep_kind = "unknown";
      Orbit joined = bw;
      std::reverse(joined.pts.begin(), joined.pts.end());
      joined.pts.insert(joined.pts.end(), fw.pts.begin() + 1, fw.pts.end());
      if (f.rep_kind == "periodic") joined.pts = first_turn(fw.pts, sphere_to_disc(sk.nodes[f.contents.front()].pos));
      joined.t.clear();
      for (size_t k = 0; k < joined.pts.size(); ++k) joined.t.push_back(static_cast<double>(k));
      sk.representatives.push_back(std::move(joined));
    }
  }
};

}  // namespace

std::vector<Vec3> first_turn(const std::vector<Vec3>& pts, DiscPoint centre) {
  double wind = 0, prev = 0;
  size_t n = 0;
  for (; n < pts.size(); ++n) {
    DiscPoint d = sphere_to_disc(pts[n]);
    double a = std::atan2(d.v - centre.v, d.u - centre.u);
    if (n > 0) wind += std::remainder(a - prev, 2 * M_PI);
    prev = a;
    if (std::fabs(wind) >= 2 * M_PI) break;
  }
  return {pts.begin(), pts.begin() + std::min(n + 1, pts.size())};
}

namespace {

std::vector<Vec3> plane_curve(const std::function<PlanePoint(double)>& g, const std::vector<double>& ts) {
  std::vector<Vec3> out;
  for (double t : ts) out.push_back(plane_to_sphere(g(t)));
  return out;
}

std::vector<double> geometric(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i <= n; ++i) v.push_back(a * std::pow(b / a, static_cast<double>(i) / n));
  return v;
}

// q1: the field is x (1 - y, 1); x = 0 is a line of equilibria and the
// orbits are the parabolas y^2 - 2y + 2x = const.
void q1_edges(Builder& bl) {
  Skeleton& sk = bl.sk;
  int P = bl.node_index("P2"), U2 = bl.node_index("U2"), V2 = bl.node_index("V2"), V1 = bl.node_index("V1");
  auto s = geometric(1e-9, 1e7, 400);
  auto add = [&](int from, int to, std::vector<Vec3> pts, bool undirected) {
    SkeletonEdge e{from, to, {}, false, undirected};
    e.poly.push_back(sk.nodes[from].pos);
    e.poly.insert(e.poly.end(), pts.begin(), pts.end());
    e.poly.push_back(sk.nodes[to].pos);
    sk.edges.push_back(std::move(e));
  };
  std::vector<double> down(s.rbegin(), s.rend());
  add(V2, P, plane_curve([](double t) { return PlanePoint{0, 1 - t}; }, down), true);
  add(P, U2, plane_curve([](double t) { return PlanePoint{0, 1 + t}; }, s), true);
  add(V1, P, plane_curve([](double t) { return PlanePoint{-0.5 * t * t, 1 + t}; }, down), false);
  add(P, V1, plane_curve([](double t) { return PlanePoint{-0.5 * t * t, 1 - t}; }, s), false);
}

}  // namespace

Skeleton trace_separatrices(const Params& p, const SkeletonOptions& opt) {
  FlowContext ctx = make_context(p);
  Skeleton sk{p};
  sk.nodes = ctx.nodes;
  for (auto& n : sk.nodes) sk.finite_points += !n.infinite;
  Builder bl{sk, ctx, opt};
  bl.add_arcs();
  if (ctx.singular_line)
    q1_edges(bl);
  else
    bl.collect();
  if (!sk.diagnostics.empty()) return sk;
  bl.rotation_system();
  if (!sk.diagnostics.empty()) return sk;
  bl.faces_and_counts();
  bl.region_fill();
  bl.representatives();
  return sk;
}

SRCount count_SR(const Skeleton& sk) {
  if (!sk.complete()) throw std::runtime_error("count_SR: skeleton has diagnostics: " + sk.diagnostics.front());
  int interior = 0;
  for (auto& e : sk.edges) interior += !e.arc;
  return {8 + sk.finite_points + sk.limit_cycles + interior, sk.regions_euler};
}

}  // namespace brlab
