#include "brlab/bifurcation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "brlab/local_analysis.hpp"

namespace brlab {

std::string to_string(CellKind k) {
  switch (k) {
    case CellKind::region: return "region";
    case CellKind::segment: return "segment";
    case CellKind::point: return "point";
  }
  return "?";
}

namespace {

const char* kNames[5] = {"g0", "g1", "g2", "g3", "D1"};
const Window kMinimal{};

// Samples near b = -1/2 sit on an extra degeneracy of the point at infinity on
// the x axis (see README); they are moved at least this far away.
constexpr double kHiddenB = -0.5, kHiddenMargin = 0.05;

double d1(double c, double b) { return c * c - 4 * c * b + 4 * b * b - 6 * c + 8 * b + 5; }

// first-order distance to the curve arrangement and the domain boundary
double clearance(double c, double b, bool hidden) {
  double gc = 2 * c - 4 * b - 6, gb = -4 * c + 8 * b + 8;
  double gn = std::hypot(gc, gb);
  double dd = gn > 1e-12 ? std::fabs(d1(c, b)) / gn : std::sqrt(std::fabs(d1(c, b)));
  double r = std::min({std::fabs(b), std::fabs(c - 1), std::fabs(b - c + 1) / std::sqrt(2.0),
                       std::fabs(2 * b - c + 1) / std::sqrt(5.0), dd, c, b + 1});
  if (hidden) r = std::min(r, std::fabs(b - kHiddenB));
  return r;
}

struct SegmentDef {
  std::string curve, qualifier;
  std::function<Params(double)> at;
  double t0, t1;  // parameter range inside the minimal window
};

double upper_c_at_b4() {
  double lo = 1, hi = 10;  // b_+(c) = 4
  for (int i = 0; i < 100; ++i) {
    double m = (lo + hi) / 2;
    ((m - 2 + std::sqrt(2 * m - 1)) / 2 < 4 ? lo : hi) = m;
  }
  return lo;
}

std::vector<SegmentDef> segment_defs() {
  auto bplus = [](double c) { return Params((c - 2 + std::sqrt(2 * c - 1)) / 2, c); };
  auto bminus = [](double c) { return Params((c - 2 - std::sqrt(2 * c - 1)) / 2, c); };
  auto on_b0 = [](double c) { return Params(0, c); };
  auto on_c1 = [](double b) { return Params(b, 1); };
  auto on_g2 = [](double c) { return Params(c - 1, c); };
  auto on_g3 = [](double c) { return Params((c - 1) / 2, c); };
  // D1 arc through the vertex (c,b) = (1/2,-3/4), parameterized by b
  auto vertex_arc = [](double b) { return Params(b, 2 * b + 3 - 2 * std::sqrt(b + 1)); };
  return {
      {"g0", "c<1", on_b0, 0, 1},
      {"g0", "1<c<5", on_b0, 1, 5},
      {"g0", "c>5", on_b0, 5, 8},
      {"g1", "b<0", on_c1, -1, 0},
      {"g1", "b>0", on_c1, 0, 4},
      {"g2", "b<0", on_g2, 0, 1},
      {"g2", "b>0", on_g2, 1, 5},
      {"g3", "b<0", on_g3, 0, 1},
      {"g3", "b>0", on_g3, 1, 8},
      {"D1", "c<1", vertex_arc, -1, 0},
      {"D1", "upper,c>1", bplus, 1, upper_c_at_b4()},
      {"D1", "lower,b<0", bminus, 1, 5},
      {"D1", "lower,b>0", bminus, 5, 8},
  };
}

std::string segment_id(const std::string& curve, const std::string& q) { return "S[" + curve + "=0," + q + "]"; }

Params segment_sample(const SegmentDef& s) {
  Params p = s.at((s.t0 + s.t1) / 2);
  if (std::fabs(p.b() - kHiddenB) < kHiddenMargin) p = s.at(s.t0 + 0.75 * (s.t1 - s.t0));
  return p;
}

struct Raster {
  int nc, nb;
  Window w;
  std::vector<int> code;  // packed sign vector, -1 outside the domain or on a curve
  double c_at(int i) const { return w.c_min + (i + 0.5) * (w.c_max - w.c_min) / nc; }
  double b_at(int j) const { return w.b_min + (j + 0.5) * (w.b_max - w.b_min) / nb; }
};

int pack(const SignVector& s) {
  int k = 0;
  for (int i = 0; i < 5; ++i) k = 3 * k + (s[i] + 1);
  return k;
}

Raster rasterize(const Window& w, int nc, int nb) {
  Raster r{nc, nb, w, std::vector<int>(static_cast<size_t>(nc) * nb, -1)};
  for (int j = 0; j < nb; ++j)
    for (int i = 0; i < nc; ++i) {
      double c = r.c_at(i), b = r.b_at(j);
      if (c <= 0 || b <= -1) continue;
      SignVector s = sign_vector(Params(b, c));
      if (std::find(s.begin(), s.end(), 0) != s.end()) continue;
      r.code[static_cast<size_t>(j) * nc + i] = pack(s);
    }
  return r;
}

// pixels of the largest 4-connected component with the given code
std::vector<int> largest_component(const Raster& r, int code) {
  std::vector<char> seen(r.code.size(), 0);
  std::vector<int> best;
  for (size_t s = 0; s < r.code.size(); ++s) {
    if (seen[s] || r.code[s] != code) continue;
    std::vector<int> comp, stack{static_cast<int>(s)};
    seen[s] = 1;
    while (!stack.empty()) {
      int k = stack.back();
      stack.pop_back();
      comp.push_back(k);
      int i = k % r.nc, j = k / r.nc;
      const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto& d : nbr) {
        int a = i + d[0], b = j + d[1];
        if (a < 0 || b < 0 || a >= r.nc || b >= r.nb) continue;
        int q = b * r.nc + a;
        if (!seen[q] && r.code[q] == code) seen[q] = 1, stack.push_back(q);
      }
    }
    if (comp.size() > best.size()) best = std::move(comp);
  }
  return best;
}

Params region_sample(const Raster& r, int code, const SignVector& sv) {
  std::vector<int> comp = largest_component(r, code);
  double sc = 0, sb = 0;
  for (int k : comp) sc += r.c_at(k % r.nc), sb += r.b_at(k / r.nc);
  double c = sc / comp.size(), b = sb / comp.size();
  if (c > 0 && b > -1 && sign_vector(Params(b, c)) == sv && clearance(c, b, false) >= 1e-3 &&
      std::fabs(b - kHiddenB) >= kHiddenMargin)
    return Params(b, c);
  // non-convex or too close: the component pixel farthest from everything
  double best = -1;
  for (int k : comp) {
    double cc = r.c_at(k % r.nc), bb = r.b_at(k / r.nc);
    double d = clearance(cc, bb, true);
    if (d > best) best = d, c = cc, b = bb;
  }
  return Params(b, c);
}

const std::vector<Cell>& default_arrangement() {
  static const std::vector<Cell> cells = build_arrangement(kMinimal);
  return cells;
}

}  // namespace

SignVector sign_vector(const Params& p, double tol) {
  BifurcationValues v = bifurcation_values(p);
  return {sign_tol(v.g0, tol), sign_tol(v.g1, tol), sign_tol(v.g2, tol), sign_tol(v.g3, tol), sign_tol(v.D1, tol)};
}

std::string region_id(const SignVector& s) {
  std::string id = "R[";
  for (int i = 0; i < 5; ++i) {
    if (i) id += ",";
    id += kNames[i];
    id += s[i] > 0 ? "+" : (s[i] < 0 ? "-" : "=0");
  }
  return id + "]";
}

std::vector<Cell> build_arrangement(const Window& w) {
  std::vector<std::string> missing;
  auto need = [&](double c, double b, const std::string& what) {
    if (!(c > w.c_min && c <= w.c_max && b > w.b_min && b <= w.b_max)) missing.push_back(what);
  };
  need(1, 0, "q1 (c=1,b=0)");
  need(5, 0, "q2 (c=5,b=0)");
  need(0.5, -0.75, "D1 vertex (c=1/2,b=-3/4)");
  if (w.c_min > 0 || w.c_max < kMinimal.c_max || w.b_min > -1 || w.b_max < kMinimal.b_max)
    missing.push_back("minimal window (0,8]x(-1,4]");
  if (!missing.empty()) {
    std::string msg = "window too small, missing:";
    for (auto& m : missing) msg += " " + m + ";";
    throw DomainError(msg);
  }

  std::vector<Cell> cells;
  // regions: sign vectors present in the window (curves are the only sign changes)
  Window clipped = w;
  clipped.c_min = std::max(w.c_min, 0.0);
  clipped.b_min = std::max(w.b_min, -1.0);
  const int res = 600;
  Raster scan = rasterize(clipped, res, res);
  std::set<int> codes(scan.code.begin(), scan.code.end());
  codes.erase(-1);
  // samples always come from the minimal window so they do not depend on the caller's window
  Raster base = rasterize(kMinimal, 800, 500);
  for (int code : codes) {
    SignVector sv;
    for (int i = 4, k = code; i >= 0; --i, k /= 3) sv[i] = k % 3 - 1;
    Cell cell;
    cell.kind = CellKind::region;
    cell.sign_vector = sv;
    cell.canonical_id = region_id(sv);
    cell.sample = region_sample(base, code, sv);
    cells.push_back(cell);
  }
  for (const SegmentDef& s : segment_defs()) {
    Cell cell;
    cell.kind = CellKind::segment;
    cell.sample = segment_sample(s);
    cell.sign_vector = sign_vector(cell.sample, 1e-9);
    cell.canonical_id = segment_id(s.curve, s.qualifier);
    cell.curve = s.curve;
    cells.push_back(cell);
  }
  for (double c : {1.0, 5.0}) {
    Cell cell;
    cell.kind = CellKind::point;
    cell.sample = Params(0, c);
    cell.sign_vector = sign_vector(cell.sample);
    cell.canonical_id = c == 1 ? "P[q1]" : "P[q2]";
    cells.push_back(cell);
  }
  return cells;
}

Cell locate(const Params& p) {
  SignVector s = sign_vector(p, 1e-12);
  int zeros = static_cast<int>(std::count(s.begin(), s.end(), 0));
  std::string id;
  std::string curve;
  if (zeros >= 2) {
    id = std::fabs(p.c() - 1) < 0.5 ? "P[q1]" : "P[q2]";
  } else if (zeros == 1) {
    int k = static_cast<int>(std::find(s.begin(), s.end(), 0) - s.begin());
    curve = kNames[k];
    double b = p.b(), c = p.c();
    std::string q;
    if (k == 0) q = c < 1 ? "c<1" : (c < 5 ? "1<c<5" : "c>5");
    else if (k == 4) q = c < 1 ? "c<1" : (2 * b - c + 1 > 0 ? "upper,c>1" : (b < 0 ? "lower,b<0" : "lower,b>0"));
    else q = b < 0 ? "b<0" : "b>0";
    id = segment_id(curve, q);
  } else {
    id = region_id(s);
  }
  for (const Cell& c : default_arrangement())
    if (c.canonical_id == id) return c;
  Cell c;
  c.kind = zeros == 0 ? CellKind::region : (zeros == 1 ? CellKind::segment : CellKind::point);
  c.sign_vector = s;
  c.sample = p;
  c.canonical_id = id;
  c.curve = curve;
  return c;
}

BiPoly d1_polynomial() {
  BiPoly c = BiPoly::x(), b = BiPoly::y();
  return c * c - BiPoly(4) * c * b + BiPoly(4) * b * b - BiPoly(6) * c + BiPoly(8) * b + BiPoly(5);
}

std::vector<Restriction> d1_restrictions() {
  BiPoly D = d1_polynomial(), c = BiPoly::x(), b = BiPoly::y();
  return {
      {"c=b+1", compose(D, b + BiPoly(1), b), b * b},
      {"c=2b+1", compose(D, BiPoly(2) * b + BiPoly(1), b), BiPoly(-4) * b},
      {"b=0", compose(D, c, BiPoly(0)), c * c - BiPoly(6) * c + BiPoly(5)},
  };
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* e = std::getenv("BRLAB_THREADS")) {
    int cap = std::atoi(e);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

std::vector<CellResult> analyse_cells(const std::vector<Cell>& cells, const SkeletonOptions& opt) {
  std::vector<CellResult> out(cells.size());
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i; (i = next++) < cells.size();) {
      CellResult& r = out[i];
      r.cell = cells[i];
      try {
        Skeleton sk = trace_separatrices(cells[i].sample, opt);
        r.diagnostics = sk.diagnostics;
        if (sk.complete()) {
          SRCount sr = count_SR(sk);
          r.S = sr.S;
          r.R = sr.R;
          r.signature = signature(sk);
        }
      } catch (const std::exception& e) {
        r.diagnostics.push_back(e.what());
      }
    }
  };
  int n = std::min<int>(worker_threads(), static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

Census group_results(std::vector<CellResult> results) {
  Census cs;
  std::map<std::string, size_t> by_sig;
  for (const CellResult& r : results) {
    if (!r.ok()) {
      std::string d = "cell " + r.cell.canonical_id + " (" + format_params(r.cell.sample) + ") not analysed:";
      for (auto& m : r.diagnostics) d += " " + m + ";";
      cs.diff.push_back(d);
      continue;
    }
    std::string key = r.signature.canonical();
    auto it = by_sig.find(key);
    if (it == by_sig.end()) {
      it = by_sig.emplace(key, cs.classes.size()).first;
      TopoClass tc;
      tc.S = r.S;
      tc.R = r.R;
      tc.signature = r.signature;
      cs.classes.push_back(tc);
    }
    TopoClass& tc = cs.classes[it->second];
    tc.members.push_back(r.cell.canonical_id);
    tc.q1 |= r.cell.canonical_id == "P[q1]";
    if (tc.S != r.S || tc.R != r.R)
      cs.diff.push_back("class of " + tc.members.front() + " mixes (S,R) values");
  }
  cs.cells = std::move(results);

  // expected census
  const std::multiset<std::pair<int, int>> want_sr = {{14, 3}, {15, 4}, {16, 3}, {16, 5}, {16, 5}, {16, 5}, {17, 4},
                                                      {17, 6}, {18, 5}, {18, 5}, {18, 5}, {18, 5}, {19, 6}, {19, 6}};
  const std::multiset<int> want_sizes = {4, 3, 3, 3, 3, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  std::multiset<std::pair<int, int>> got_sr;
  std::multiset<int> got_sizes;
  int q1_classes = 0;
  for (const TopoClass& tc : cs.classes) {
    got_sizes.insert(static_cast<int>(tc.members.size()));
    if (tc.q1) {
      ++q1_classes;
      if (tc.members.size() != 1) cs.diff.push_back("q1 shares its class with other cells");
    } else {
      got_sr.insert({tc.S, tc.R});
    }
  }
  if (cs.classes.size() != 15)
    cs.diff.push_back("classes: expected 15, got " + std::to_string(cs.classes.size()));
  if (q1_classes != 1) cs.diff.push_back("q1 class missing");
  auto fmt_sr = [](const std::pair<int, int>& p) {
    return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
  };
  std::set<std::pair<int, int>> keys(want_sr.begin(), want_sr.end());
  keys.insert(got_sr.begin(), got_sr.end());
  for (auto& k : keys) {
    size_t w = want_sr.count(k), g = got_sr.count(k);
    if (w != g)
      cs.diff.push_back("(S,R)=" + fmt_sr(k) + ": expected " + std::to_string(w) + " classes, got " + std::to_string(g));
  }
  if (got_sizes != want_sizes) {
    std::ostringstream os;
    os << "class sizes: expected {4,3,3,3,3,2,1x9}, got {";
    bool first = true;
    for (auto it = got_sizes.rbegin(); it != got_sizes.rend(); ++it) os << (first ? "" : ",") << *it, first = false;
    os << "}";
    cs.diff.push_back(os.str());
  }
  return cs;
}

Census classify_all(const std::vector<Cell>& cells, const SkeletonOptions& opt) {
  return group_results(analyse_cells(cells, opt));
}

}  // namespace brlab
