#include "brlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unistd.h>

#include "brlab/darboux.hpp"
#include "brlab/local_analysis.hpp"

namespace brlab {

namespace {

Json complex_json(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5f", v);
  std::string s = buf;
  if (s == "-0.00000") s = "0.00000";
  return s;
}

// disc coordinates with v pointing up in SVG space
std::string pt(const DiscPoint& d) { return num(d.u) + "," + num(-d.v); }

std::string polyline(const std::vector<Vec3>& pts, const std::string& cls) {
  std::string s = "<polyline class=\"" + cls + "\" points=\"";
  DiscPoint last{9, 9};
  bool first = true;
  for (const Vec3& p : pts) {
    DiscPoint d = sphere_to_disc(p);
    if (!first && std::hypot(d.u - last.u, d.v - last.v) < 2e-3) continue;
    if (!first) s += ' ';
    s += pt(d);
    last = d;
    first = false;
  }
  DiscPoint end = sphere_to_disc(pts.back());
  if (std::hypot(end.u - last.u, end.v - last.v) > 0) s += ' ' + pt(end);
  return s + "\"/>\n";
}

std::string glyph(const FlowNode& n) {
  DiscPoint d = sphere_to_disc(n.pos);
  std::string at = "cx=\"" + num(d.u) + "\" cy=\"" + num(-d.v) + "\"";
  const std::string& l = n.label;
  std::string g;
  if (l == "source" || l == "inf-source")
    g = "<circle class=\"source\" " + at + " r=\"0.025\"/>";
  else if (l == "sink" || l == "inf-sink")
    g = "<circle class=\"sink\" " + at + " r=\"0.025\"/>";
  else if (l == "center")
    g = "<circle class=\"center\" " + at + " r=\"0.025\"/>";
  else if (l == "saddle" || l == "inf-saddle")
    g = "<rect class=\"saddle\" x=\"" + num(d.u - 0.02) + "\" y=\"" + num(-d.v - 0.02) +
        "\" width=\"0.04\" height=\"0.04\"/>";
  else
    g = "<circle class=\"degenerate\" " + at + " r=\"0.025\"/>";
  return g + "<title>" + n.id + " " + l + "</title>\n";
}

}  // namespace

Json classify_report(const Params& p, const ReportOptions& opt, Skeleton* out) {
  Json j;
  j["version"] = kVersion;
  j["seed"] = opt.seed;
  j["params"] = {{"b", p.b()}, {"c", p.c()}};
  BifurcationValues v = bifurcation_values(p);
  j["bifurcation_values"] = {{"g0", v.g0}, {"g1", v.g1}, {"g2", v.g2}, {"g3", v.g3}, {"g4", v.g4}, {"D1", v.D1}};
  Cell cell = locate(p);
  j["cell"] = {{"id", cell.canonical_id}, {"kind", to_string(cell.kind)}};
  Json degenerate = Json::array();
  const char* names[5] = {"g0", "g1", "g2", "g3", "D1"};
  SignVector sv = sign_vector(p);
  for (int i = 0; i < 5; ++i)
    if (sv[i] == 0) degenerate.push_back(names[i]);
  j["vanishing"] = degenerate;

  Json fin = Json::array();
  for (const SingularPointInfo& s : classify_finite(p)) {
    Json e = {{"id", s.id},
              {"x", s.location.x},
              {"y", s.location.y},
              {"kind", to_string(s.kind)},
              {"eigenvalues", {complex_json(s.eigenvalues.first), complex_json(s.eigenvalues.second)}},
              {"degenerate", s.degenerate}};
    if (!s.merged_with.empty()) e["merged_with"] = s.merged_with;
    fin.push_back(e);
  }
  j["finite_points"] = fin;
  Json inf = Json::array();
  for (const InfinitePoint& s : infinite_singular_points(p))
    inf.push_back({{"id", s.id},
                   {"chart", to_string(s.chart)},
                   {"kind", to_string(s.kind)},
                   {"eigenvalues", {s.eigenvalues[0], s.eigenvalues[1]}}});
  j["infinite_points"] = inf;

  Json darboux = Json::array();
  darboux.push_back({{"name", "H"}, {"kind", "first integral on x>0"}});
  try {
    RationalParams rp = exact_params(p);
    for (const CatalogEntry& e : catalog())
      if (e.valid(rp)) darboux.push_back({{"name", e.id}, {"kind", "invariant curve"}, {"curve", e.curve(rp).to_string()}});
    if (catalog_entry("f3").valid(rp)) darboux.push_back({{"name", "I1,I2"}, {"kind", "Darboux invariants"}});
    if (catalog_entry("f5").valid(rp)) darboux.push_back({{"name", "I3"}, {"kind", "Darboux invariant"}});
  } catch (const DomainError&) {
    darboux.push_back({{"name", "catalog"}, {"kind", "skipped: parameters have no short rational form"}});
  }
  j["darboux"] = darboux;

  Skeleton sk = trace_separatrices(p, opt.skeleton);
  j["diagnostics"] = sk.diagnostics;
  if (sk.complete()) {
    SRCount sr = count_SR(sk);
    j["S"] = sr.S;
    j["R"] = sr.R;
    j["signature"] = signature(sk).hash();
    j["regions_fill"] = sk.regions_fill;
  } else {
    j["S"] = nullptr;
    j["R"] = nullptr;
    j["signature"] = nullptr;
  }
  if (opt.cycle_seeds > 0) {
    LimitCycleReport lc = limit_cycle_scan(p, opt.cycle_seeds, opt.seed);
    j["limit_cycle_scan"] = {{"seeds", lc.seeds},
                             {"recurrent", lc.recurrent},
                             {"non_isolated", lc.non_isolated},
                             {"isolated_cycles", lc.cycles.size()}};
  }
  const FlowOptions& f = opt.skeleton.flow;
  j["integrator"] = {{"method", "Dormand-Prince 5(4)"},
                     {"tol", f.tol},
                     {"max_disc_step", f.max_disc_step},
                     {"snap_radius", f.snap_radius},
                     {"t_max", f.t_max}};
  if (out) *out = std::move(sk);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string portrait_svg(const Skeleton& sk, const PortraitOptions& opt) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"660\" "
        "viewBox=\"-1.1 -1.1 2.2 2.42\">\n"
     << "<style>\n"
        ".boundary{fill:none;stroke:#000;stroke-width:0.006}\n"
        ".separatrix{fill:none;stroke:#b00;stroke-width:0.008}\n"
        ".line{fill:none;stroke:#b00;stroke-width:0.008;stroke-dasharray:0.03 0.015}\n"
        ".orbit{fill:none;stroke:#36c;stroke-width:0.003}\n"
        ".extra{fill:none;stroke:#999;stroke-width:0.002}\n"
        ".source{fill:#e33;stroke:#000;stroke-width:0.004}\n"
        ".sink{fill:#33e;stroke:#000;stroke-width:0.004}\n"
        ".center{fill:#fff;stroke:#000;stroke-width:0.006}\n"
        ".saddle{fill:#3a3;stroke:#000;stroke-width:0.004}\n"
        ".degenerate{fill:#fc0;stroke:#000;stroke-width:0.004}\n"
        ".legend{font:0.06px sans-serif}\n"
        ".warning{font:0.06px sans-serif;fill:#c00}\n"
        "</style>\n";
  os << "<circle class=\"boundary\" cx=\"0\" cy=\"0\" r=\"1\"/>\n";
  os << "<g id=\"orbits\">\n";
  for (const Orbit& o : sk.representatives)
    if (o.pts.size() > 1) os << polyline(o.pts, "orbit");
  if (opt.seeds > 0) {
    FlowContext ctx = make_context(sk.params);
    FlowOptions fo;
    fo.tol = opt.tol;
    fo.t_max = 200;
    fo.max_steps = 50000;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < opt.seeds; ++i) {
      double r = 0.97 * std::sqrt(U(rng)), a = 2 * M_PI * U(rng);
      Vec3 s = disc_to_sphere({r * std::cos(a), r * std::sin(a)});
      Orbit f = integrate(ctx, s, Direction::forward, fo), b = integrate(ctx, s, Direction::backward, fo);
      std::vector<Vec3> pts(b.pts.rbegin(), b.pts.rend());
      pts.insert(pts.end(), f.pts.begin() + 1, f.pts.end());
      if (pts.size() > 1) os << polyline(pts, "extra");
    }
  }
  // nested closed orbits in period annuli, between the centre and the representative orbit
  for (const FaceInfo& f : sk.faces) {
    if (f.rep_kind != "periodic" || f.contents.empty()) continue;
    const DiscPoint c = sphere_to_disc(sk.nodes[f.contents.front()].pos), r = sphere_to_disc(f.rep_point);
    FlowContext ctx = make_context(sk.params);
    FlowOptions fo;
    fo.tol = opt.tol;
    fo.t_max = 200;
    fo.max_steps = 50000;
    for (double k : {0.3, 0.6}) {
      Orbit o = integrate(ctx, disc_to_sphere({c.u + k * (r.u - c.u), c.v + k * (r.v - c.v)}), Direction::forward, fo);
      std::vector<Vec3> pts = first_turn(o.pts, c);
      if (pts.size() > 1) os << polyline(pts, "orbit");
    }
  }
  os << "</g>\n<g id=\"separatrices\">\n";
  for (const SkeletonEdge& e : sk.edges)
    if (!e.arc) os << polyline(e.poly, e.undirected ? "line" : "separatrix");
  os << "</g>\n<g id=\"points\">\n";
  for (const FlowNode& n : sk.nodes) os << glyph(n);
  os << "</g>\n";
  os << "<text class=\"legend\" x=\"-1.05\" y=\"1.2\">" << format_params(sk.params);
  if (sk.complete()) {
    SRCount sr = count_SR(sk);
    os << "  S=" << sr.S << " R=" << sr.R;
  }
  os << "</text>\n";
  if (!sk.complete()) {
    os << "<g id=\"warning\">\n";
    double y = -1.04;
    for (const std::string& d : sk.diagnostics) {
      std::string t;
      for (char ch : d) t += ch == '<' ? std::string("&lt;") : ch == '&' ? std::string("&amp;") : std::string(1, ch);
      os << "<text class=\"warning\" x=\"-1.05\" y=\"" << num(y) << "\">" << t << "</text>\n";
      y += 0.07;
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

Json census_json(const Census& cs, const Window& w) {
  Json j;
  j["version"] = kVersion;
  j["window"] = {{"c_min", w.c_min}, {"c_max", w.c_max}, {"b_min", w.b_min}, {"b_max", w.b_max}};
  std::map<std::string, int> class_of;
  Json classes = Json::array();
  for (size_t i = 0; i < cs.classes.size(); ++i) {
    const TopoClass& tc = cs.classes[i];
    for (auto& m : tc.members) class_of[m] = static_cast<int>(i);
    classes.push_back({{"index", i}, {"members", tc.members}, {"S", tc.S}, {"R", tc.R},
                       {"signature", tc.signature.hash()}, {"q1", tc.q1}});
  }
  Json cells = Json::array();
  for (const CellResult& r : cs.cells) {
    Json c = {{"id", r.cell.canonical_id},
              {"kind", to_string(r.cell.kind)},
              {"sample", {{"b", r.cell.sample.b()}, {"c", r.cell.sample.c()}}},
              {"sign_vector", r.cell.sign_vector},
              {"diagnostics", r.diagnostics}};
    if (r.ok()) {
      c["S"] = r.S;
      c["R"] = r.R;
      c["class"] = class_of[r.cell.canonical_id];
    }
    cells.push_back(c);
  }
  j["cells"] = cells;
  j["classes"] = classes;
  j["cell_count"] = cs.cells.size();
  j["class_count"] = cs.classes.size();
  j["census_matches"] = cs.matches();
  j["diff"] = cs.diff;
  return j;
}

std::string sweep_svg(const Census& cs, const Window& w, int grid) {
  const double W = 800, H = 500;
  auto X = [&](double c) { return (c - w.c_min) / (w.c_max - w.c_min) * W; };
  auto Y = [&](double b) { return H - (b - w.b_min) / (w.b_max - w.b_min) * H; };
  std::map<std::string, int> class_of;
  for (size_t i = 0; i < cs.classes.size(); ++i)
    for (auto& m : cs.classes[i].members) class_of[m] = static_cast<int>(i);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W + 60 << "\" height=\"" << H + 40
     << "\" viewBox=\"-40 -10 " << W + 60 << " " << H + 40 << "\">\n";
  os << "<g id=\"regions\" stroke=\"none\">\n";
  const double dc = (w.c_max - w.c_min) / grid, db = (w.b_max - w.b_min) / grid;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      double c = w.c_min + (i + 0.5) * dc, b = w.b_min + (j + 0.5) * db;
      if (c <= 0 || b <= -1) continue;
      auto it = class_of.find(locate(Params(b, c)).canonical_id);
      int k = it == class_of.end() ? -1 : it->second;
      int hue = k < 0 ? 0 : (k * 47) % 360;
      os << "<rect x=\"" << num(X(c - dc / 2)) << "\" y=\"" << num(Y(b + db / 2)) << "\" width=\"" << num(X(c + dc / 2) - X(c - dc / 2))
         << "\" height=\"" << num(Y(b - db / 2) - Y(b + db / 2)) << "\" fill=\""
         << (k < 0 ? std::string("#ddd") : "hsl(" + std::to_string(hue) + ",60%,80%)") << "\"/>\n";
    }
  os << "</g>\n<g id=\"curves\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\">\n";
  auto curve = [&](const std::string& id, const std::vector<std::pair<double, double>>& cb) {
    os << "<polyline class=\"curve\" id=\"" << id << "\" points=\"";
    bool first = true;
    for (auto& [c, b] : cb) {
      if (c < w.c_min || c > w.c_max || b < w.b_min || b > w.b_max) continue;
      os << (first ? "" : " ") << num(X(c)) << "," << num(Y(b));
      first = false;
    }
    os << "\"/>\n";
  };
  std::vector<std::pair<double, double>> g0, g1, g2, g3, d1;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    double c = std::max(w.c_min, 0.0) + (w.c_max - std::max(w.c_min, 0.0)) * i / n;
    double b = std::max(w.b_min, -1.0) + (w.b_max - std::max(w.b_min, -1.0)) * i / n;
    g0.push_back({c, 0});
    g1.push_back({1, b});
    g2.push_back({c, c - 1});
    g3.push_back({c, (c - 1) / 2});
  }
  // D1 as one polyline: lower branch backwards, then upper branch
  for (int i = n; i >= 0; --i) {
    double c = 0.5 + (w.c_max - 0.5) * std::pow(static_cast<double>(i) / n, 2);
    d1.push_back({c, (c - 2 - std::sqrt(2 * c - 1)) / 2});
  }
  for (int i = 1; i <= n; ++i) {
    double c = 0.5 + (w.c_max - 0.5) * std::pow(static_cast<double>(i) / n, 2);
    d1.push_back({c, (c - 2 + std::sqrt(2 * c - 1)) / 2});
  }
  curve("g0", g0);
  curve("g1", g1);
  curve("g2", g2);
  curve("g3", g3);
  curve("D1", d1);
  os << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<text x=\"" << W / 2 << "\" y=\"" << H + 25 << "\">c</text>\n"
     << "<text x=\"-30\" y=\"" << H / 2 << "\">b</text>\n"
     << "<text x=\"5\" y=\"15\">" << cs.classes.size() << " classes, " << cs.cells.size() << " cells</text>\n"
     << "</g>\n</svg>\n";
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace brlab
