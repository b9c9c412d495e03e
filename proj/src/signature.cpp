#include <algorithm>
#include <cstdio>
#include <map>

#include "brlab/flow.hpp"

namespace brlab {

namespace {

struct MapView {
  int nd = 0;
  std::vector<int> node, sig;      // per dart
  std::vector<std::string> dlabel;  // node label + edge kind + role
  std::vector<int> face;            // face attribute index per dart
};

struct FaceAttr {
  std::string kind;
  int alpha = -1, omega = -1;
  std::string contents;
};

std::string swap_time(const std::string& lab) {
  static const std::map<std::string, std::string> m = {
      {"source", "sink"}, {"sink", "source"}, {"inf-source", "inf-sink"}, {"inf-sink", "inf-source"}};
  auto it = m.find(lab);
  return it == m.end() ? lab : it->second;
}

std::string code_from(const MapView& mv, const std::vector<FaceAttr>& fa, int d0) {
  std::vector<int> num(mv.nd, -1), order;
  num[d0] = 0;
  order.push_back(d0);
  for (size_t k = 0; k < order.size(); ++k) {
    int d = order[k];
    for (int x : {mv.sig[d], d ^ 1})
      if (num[x] < 0) num[x] = static_cast<int>(order.size()), order.push_back(x);
  }
  std::string code;
  for (int d : order) {
    const FaceAttr& f = fa[mv.face[d]];
    // positions of the representative's limits along the face walk starting at d
    int pa = -1, pw = -1, pos = 0, x = d;
    do {
      if (pa < 0 && mv.node[x] == f.alpha) pa = pos;
      if (pw < 0 && mv.node[x] == f.omega) pw = pos;
      x = mv.sig[x ^ 1];
      ++pos;
    } while (x != d && pos <= mv.nd);
    code += mv.dlabel[d] + "," + f.kind + ":" + std::to_string(pa) + ":" + std::to_string(pw) + ":" + f.contents +
            "," + std::to_string(num[mv.sig[d]]) + "," + std::to_string(num[d ^ 1]) + ";";
  }
  return code;
}

std::string canonical_of(const MapView& mv, const std::vector<FaceAttr>& fa) {
  std::string best;
  for (int d = 0; d < mv.nd; ++d) {
    std::string c = code_from(mv, fa, d);
    if (best.empty() || c < best) best = c;
  }
  return best;
}

}  // namespace

TopoSignature signature(const Skeleton& sk) {
  // restrict to the component holding the boundary circle
  const int ne = static_cast<int>(sk.edges.size());
  MapView mv;
  mv.nd = 2 * ne;
  mv.node.resize(mv.nd);
  mv.sig.resize(mv.nd);
  mv.dlabel.resize(mv.nd);
  mv.face.assign(mv.nd, 0);
  for (int e = 0; e < ne; ++e) {
    const auto& ed = sk.edges[e];
    mv.node[2 * e] = ed.from;
    mv.node[2 * e + 1] = ed.to;
    std::string kind = ed.arc ? "arc" : (ed.undirected ? "line" : "sep");
    mv.dlabel[2 * e] = sk.nodes[ed.from].label + "|" + kind + "|" + (ed.undirected ? "u" : "t");
    mv.dlabel[2 * e + 1] = sk.nodes[ed.to].label + "|" + kind + "|" + (ed.undirected ? "u" : "h");
  }
  for (auto& rot : sk.rotation)
    for (size_t k = 0; k < rot.size(); ++k) mv.sig[rot[k]] = rot[(k + 1) % rot.size()];
  std::vector<FaceAttr> fa(sk.faces.size());
  for (size_t f = 0; f < sk.faces.size(); ++f) {
    const FaceInfo& fi = sk.faces[f];
    fa[f].kind = fi.outer ? "outer" : fi.rep_kind;
    fa[f].alpha = fi.alpha;
    fa[f].omega = fi.omega;
    std::vector<std::string> c;
    for (int v : fi.contents) c.push_back(sk.nodes[v].label);
    std::sort(c.begin(), c.end());
    for (auto& s : c) fa[f].contents += s + "+";
    for (int d : fi.darts) mv.face[d] = static_cast<int>(f);
  }

  auto mirror = [](const MapView& m) {
    MapView r = m;
    for (int d = 0; d < m.nd; ++d) r.sig[m.sig[d]] = d;  // inverse rotation
    for (int d = 0; d < m.nd; ++d) r.face[d] = m.face[d ^ 1];
    return r;
  };
  auto reverse_time = [](const MapView& m, std::vector<FaceAttr> f) {
    MapView r = m;
    for (int d = 0; d < m.nd; ++d) {
      std::string lab = m.dlabel[d];
      auto p1 = lab.find('|'), p2 = lab.rfind('|');
      std::string role = lab.substr(p2 + 1);
      role = role == "t" ? "h" : (role == "h" ? "t" : role);
      r.dlabel[d] = swap_time(lab.substr(0, p1)) + lab.substr(p1, p2 - p1) + "|" + role;
    }
    for (auto& a : f) {
      std::swap(a.alpha, a.omega);
      std::string c;
      // contents labels are stored joined; swap each entry
      size_t s = 0;
      std::vector<std::string> parts;
      while (s < a.contents.size()) {
        size_t e = a.contents.find('+', s);
        parts.push_back(swap_time(a.contents.substr(s, e - s)));
        s = e + 1;
      }
      std::sort(parts.begin(), parts.end());
      for (auto& x : parts) c += x + "+";
      a.contents = c;
    }
    return std::make_pair(r, f);
  };

  TopoSignature ts;
  ts.direct = canonical_of(mv, fa);
  ts.mirrored = canonical_of(mirror(mv), fa);
  auto [rv, rf] = reverse_time(mv, fa);
  ts.reversed = std::min(canonical_of(rv, rf), canonical_of(mirror(rv), rf));
  return ts;
}

std::string TopoSignature::hash() const {
  std::string c = canonical();
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char ch : c) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

Equivalence compare_signatures(const TopoSignature& a, const TopoSignature& b) {
  Equivalence e;
  if (a.direct == b.direct)
    e.equivalent = true, e.variant = "orientation-preserving";
  else if (a.direct == b.mirrored)
    e.equivalent = true, e.variant = "reflection";
  e.time_reversed_equivalent = a.canonical() == b.reversed;
  if (!e.equivalent) e.variant = e.time_reversed_equivalent ? "time-reversal" : "none";
  return e;
}

bool signatures_equivalent(const TopoSignature& a, const TopoSignature& b) { return a.canonical() == b.canonical(); }

}  // namespace brlab
