#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "brlab/report.hpp"

using namespace brlab;

namespace {

// Minimal well-formedness check: every start tag is closed in order.
bool balanced_xml(const std::string& s, std::string* why) {
  std::vector<std::string> stack;
  size_t i = 0;
  while ((i = s.find('<', i)) != std::string::npos) {
    size_t j = s.find('>', i);
    if (j == std::string::npos) return *why = "unterminated tag", false;
    std::string tag = s.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty()) return *why = "empty tag", false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    std::string name = tag.substr(tag[0] == '/', tag.find_first_of(" \t\n") - (tag[0] == '/'));
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != name) return *why = "mismatched </" + name + ">", false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  if (!stack.empty()) return *why = "unclosed <" + stack.back() + ">", false;
  return true;
}

int count(const std::string& s, const std::string& sub) {
  int n = 0;
  for (size_t i = s.find(sub); i != std::string::npos; i = s.find(sub, i + 1)) ++n;
  return n;
}

const Json* point(const Json& pts, const std::string& id) {
  for (auto& p : pts)
    if (p["id"] == id) return &p;
  return nullptr;
}

}  // namespace

TEST_CASE("classify report at (1, 3)") {
  Json j = classify_report(Params(1, 3));
  CHECK(j["cell"]["id"] == "S[g3=0,b>0]");
  CHECK(j["cell"]["kind"] == "segment");
  CHECK(j["S"] == 17);
  CHECK(j["R"] == 5);
  CHECK(j["regions_fill"] == 5);
  CHECK(j["diagnostics"].empty());
  const Json* P2 = point(j["finite_points"], "P2");
  REQUIRE(P2);
  CHECK((*P2)["kind"] == "center");
  CHECK((*P2)["x"] == 1.0);
  CHECK((*P2)["y"] == 1.0);
  CHECK(j["infinite_points"].size() == 4);
  CHECK(j["vanishing"] == Json::array({"g3"}));
  CHECK(j["seed"] == kDefaultSeed);
  CHECK(j["version"] == kVersion);
  CHECK(j["integrator"]["tol"] == 1e-9);
  bool has_H = false;
  for (auto& d : j["darboux"]) has_H |= d["name"] == "H";
  CHECK(has_H);
}

TEST_CASE("classify report at q1 flags the degeneracy") {
  Json j = classify_report(Params(0, 1));
  CHECK(j["cell"]["id"] == "P[q1]");
  CHECK(j["vanishing"].size() == 5);
  for (auto& p : j["finite_points"]) {
    CHECK(p["degenerate"] == true);
    CHECK(p["kind"] == "non-isolated");
  }
}

TEST_CASE("JSON round trip and determinism") {
  for (auto [b, c] : std::vector<std::pair<double, double>>{{1, 3}, {-0.25, 0.5}, {0.3, 6.1}}) {
    Json j = classify_report(Params(b, c));
    std::string s = dump(j);
    CHECK(Json::parse(s) == j);
    CHECK(dump(Json::parse(s)) == s);
    CHECK(s.back() == '\n');
    CHECK(dump(classify_report(Params(b, c))) == s);
  }
  // shortest round-trip floats
  CHECK(dump(Json{{"x", 0.1}}) == "{\n  \"x\": 0.1\n}\n");
  // keys sorted
  std::string s = dump(Json{{"b", 1}, {"a", 2}});
  CHECK(s.find("\"a\"") < s.find("\"b\""));
}

TEST_CASE("portrait SVG") {
  Skeleton sk = trace_separatrices(Params(1, 3));
  REQUIRE(sk.complete());
  std::string svg = portrait_svg(sk);
  std::string why;
  CHECK_MESSAGE(balanced_xml(svg, &why), why);
  CHECK(svg.find("<circle class=\"boundary\" cx=\"0\" cy=\"0\" r=\"1\"/>") != std::string::npos);
  CHECK(svg.find("S=17 R=5") != std::string::npos);
  CHECK(count(svg, "class=\"center\"") == 1);
  // closed orbits are drawn around the centre
  CHECK(count(svg, "class=\"orbit\"") >= 7);
  CHECK(portrait_svg(sk) == svg);
  CHECK(portrait_svg(sk, {5, 11, 1e-9}) == portrait_svg(sk, {5, 11, 1e-9}));
  CHECK(portrait_svg(sk, {5, 11, 1e-9}) != portrait_svg(sk, {5, 12, 1e-9}));

  // P1 is absent at b = 0: two finite glyphs besides the four at infinity
  Skeleton sk2 = trace_separatrices(Params(0, 2));
  std::string svg2 = portrait_svg(sk2);
  CHECK(balanced_xml(svg2, &why));
  int finite = 0;
  for (auto& n : sk2.nodes) finite += !n.infinite;
  CHECK(finite == 2);
  CHECK(count(svg2, "class=\"saddle\"") + count(svg2, "class=\"sink\"") + count(svg2, "class=\"source\"") +
            count(svg2, "class=\"center\"") ==
        2);
}

TEST_CASE("portrait of an incomplete skeleton carries a warning layer") {
  Skeleton sk = trace_separatrices(Params(1, 3));
  sk.diagnostics.push_back("test <diagnostic> & more");
  std::string svg = portrait_svg(sk);
  std::string why;
  CHECK_MESSAGE(balanced_xml(svg, &why), why);
  CHECK(svg.find("<g id=\"warning\">") != std::string::npos);
  CHECK(svg.find("&lt;diagnostic> &amp; more") != std::string::npos);
}

TEST_CASE("sweep outputs") {
  std::vector<Cell> all = build_arrangement();
  std::vector<Cell> some;
  for (auto& c : all)
    if (c.kind != CellKind::region) some.push_back(c);
  Census cs = classify_all(some);
  Window w;
  Json j = census_json(cs, w);
  CHECK(j["cell_count"] == some.size());
  CHECK(j["class_count"] == cs.classes.size());
  CHECK(j["census_matches"] == false);
  CHECK(Json::parse(dump(j)) == j);
  std::string a = sweep_svg(cs, w, 50), b = sweep_svg(cs, w, 200);
  std::string why;
  CHECK_MESSAGE(balanced_xml(a, &why), why);
  CHECK(count(a, "class=\"curve\"") == 5);
  for (const char* id : {"g0", "g1", "g2", "g3", "D1"}) CHECK(a.find(std::string("id=\"") + id + "\"") != std::string::npos);
  CHECK(a != b);  // shading resolution differs, the census does not
  CHECK(dump(census_json(cs, w)) == dump(j));
}

TEST_CASE("atomic writes") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "brlab_report_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string f = (dir / "out.txt").string();
  write_atomic(f, "first\n");
  write_atomic(f, "second\n");
  std::ifstream in(f);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  int files = 0;
  for (auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  fs::remove_all(dir);
}
