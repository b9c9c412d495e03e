#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "brlab/bifurcation.hpp"
#include "brlab/local_analysis.hpp"

using namespace brlab;

namespace {

const std::vector<Cell>& cells() {
  static const std::vector<Cell> c = build_arrangement();
  return c;
}

const Cell* by_id(const std::string& id) {
  for (auto& c : cells())
    if (c.canonical_id == id) return &c;
  return nullptr;
}

double min_curve_distance(const Params& p) {
  auto v = bifurcation_values(p);
  double d = std::min({std::abs(v.g0), std::abs(v.g1), std::abs(v.g2) / std::sqrt(2.0), std::abs(v.g3) / std::sqrt(5.0)});
  // D1 distance estimated to first order
  const double b = p.b(), c = p.c();
  double gb = -4 * c + 8 * b + 8, gc = 2 * c - 4 * b - 6;
  return std::min(d, std::abs(v.D1) / std::max(1e-12, std::hypot(gb, gc)));
}

}  // namespace

TEST_CASE("arrangement cell counts") {
  std::map<CellKind, int> n;
  for (auto& c : cells()) ++n[c.kind];
  CHECK(n[CellKind::region] == 12);
  CHECK(n[CellKind::segment] == 13);
  CHECK(n[CellKind::point] == 2);
  CHECK(cells().size() == 27);
}

TEST_CASE("segment census by curve") {
  std::map<std::string, int> n;
  for (auto& c : cells())
    if (c.kind == CellKind::segment) ++n[c.curve];
  CHECK(n["g0"] == 3);
  CHECK(n["g1"] == 2);
  CHECK(n["g2"] == 2);
  CHECK(n["g3"] == 2);
  CHECK(n["D1"] == 4);
}

TEST_CASE("special points") {
  const Cell* q1 = by_id("P[q1]");
  const Cell* q2 = by_id("P[q2]");
  REQUIRE(q1);
  REQUIRE(q2);
  CHECK(q1->sample == Params(0, 1));
  CHECK(q2->sample == Params(0, 5));
  // D1(b = 0, c) = c^2 - 6c + 5 vanishes at c = 1 and c = 5
  for (double c : {1.0, 5.0}) CHECK(bifurcation_values(Params(0, c)).D1 == 0);
  // q2 lies on b = 0 and D1 = 0 only
  auto v = bifurcation_values(q2->sample);
  CHECK(std::abs(v.g1) > 0);
  CHECK(std::abs(v.g2) > 0);
  CHECK(std::abs(v.g3) > 0);
}

TEST_CASE("D1 restrictions force all meetings onto b = 0") {
  auto rs = d1_restrictions();
  REQUIRE(rs.size() == 3);
  for (auto& r : rs) {
    CAPTURE(r.line);
    CHECK(r.holds());
  }
  // D1 = x^2 - 4xy + 4y^2 - 6x + 8y + 5 in (x = c, y = b)
  BiPoly X = BiPoly::x(), Y = BiPoly::y();
  CHECK(d1_polynomial() == X * X - scale(X * Y, 4) + scale(Y * Y, 4) - scale(X, 6) + scale(Y, 8) + 5);
  CHECK(compose(d1_polynomial(), Y + 1, Y) == Y * Y);
  CHECK(compose(d1_polynomial(), scale(Y, 2) + 1, Y) == scale(Y, -4));
}

TEST_CASE("locate") {
  CHECK(locate(Params(1, 3)).canonical_id == "S[g3=0,b>0]");
  CHECK(locate(Params(0, 1)).canonical_id == "P[q1]");
  CHECK(locate(Params(0, 5)).canonical_id == "P[q2]");
  Cell r = locate(Params(1, 10));
  CHECK(r.kind == CellKind::region);
  CHECK(r.sign_vector == SignVector{1, 1, -1, -1, 1});
  CHECK(r.canonical_id == "R[g0+,g1+,g2-,g3-,D1+]");
  CHECK(region_id({1, 1, -1, -1, 1}) == "R[g0+,g1+,g2-,g3-,D1+]");
  // every cell's sample locates back to the cell
  for (auto& c : cells()) CHECK(locate(c.sample).canonical_id == c.canonical_id);
}

TEST_CASE("cell samples reproduce their sign vectors") {
  for (auto& c : cells()) {
    CAPTURE(c.canonical_id);
    CHECK(sign_vector(c.sample) == c.sign_vector);
    int zeros = 0;
    for (int s : c.sign_vector) zeros += s == 0;
    if (c.kind == CellKind::region) CHECK(zeros == 0);
    if (c.kind == CellKind::segment) CHECK(zeros >= 1);
  }
}

TEST_CASE("sign vectors are constant on regions") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> bb(-0.999, 4), cc(1e-3, 8);
  std::map<std::string, int> hits;
  for (int i = 0; i < 20000; ++i) {
    Params p(bb(rng), cc(rng));
    SignVector s = sign_vector(p);
    bool zero = false;
    for (int v : s) zero |= v == 0;
    if (zero) continue;
    std::string id = region_id(s);
    REQUIRE(by_id(id));
    ++hits[id];
  }
  // all twelve regions are hit and no sign vector outside them occurs
  CHECK(hits.size() == 12);
}

TEST_CASE("window checks") {
  CHECK_THROWS_AS(build_arrangement({0, 4, -1, 4}), DomainError);
  try {
    build_arrangement({0, 4, -1, 4});
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("q2") != std::string::npos);
  }
  // window independence once the minimal window is contained
  auto big = build_arrangement({0, 20, -1, 10});
  CHECK(big.size() == cells().size());
  std::map<std::string, int> a, b;
  for (auto& c : cells()) ++a[c.canonical_id];
  for (auto& c : big) ++b[c.canonical_id];
  CHECK(a == b);
}

TEST_CASE("second samples in a region give the same portrait") {
  // A second point is drawn in each region on the same side of b = -1/2 as the primary
  // sample, away from all curves; crossing b = -1/2 changes the portrait (see below).
  // Points with g4 = b + 1 < 0.1 are excluded: the infinite points approach degeneracy there.
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> bb(-0.9, 4), cc(0.01, 8);
  for (auto& c : cells()) {
    if (c.kind != CellKind::region) continue;
    CAPTURE(c.canonical_id);
    const bool below = c.sample.b() < -0.5;
    std::vector<Params> qs;
    for (int i = 0; i < 400000 && qs.size() < 3; ++i) {
      Params p(bb(rng), cc(rng));
      if (sign_vector(p) != c.sign_vector) continue;
      if ((p.b() < -0.5) != below || std::abs(p.b() + 0.5) < 0.05) continue;
      if (min_curve_distance(p) < 0.05) continue;
      if (std::hypot(p.b() - c.sample.b(), p.c() - c.sample.c()) < 0.05) continue;
      qs.push_back(p);
    }
    REQUIRE(qs.size() == 3);
    Skeleton a = trace_separatrices(c.sample);
    REQUIRE(a.complete());
    for (auto& q : qs) {
      CAPTURE(q.b());
      CAPTURE(q.c());
      Skeleton b = trace_separatrices(q);
      CAPTURE(b.diagnostics.empty() ? std::string() : b.diagnostics.front());
      REQUIRE(b.complete());
      CHECK(signatures_equivalent(signature(a), signature(b)));
    }
  }
}

TEST_CASE("b = -1/2 separates portraits inside a sign region") {
  // The sign vector does not see b = -1/2, where the U1 nilpotent point changes its
  // separatrix structure.
  Params lo(-0.645, 0.145), hi(-0.4, 0.3);
  REQUIRE(sign_vector(lo) == sign_vector(hi));
  auto a = count_SR(trace_separatrices(lo)), b = count_SR(trace_separatrices(hi));
  CHECK(a.S == 19);
  CHECK(a.R == 6);
  CHECK(b.S == 17);
  CHECK(b.R == 4);
}

TEST_CASE("grouping merges equivalent results") {
  std::vector<Cell> some = {*by_id("S[g0=0,1<c<5]"), *by_id("S[g0=0,c>5]"), *by_id("P[q2]"), *by_id("S[g3=0,b>0]")};
  Census cs = classify_all(some);
  REQUIRE(cs.cells.size() == 4);
  for (auto& r : cs.cells) CHECK(r.ok());
  REQUIRE(cs.classes.size() == 2);
  std::map<size_t, int> sizes;
  for (auto& k : cs.classes) ++sizes[k.members.size()];
  CHECK(sizes[3] == 1);
  CHECK(sizes[1] == 1);
  for (auto& k : cs.classes)
    if (k.members.size() == 3) {
      CHECK(k.S == 14);
      CHECK(k.R == 3);
    }
  CHECK_FALSE(cs.matches());  // a partial census never matches the full one
  CHECK(worker_threads() >= 1);
}
