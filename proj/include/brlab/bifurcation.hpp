#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "brlab/exactpoly.hpp"
#include "brlab/flow.hpp"
#include "brlab/model.hpp"

namespace brlab {

// Parameter-plane rectangle, c in (c_min, c_max], b in (b_min, b_max].
struct Window {
  double c_min = 0, c_max = 8, b_min = -1, b_max = 4;
};

enum class CellKind { region, segment, point };
std::string to_string(CellKind k);

// signs of (g0, g1, g2, g3, D1)
using SignVector = std::array<int, 5>;

struct Cell {
  CellKind kind = CellKind::region;
  SignVector sign_vector{};
  Params sample{1, 1};
  std::string canonical_id;
  std::string curve;  // the vanishing curve for segments
};

SignVector sign_vector(const Params& p, double tol = 1e-12);
std::string region_id(const SignVector& s);

// Throws DomainError naming the required features outside the window.
std::vector<Cell> build_arrangement(const Window& w = {});
Cell locate(const Params& p);

// D1 as a polynomial in (x = c, y = b) and its restrictions to the lines through q1.
BiPoly d1_polynomial();
struct Restriction {
  std::string line;
  BiPoly restricted, expected;
  bool holds() const { return restricted == expected; }
};
std::vector<Restriction> d1_restrictions();

struct CellResult {
  Cell cell;
  int S = -1, R = -1;
  TopoSignature signature;
  std::vector<std::string> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

struct TopoClass {
  std::vector<std::string> members;
  int S = -1, R = -1;
  TopoSignature signature;
  bool q1 = false;
};

struct Census {
  std::vector<CellResult> cells;
  std::vector<TopoClass> classes;
  std::vector<std::string> diff;  // empty when the census matches the expected one
  bool matches() const { return diff.empty(); }
};

// Number of worker threads: hardware concurrency, capped by BRLAB_THREADS.
int worker_threads();

std::vector<CellResult> analyse_cells(const std::vector<Cell>& cells, const SkeletonOptions& opt = {});
Census classify_all(const std::vector<Cell>& cells, const SkeletonOptions& opt = {});
Census group_results(std::vector<CellResult> results);

}  // namespace brlab
