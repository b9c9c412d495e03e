#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "brlab/bifurcation.hpp"
#include "brlab/darboux.hpp"
#include "brlab/report.hpp"

using namespace brlab;

namespace {

Rational parse_rational(const std::string& s) {
  if (s.find('/') != std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0 || r.get_den() == 0) throw DomainError("not a rational: " + s);
    r.canonicalize();
    return r;
  }
  return exact_rational(std::stod(s));
}

int print_table(const std::vector<VerificationRow>& rows) {
  bool all = true;
  for (const auto& r : rows) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  [" << r.where << "]";
    if (!r.pass) std::cout << "  residual: " << r.residual;
    std::cout << "\n";
    all &= r.pass;
  }
  std::cout << (all ? "all identities hold" : "some identities FAIL") << "\n";
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Basener-Ross phase portrait laboratory"};
  app.require_subcommand(1);

  double b = 0, c = 0;
  unsigned long seed = kDefaultSeed;

  auto* classify = app.add_subcommand("classify", "analyse one parameter point");
  std::string json_out;
  int cycle_seeds = 0;
  classify->add_option("--b", b, "b > -1")->required();
  classify->add_option("--c", c, "c > 0")->required();
  classify->add_option("--json", json_out, "write the report to this file instead of stdout");
  classify->add_option("--seed", seed, "random seed");
  classify->add_option("--cycles", cycle_seeds, "seeds for a limit-cycle scan (0 = skip)");

  auto* portrait = app.add_subcommand("portrait", "draw the phase portrait on the Poincare disc");
  std::string svg_out;
  int seeds = 0;
  double tol = 1e-9;
  portrait->add_option("--b", b, "b > -1")->required();
  portrait->add_option("--c", c, "c > 0")->required();
  portrait->add_option("--out", svg_out, "SVG file")->required();
  portrait->add_option("--seeds", seeds, "additional random orbits");
  portrait->add_option("--tol", tol, "integrator tolerance");
  portrait->add_option("--seed", seed, "random seed");

  auto* sweep = app.add_subcommand("sweep", "bifurcation diagram and class census");
  Window w;
  int grid = 100;
  std::string out_dir;
  sweep->add_option("--c-min", w.c_min);
  sweep->add_option("--c-max", w.c_max);
  sweep->add_option("--b-min", w.b_min);
  sweep->add_option("--b-max", w.b_max);
  sweep->add_option("--grid", grid, "shading resolution")->check(CLI::Range(2, 2000));
  sweep->add_option("--out", out_dir, "output directory")->required();

  auto* verify = app.add_subcommand("verify-darboux", "check the invariant curves and their combinations");
  bool exact = false, tampered = false;
  std::string rb, rc;
  verify->add_flag("--exact", exact, "verify at the given rational parameters");
  verify->add_option("--b", rb, "rational b, e.g. 1/3");
  verify->add_option("--c", rc, "rational c, e.g. 6/5");
  verify->add_flag("--tampered", tampered, "self-test with a corrupted catalog (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*classify) {
      Params p(b, c);
      ReportOptions opt;
      opt.seed = seed;
      opt.cycle_seeds = cycle_seeds;
      Json j = classify_report(p, opt);
      if (json_out.empty())
        std::cout << dump(j);
      else
        write_atomic(json_out, dump(j));
      return j["diagnostics"].empty() ? 0 : 3;
    }
    if (*portrait) {
      if (tol < 1e-12 || tol > 1e-3) throw DomainError("--tol must lie in [1e-12, 1e-3]");
      if (seeds < 0) throw DomainError("--seeds must be non-negative");
      Params p(b, c);
      SkeletonOptions so;
      so.flow.tol = tol;
      Skeleton sk = trace_separatrices(p, so);
      write_atomic(svg_out, portrait_svg(sk, {seeds, seed, tol}));
      if (!sk.complete()) {
        for (auto& d : sk.diagnostics) std::cerr << "diagnostic: " << d << "\n";
        return 3;
      }
      return 0;
    }
    if (*sweep) {
      std::vector<Cell> cells = build_arrangement(w);
      Census cs = classify_all(cells);
      std::filesystem::create_directories(out_dir);
      write_atomic(out_dir + "/census.json", dump(census_json(cs, w)));
      write_atomic(out_dir + "/bifurcation.svg", sweep_svg(cs, w, grid));
      std::cout << cs.cells.size() << " cells, " << cs.classes.size() << " classes\n";
      for (auto& d : cs.diff) std::cout << "census: " << d << "\n";
      for (auto& r : cs.cells)
        if (!r.ok()) return 3;
      return 0;
    }
    if (*verify) {
      std::vector<CatalogEntry> cat = catalog();
      if (tampered) {
        // perturb one curve: f2 gains a stray term
        auto orig = cat[1].curve;
        cat[1].curve = [orig](const RationalParams& rp) { return orig(rp) + BiPoly::monomial(1, 0, Rational(1, 7)); };
      }
      if (!rb.empty() || !rc.empty()) {
        if (rb.empty() || rc.empty()) throw DomainError("--b and --c must be given together");
        RationalParams rp{parse_rational(rb), parse_rational(rc)};
        to_params(rp);  // domain check
        return print_table(verification_table_at(cat, rp));
      }
      (void)exact;
      return print_table(verification_table(cat));
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
