#pragma once

#include <string>

#include <json.hpp>

#include "brlab/bifurcation.hpp"
#include "brlab/flow.hpp"

namespace brlab {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr unsigned long kDefaultSeed = 20240601UL;

struct ReportOptions {
  unsigned long seed = kDefaultSeed;
  SkeletonOptions skeleton;
  int cycle_seeds = 0;  // 0 skips the limit-cycle scan
};

// Full analysis report; the skeleton is returned through sk when given.
Json classify_report(const Params& p, const ReportOptions& opt = {}, Skeleton* sk = nullptr);

// Sorted keys, shortest round-trip floats, two-space indent, trailing newline.
std::string dump(const Json& j);

struct PortraitOptions {
  int seeds = 0;  // extra orbits from random seeds
  unsigned long seed = kDefaultSeed;
  double tol = 1e-9;
};
std::string portrait_svg(const Skeleton& sk, const PortraitOptions& opt = {});

Json census_json(const Census& cs, const Window& w);
std::string sweep_svg(const Census& cs, const Window& w, int grid);

// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace brlab
