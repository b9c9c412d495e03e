#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "brlab/compactify.hpp"
#include "brlab/integrator.hpp"
#include "brlab/local_analysis.hpp"

namespace brlab {

// Field on the sphere, given chart by chart.
using ChartField = std::function<Vec2(ChartId, double, double)>;

struct FlowNode {
  std::string id;     // P0, P1, P2, U1, U2, V1, V2
  Vec3 pos;           // on the sphere
  std::string label;  // topological type, see node_label()
  bool infinite = false;
  bool snap = false;  // has hyperbolic sectors: separatrix traces are absorbed within snap radius
  // Hyperbolic saddles: an orbit following a saddle connection passes the target at a
  // distance ~ err^(1/(1+ratio)), ratio = |outgoing/incoming eigenvalue|, so the
  // capture radius is widened to capture_factor * tol^exponent (capped at capture_max).
  double capture_exp_fwd = 0, capture_exp_bwd = 0, capture_max = 0;
};

struct FlowOptions {
  double tol = 1e-9;
  double max_disc_step = 0.01;
  double terminate_radius = 1e-6;
  double snap_radius = 1e-5;
  bool use_snap = false;
  double arm_radius = 1e-4;  // an ignored start node becomes a target once the orbit is this far away
  double t_max = 1e4;
  long max_steps = 400000;
  double near_node_factor = 0.25;  // step displacement <= factor * distance to nearest node
  double capture_factor = 8;
  bool arc_length = false;  // integrate the unit field (t becomes chart arc length)
};

struct FlowContext {
  Params params;
  ChartField field;
  std::vector<FlowNode> nodes;
  bool singular_line = false;  // q1: every point of x = 0 is singular
  // Degree d of the field. Chart fields are multiplied by (1 + |z|^2)^(-(d-1)/2) during
  // integration, which makes time the same in every chart.
  int degree = 2;
};

FlowContext make_context(const Params& p);

enum class Direction { forward, backward };

struct Termination {
  enum Kind { singular_point, infinity_point, singular_line, t_max, step_underflow, max_steps } kind = t_max;
  std::string node;  // id when a node was reached
};
std::string to_string(const Termination& t);

struct Orbit {
  std::vector<double> t;
  std::vector<Vec3> pts;  // sphere points, y3 >= 0
  Termination termination;
  std::vector<std::pair<double, ChartId>> chart_history;
  double max_switch_jump = 0;  // largest disc discontinuity at a chart switch

  std::vector<std::pair<double, DiscPoint>> samples() const;
};

double sphere_dist(const Vec3& a, const Vec3& b);

Orbit integrate(const FlowContext& ctx, const Vec3& start, Direction dir, const FlowOptions& opt,
                int ignore_node = -1);
Orbit integrate(const Params& p, DiscPoint start, Direction dir, double t_max, double tol);

// Forward for time t, then backward for time t. kappa estimates the amplification of the
// backward map at the forward end point by finite differences; the round-trip error is
// only meaningful where kappa is moderate.
struct RoundTrip {
  bool completed = false;  // both legs reached t without terminating
  double error = 0;        // disc distance between start and return
  double kappa = 0;
};
RoundTrip round_trip(const Params& p, DiscPoint start, double t, double tol);

// Event-located return to the half line {y = y0, x > x0} (plane chart), going around once.
// Returns the x coordinate of the first return or nullopt.
std::optional<double> plane_return(const Params& p, PlanePoint start, double tol, double t_max = 200);

// ---- sector probing ---------------------------------------------------------

using LocalField = std::function<Vec2(double, double)>;

enum class SectorType { hyperbolic, elliptic, parabolic };
std::string to_string(SectorType s);

struct Sector {
  SectorType type;
  double theta_begin, theta_end;
};

struct ProbeOptions {
  int seeds = 720;
  std::vector<double> radii = {1e-2, 1e-3, 1e-4};
  int w1 = 1, w2 = 1;  // quasi-homogeneous weights, (1,1) or (1,2)
  double theta_min = 0, theta_max = 6.283185307179586;
  bool full_circle = true;  // otherwise [theta_min, theta_max] is an arc whose ends lie on invariant lines
  double outer_limit = 1e300;  // cap on the exit radius (distance to other singular points)
  double in_factor = 1e-2, out_factor = 1e2;
  std::vector<double> extra_angles;  // e.g. eigen-directions
};

struct SeedBehaviour {
  int fwd = 0, bwd = 0;  // +1 out, -1 in, 0 unresolved
  double fwd_angle = 0, bwd_angle = 0;  // quasi-polar exit angle when out
};

struct SectorBoundary {
  double theta;
  bool trace_forward;   // separatrix leaves the point
  bool trace_backward;  // separatrix enters the point
};

struct ProbeResult {
  std::vector<Sector> sectors;
  std::vector<SectorBoundary> boundaries;  // interior separatrix seeds at radius_used
  double radius_used = 0;
  bool stable = false;
  std::string diagnostic;

  int count(SectorType t) const;
};

ProbeResult sector_probe(const LocalField& f, Vec2 point, const ProbeOptions& opt);
Vec2 quasi_point(Vec2 center, double r, double theta, int w1, int w2);

// ---- skeleton ---------------------------------------------------------------

struct SkeletonEdge {
  int from, to;  // node indices (flow direction from -> to)
  std::vector<Vec3> poly;  // from node position to node position
  bool arc = false;        // part of the boundary circle
  bool undirected = false; // line of singular points (q1)
};

struct FaceInfo {
  std::vector<int> darts;  // boundary walk (dart index = 2*edge + end)
  std::string rep_kind;    // "flow", "periodic", "line", "unknown"
  int alpha = -1, omega = -1;  // node indices of the representative orbit
  std::vector<int> contents;  // isolated nodes inside the face
  Vec3 rep_point{0, 0, 1};
  bool outer = false;
};

struct Skeleton {
  Params params;
  std::vector<FlowNode> nodes{};
  std::vector<SkeletonEdge> edges{};
  std::vector<std::vector<int>> rotation{};  // per node, darts in counterclockwise order
  std::vector<FaceInfo> faces{};
  int components = 0;
  int finite_points = 0;
  int limit_cycles = 0;
  int regions_euler = -1;
  int regions_fill = -1;
  std::vector<std::string> diagnostics{};
  std::vector<Orbit> representatives{};

  bool complete() const { return diagnostics.empty(); }
};

struct SkeletonOptions {
  FlowOptions flow;
  int probe_seeds = 360;
  int raster = 512;
};

Skeleton trace_separatrices(const Params& p, const SkeletonOptions& opt = {});

// Leading part of a path that winds once about centre (the whole path if it never does).
std::vector<Vec3> first_turn(const std::vector<Vec3>& pts, DiscPoint centre);

struct SRCount {
  int S, R;
};
// throws std::runtime_error when the skeleton carries diagnostics
SRCount count_SR(const Skeleton& sk);

// ---- signatures -------------------------------------------------------------

struct TopoSignature {
  std::string direct;     // canonical code, orientation kept
  std::string mirrored;   // canonical code of the reflected disc
  std::string reversed;   // canonical code with all orbits reversed (min over reflections)
  std::string canonical() const { return std::min(direct, mirrored); }
  std::string hash() const;
};

TopoSignature signature(const Skeleton& sk);

struct Equivalence {
  bool equivalent = false;  // flow direction preserved, reflection allowed
  std::string variant;      // "orientation-preserving", "reflection", "time-reversal", "none"
  bool time_reversed_equivalent = false;
};
Equivalence compare_signatures(const TopoSignature& a, const TopoSignature& b);
bool signatures_equivalent(const TopoSignature& a, const TopoSignature& b);

// ---- limit cycles -----------------------------------------------------------

struct CycleFinding {
  DiscPoint seed;
  Direction dir;
  double radius;  // distance of the cycle from the recurrence centre, disc units
};

struct LimitCycleReport {
  int seeds = 0;
  int recurrent = 0;  // orbits that did not reach a singular point
  int non_isolated = 0;  // periodic orbits belonging to a continuum (centre)
  std::vector<CycleFinding> cycles;
};

LimitCycleReport limit_cycle_scan(const Params& p, int seeds = 100, unsigned long seed = 20240601UL);
// Generic detector used by the scan; field given in the plane chart only.
LimitCycleReport detect_cycles(const FlowContext& ctx, const std::vector<DiscPoint>& seeds,
                               const FlowOptions& opt);

}  // namespace brlab
