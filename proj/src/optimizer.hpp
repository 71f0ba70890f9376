#pragma once

#include <vector>

#include "mesh.hpp"
#include "metric.hpp"
#include "path_energy.hpp"

namespace shapegeo {

struct SolverConfig {
  int maxIterations = 2000;
  // Infinity-norm threshold on the objective gradient. 0 picks
  // 1e-6 x (bounding-box diagonal of the endpoint frames).
  double gradTolerance = 0;
  double relEnergyTolerance = 1e-10;
  int memory = 10;        // quasi-Newton history length
  double c1 = 1e-4;       // sufficient-decrease parameter
  double c2 = 0.9;        // curvature parameter
  bool verbose = false;   // progress lines "iter k objective g_inf step" on stderr
};

enum class Termination { Converged, MaxIterations, LineSearchFailure };

const char* termination_name(Termination t);

struct SolveReport {
  int iterations = 0;
  EnergyBreakdown final;
  double gradInfNorm = 0;
  Termination reason = Termination::Converged;
  std::vector<double> energyHistory;  // objective after each accepted iterate
};

enum class PathInit { Linear, Provided };

// frame_t = (1 - t/N) start + (t/N) end per vertex. Throws DegenerateFrame if
// the interpolation crosses the area floor.
ShapePath initialize_path(std::shared_ptr<const TriMesh> mesh, const Frame& start, const Frame& end,
                          int timesteps);

// Minimizes energy + penaltyFactor * penalty over the interior frames with a
// limited-memory quasi-Newton iteration and a strong Wolfe line search. Steps
// that would push any frame below the face-area floor are rejected and the
// line search backtracks; DegenerateFrameEncountered is raised only when no
// admissible step exists at all.
std::pair<ShapePath, SolveReport> solve_geodesic(std::shared_ptr<const TriMesh> mesh, const Frame& start,
                                                 const Frame& end, int timesteps, const MetricWeight& w,
                                                 double penaltyFactor, int penaltyExponent,
                                                 const SolverConfig& config,
                                                 const ShapePath* providedInit = nullptr);

}  // namespace shapegeo
