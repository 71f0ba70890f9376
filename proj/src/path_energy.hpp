#pragma once

#include <vector>

#include "geometry.hpp"
#include "mesh.hpp"
#include "metric.hpp"

namespace shapegeo {

struct EnergyBreakdown {
  double energy = 0;
  double penalty = 0;
  double objective = 0;  // energy + penaltyFactor * penalty
  std::vector<double> perTimestepEnergy;
};

// Discrete horizontal path energy with forward/backward symmetrized
// increments inc_t(v) = N (f_{t+1}(v) - f_t(v)):
//
//   E = 1/(12 N) sum_{t=0}^{N-1} sum_v [
//         Phi_t(v)     sum_{F at v} (inc_t(v) . cross_t(F))^2     / |cross_t(F)|
//       + Phi_{t+1}(v) sum_{F at v} (inc_t(v) . cross_{t+1}(F))^2 / |cross_{t+1}(F)| ]
//
// with Phi_t(v) = Phi(totalArea_t, trl2_t(v)).
double path_energy(const ShapePath& path, const MetricWeight& w);

// Mesh-regularity penalty summed over every timestep (endpoints included),
// vertex, and consecutive emanating-edge pair:
//   |cos(angle(e1, e2)) - cos(2 pi / deg v)|^exponent.
double penalty(const ShapePath& path, int exponent);

EnergyBreakdown objective(const ShapePath& path, const MetricWeight& w, double penaltyFactor,
                          int penaltyExponent);

// Analytic gradient of the objective with respect to the interior frames,
// flattened as grad[(t-1) * |V| + v] for t = 1..N-1. The Vol dependence of
// Phi makes this non-local: every vertex of a frame contributes a term
// through the frame's total area.
std::vector<Vec3> gradient(const ShapePath& path, const MetricWeight& w, double penaltyFactor,
                           int penaltyExponent);

// Single forward+backward pass used by the solver.
EnergyBreakdown objective_with_gradient(const ShapePath& path, const MetricWeight& w,
                                        double penaltyFactor, int penaltyExponent,
                                        std::vector<Vec3>& grad);

}  // namespace shapegeo
