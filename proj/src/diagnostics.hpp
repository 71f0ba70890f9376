#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "metric.hpp"
#include "mesh.hpp"
#include "vec3.hpp"

namespace shapegeo {

// Post-hoc checks on a discrete path: conserved momenta, how far the motion
// is from purely normal, area swept out, and path length.  A quantity at
// timestep t uses the geometry of frame t and the forward increment
// inc = N (f_{t+1} - f_t); momenta are weighted by Phi times vertex area.
struct PathDiagnostics {
  std::vector<Vec3> linearMomentum;         // per timestep
  std::vector<Vec3> angularMomentum;        // components of f ^ f_t
  std::vector<double> scalingMomentum;      // <f, f_t> weighted
  std::vector<double> horizontality;        // tangential / full L2 ratio of inc
  std::vector<double> sweptIncrements;      // normal-speed area advanced per step
  std::vector<double> sweptIncrementsFull;  // same with the full speed |inc|
  std::vector<double> stepEnergy;           // energy contribution of each step
  double sweptArea = 0;
  double sweptAreaFull = 0;
  double pathLength = 0;  // sum_t sqrt(stepEnergy_t / N)
};

PathDiagnostics path_diagnostics(const ShapePath& path, const MetricWeight& w);

struct BoundCheck {
  bool applicable = false;
  double lhs = 0, rhs = 0;
  double margin() const { return rhs - lhs; }
  bool holds() const { return applicable && lhs <= rhs; }
};

// The a priori estimates relating swept area, total surface area and path
// length.  Each bound needs a caller-supplied lower-bound constant for Phi:
// Phi >= C1 + C2 Tr(L)^2 enables the first two, Phi >= C Vol the third.
struct SweptAreaBounds {
  BoundCheck sweptVsMaxVol;  // sqrt(C1) * sweptArea <= max_t sqrt(Vol_t) * L
  BoundCheck volLipschitz;   // |sqrt(Vol_end) - sqrt(Vol_start)| <= L / (2 sqrt(C2))
  BoundCheck sweptVsLength;  // sqrt(C) * sweptArea <= L
};

SweptAreaBounds swept_area_bounds(const ShapePath& path, const MetricWeight& w,
                                  std::optional<double> C1, std::optional<double> C2,
                                  std::optional<double> C);

// Sectional-curvature numerator of the unweighted metric for two normal
// variations with scalar coefficients a1, a2:
//   1/2 sum_F || a1bar grad a2 - a2bar grad a1 ||^2 area(F)
// with piecewise-linear in-plane gradients and face-averaged coefficients.
double g0_curvature_quadrature(const TriMesh& mesh, const Frame& frame,
                               const std::vector<double>& a1, const std::vector<double>& a2);

void write_diagnostics_csv(std::ostream& out, const PathDiagnostics& d);
void write_diagnostics_csv(const std::string& path, const PathDiagnostics& d);

}  // namespace shapegeo
