#pragma once

// Exact theory of geodesics in the space of concentric spheres, plus the
// translation-vs-shrink-and-grow comparison for sphere paths.  A sphere of
// radius r in R^n has surface volume n pi^{n/2} r^{n-1} / Gamma(1 + n/2) and
// trace of the shape operator -(n-1)/r; restricted to concentric spheres the
// geodesic equation collapses to a scalar ODE in r(t).  These routines serve
// as the independent ground truth the mesh optimizer is validated against.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "metric.hpp"

namespace shapegeo {

// Surface volume of the radius-r sphere in R^n.
double sphere_volume(double r, int n = 3);

// Right-hand side of the radius geodesic ODE:
//   r_tt = -r_t^2 ((n-1)/Phi) [ Phi/(2r)
//                               + (d1Phi/2) n pi^{n/2} r^{n-2} / Gamma(1+n/2)
//                               + d2Phi/(2 r^2) ]
// with Phi and its partials evaluated at (Vol(r), Tr L = -(n-1)/r).
double radius_ode_rhs(double r, double rdot, const MetricWeight& w, int n = 3);

struct RadiusCurve {
  std::function<double(double)> r;     // t in [0,1]
  std::function<double(double)> rdot;
  bool analytic = true;  // false when a numerical fallback replaced the printed form
};

// Boundary-value solution r(0)=r0, r(1)=r1 for the weights admitting closed
// forms (ConformalPower, ConformalExp, ScaleInvariant).  The ConformalExp
// form is validated against the ODE residual; if no scaling of the printed
// formula satisfies the equation, a shooting fallback is used.
RadiusCurve closed_form_radius(const MetricWeight& w, double r0, double r1);

struct Completeness {
  bool completeAtZero = false;      // radius cannot reach 0 at finite path length
  bool completeAtInfinity = false;  // radius cannot reach infinity at finite path length
  bool complete() const { return completeAtZero && completeAtInfinity; }
};

// Classification by divergence of int r^{(n-1)/2} sqrt(Phi) dr at each end,
// decided by exponent analysis and confirmed by a quadrature trend.
Completeness completeness(const MetricWeight& w, int n = 3);

// Energy of translating the radius-r sphere by distance ell (n = 3).
double translation_energy(const MetricWeight& w, double r, double ell);

// Energy of shrinking the radius-r sphere to a point and regrowing it.
double shrink_grow_energy(const MetricWeight& w, double r);

// Translation distance at which both strategies cost the same.
double crossover_length(const MetricWeight& w, double r);

// Radius at which pure translation of a sphere is a geodesic for
// Phi = 1 + A Tr(L)^{2k}; only exists for k > 1.
double optimal_translation_radius(double A, int k);

struct OdeSample {
  double t = 0, r = 0, rdot = 0;
};

struct OdeResult {
  std::vector<OdeSample> samples;
  bool collapsed = false;  // radius hit zero before tEnd; samples are truncated
};

OdeResult integrate_radius_ode(const MetricWeight& w, double r0, double rdot0, double tEnd,
                               int n = 3, int sampleCount = 101);

void write_radius_csv(std::ostream& out, const OdeResult& result);
void write_radius_csv(const std::string& path, const OdeResult& result);

}  // namespace shapegeo
