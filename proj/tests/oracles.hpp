// Self-contained reference implementations used to validate the library.
// Everything here is written directly from the defining formulas and kept
// independent of the code under test: plain loops over raw vertex/face
// arrays, no shared headers with src/.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using V3 = std::array<double, 3>;
using Tri = std::array<int, 3>;

inline V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const V3& a) { return std::sqrt(dot(a, a)); }

// Central finite-difference gradient of a scalar function of a flat vector.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

inline double total_area(const std::vector<V3>& pos, const std::vector<Tri>& faces) {
  double a = 0;
  for (const Tri& f : faces)
    a += 0.5 * norm(cross(sub(pos[f[1]], pos[f[0]]), sub(pos[f[2]], pos[f[0]])));
  return a;
}

inline double enclosed_volume(const std::vector<V3>& pos, const std::vector<Tri>& faces) {
  double v = 0;
  for (const Tri& f : faces) v += dot(pos[f[0]], cross(pos[f[1]], pos[f[2]])) / 6.0;
  return v;
}

// Dirichlet energy of a vertex scalar via the cotangent edge sum:
// integral of |grad a|^2 over the mesh = 1/2 sum over edges (cot alpha + cot beta) (a_i - a_j)^2.
// Angles are computed directly from corner vectors, nothing shared with the
// piecewise-linear gradient route.
inline double dirichlet_edge_sum(const std::vector<V3>& pos, const std::vector<Tri>& faces,
                                 const std::vector<double>& a) {
  std::map<std::pair<int, int>, double> cotSum;
  for (const Tri& f : faces) {
    for (int c = 0; c < 3; ++c) {
      const int apex = f[c], i = f[(c + 1) % 3], j = f[(c + 2) % 3];
      const V3 u = sub(pos[i], pos[apex]), w = sub(pos[j], pos[apex]);
      const double cot = dot(u, w) / norm(cross(u, w));
      cotSum[{std::min(i, j), std::max(i, j)}] += cot;
    }
  }
  double e = 0;
  for (const auto& [edge, cot] : cotSum) {
    const double d = a[edge.first] - a[edge.second];
    e += 0.5 * cot * d * d;
  }
  return e;
}

// Angle-deviation penalty of one frame, computed straight from face corners:
// each face contributes, at each of its corners v, |cos(corner angle) - cos(2 pi / deg v)|^ex.
inline double angle_penalty(const std::vector<V3>& pos, const std::vector<Tri>& faces, int exponent) {
  std::vector<int> degree(pos.size(), 0);
  for (const Tri& f : faces)
    for (int c = 0; c < 3; ++c) degree[f[c]]++;
  double p = 0;
  for (const Tri& f : faces) {
    for (int c = 0; c < 3; ++c) {
      const int v = f[c], i = f[(c + 1) % 3], j = f[(c + 2) % 3];
      const V3 u = sub(pos[i], pos[v]), w = sub(pos[j], pos[v]);
      const double cosang = dot(u, w) / (norm(u) * norm(w));
      const double dev = std::abs(cosang - std::cos(2 * M_PI / degree[v]));
      p += std::pow(dev, exponent);
    }
  }
  return p;
}

// Surface area of the radius-r sphere in R^n.
inline double sphere_area(double r, int n = 3) {
  return n * std::pow(M_PI, n / 2.0) * std::pow(r, n - 1) / std::tgamma(1 + n / 2.0);
}

// Radius trajectories solving the concentric-sphere geodesic equation,
// re-derived by hand from the ODE and frozen here:
//   Phi = Vol^k : r^{k+2} is affine in t (k = -2: log r affine).
//   Phi = e^Vol : e^{2 pi r^2} is affine in t.
//   scale-invariant: log r affine in t.
inline double radius_conformal_power(double k, double r0, double r1, double t) {
  if (k == -2.0) return r0 * std::pow(r1 / r0, t);
  const double p = k + 2;
  return std::pow(std::pow(r0, p) + t * (std::pow(r1, p) - std::pow(r0, p)), 1.0 / p);
}
inline double radius_conformal_exp(double r0, double r1, double t) {
  const double e0 = std::exp(2 * M_PI * r0 * r0), e1 = std::exp(2 * M_PI * r1 * r1);
  return std::sqrt(std::log((1 - t) * e0 + t * e1) / (2 * M_PI));
}
inline double radius_scale_invariant(double r0, double r1, double t) {
  return r0 * std::pow(r1 / r0, t);
}

// Energy of shrinking a sphere to a point and regrowing it, as a quadrature:
// the radial metric coefficient is Phi(area(r), -2/r) * area(r), the one-way
// length is Lambda(r) = integral_0^r sqrt(coefficient), and the constant-speed
// path over unit time has energy (2 Lambda)^2.
inline double shrink_grow_quadrature(const std::function<double(double, double)>& phi, double r) {
  auto integrand = [&](double rho) {
    return std::sqrt(phi(sphere_area(rho), -2.0 / rho) * sphere_area(rho));
  };
  const double lambda =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, r, 12, 1e-12);
  return 4 * lambda * lambda;
}

// Closed forms from the same derivation, for cross-checking the quadrature.
inline double shrink_grow_conformal_power(double k, double r) {
  return std::pow(4.0, k + 2) * std::pow(M_PI, k + 1) / ((k + 2) * (k + 2)) * std::pow(r, 2 * k + 4);
}
inline double shrink_grow_conformal_exp(double r) {
  const double e = std::exp(2 * M_PI * r * r) - 1;
  return e * e / M_PI;
}

inline double translation_energy(const std::function<double(double, double)>& phi, double r, double l) {
  return phi(sphere_area(r), -2.0 / r) * (4 * M_PI / 3) * l * l * r * r;
}

struct RandomMesh {
  std::vector<V3> positions;
  std::vector<Tri> faces;
};

// A small closed random mesh: an icosahedron (12 vertices, 20 faces) with
// vertices pushed radially and tangentially by bounded random amounts. Stays
// embedded and non-degenerate for amplitudes below ~0.3.
inline RandomMesh random_icosahedron(std::mt19937_64& rng, double amplitude) {
  const double phi = (1 + std::sqrt(5.0)) / 2;
  std::vector<V3> p = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                       {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                       {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<Tri> f = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                        {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                        {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                        {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  for (V3& q : p) {
    const double s = 1.0 / norm(q);
    for (double& c : q) c *= s;                       // unit sphere
    V3 d = {u(rng), u(rng), u(rng)};
    for (int i = 0; i < 3; ++i) q[i] += d[i];
  }
  return {p, f};
}

}  // namespace oracle
