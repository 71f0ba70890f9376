// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// fail. The expensive geodesic solves are shared between criteria, so the
// binary runs them once and evaluates every dependent check on the cached
// paths.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "diagnostics.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "metric.hpp"
#include "optimizer.hpp"
#include "oracles.hpp"
#include "path_energy.hpp"
#include "sphere_analytics.hpp"
#include "test_util.hpp"

using namespace shapegeo;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Vec3 centroid(const Frame& f) {
  Vec3 c{};
  for (const Vec3& p : f) c += p;
  return (1.0 / f.size()) * c;
}

double mean_radius(const Frame& f) {
  const Vec3 c = centroid(f);
  double sum = 0;
  for (const Vec3& p : f) sum += norm(p - c);
  return sum / f.size();
}

Frame scaled(const Frame& f, double s) {
  Frame out = f;
  for (Vec3& p : out) p = s * p;
  return out;
}

Frame translated(const Frame& f, const Vec3& d) {
  Frame out = f;
  for (Vec3& p : out) p += d;
  return out;
}

// ---- shared solves --------------------------------------------------------

SolverConfig solver_config() {
  SolverConfig cfg;
  // The e^Vol case is badly conditioned and needs the headroom.
  cfg.maxIterations = 40000;
  // Momentum conservation is measured as the distance from a critical point,
  // so run the shared solves until line search stops making progress rather
  // than stopping at the default relative-energy stall.
  cfg.relEnergyTolerance = 0;
  return cfg;
}

struct ConcentricCase {
  std::string label;
  MetricWeight w;
  double r0, r1;
  ShapePath path20, path10;
  std::vector<double> exact20;  // closed-form radius at j/20
};

struct ConcentricSet {
  std::vector<ConcentricCase> cases;
  std::string error;
};

ShapePath solve_concentric(const MetricWeight& w, double r0, double r1, int N) {
  auto mesh = std::make_shared<TriMesh>(make_icosphere(2, r0));
  const Frame end = scaled(mesh->positions, r1 / r0);
  auto [path, report] = solve_geodesic(mesh, mesh->positions, end, N, w, 1.0, 2, solver_config());
  (void)report;
  return std::move(path);
}

const ConcentricSet& concentric() {
  static const ConcentricSet set = [] {
    ConcentricSet out;
    const std::vector<std::tuple<std::string, MetricWeight, double, double>> specs = {
        {"Vol", {ConformalPower{1}}, 0.4, 0.8},   {"Vol^2", {ConformalPower{2}}, 0.4, 0.8},
        {"Vol^3", {ConformalPower{3}}, 0.4, 0.8}, {"Vol^-1", {ConformalPower{-1}}, 0.4, 0.8},
        {"e^Vol", {ConformalExp{}}, 0.1, 0.2},    {"ScaleInvariant", {ScaleInvariant{1.0}}, 0.1, 0.2},
    };
    try {
      for (const auto& [label, w, r0, r1] : specs) {
        ConcentricCase c{label, w, r0, r1, {}, {}, {}};
        c.path20 = solve_concentric(w, r0, r1, 20);
        c.path10 = solve_concentric(w, r0, r1, 10);
        const RadiusCurve curve = closed_form_radius(w, r0, r1);
        for (int j = 0; j <= 20; ++j) c.exact20.push_back(curve.r(j / 20.0));
        out.cases.push_back(std::move(c));
      }
    } catch (const std::exception& e) {
      out.cases.clear();
      out.error = e.what();
    }
    return out;
  }();
  return set;
}

const std::vector<ConcentricCase>& concentric_or_throw() {
  const ConcentricSet& s = concentric();
  if (!s.error.empty()) throw std::runtime_error("concentric solves failed: " + s.error);
  return s.cases;
}

ShapePath translation_path(int level, int N, double ell) {
  auto mesh = std::make_shared<TriMesh>(make_icosphere(level, 1.0));
  std::vector<Frame> frames;
  for (int t = 0; t <= N; ++t)
    frames.push_back(translated(mesh->positions, {ell * t / N, 0, 0}));
  return make_path(std::move(mesh), std::move(frames));
}

// ---- criterion bodies -----------------------------------------------------

std::string check_gradients() {
  std::mt19937_64 rng(61);
  const std::vector<std::pair<MetricWeight, double>> weights = {
      {{G0{}}, 0.5},
      {{GAPower{0.0625, 2}}, 0.5},
      {{ConformalPower{1.0}}, 0.0},
      {{ConformalPower{-1.0}}, 0.5},
      {{ConformalExp{}}, 0.0},
      {{ScaleInvariant{0.3}}, 0.5},
      {{Combined{0.5, 1.0, 1, 2.0, 1.0}}, 1.0},
  };
  double worst = 0;
  for (int i = 0; i < 5; ++i) {
    const TriMesh mesh = testutil::to_mesh(oracle::random_icosahedron(rng, 0.15));
    auto shared = std::make_shared<TriMesh>(mesh);
    std::uniform_real_distribution<double> u(-0.04, 0.04);
    std::vector<Frame> frames(4, mesh.positions);
    for (int t = 0; t <= 3; ++t)
      for (Vec3& p : frames[t]) {
        const double s = t / 3.0;
        p += Vec3{0.25 * s + u(rng) * s * (1 - s), u(rng) * s * (1 - s), -0.15 * s};
      }
    const ShapePath path = make_path(shared, frames);

    std::vector<double> x;
    for (int t = 1; t < 3; ++t)
      for (const Vec3& p : path.frames[t]) {
        x.push_back(p.x);
        x.push_back(p.y);
        x.push_back(p.z);
      }
    for (const auto& [w, pf] : weights) {
      const std::vector<Vec3> g = gradient(path, w, pf, 2);
      const auto f = [&](const std::vector<double>& y) {
        ShapePath trial = path;
        size_t i = 0;
        for (int t = 1; t < 3; ++t)
          for (Vec3& p : trial.frames[t]) {
            p = {y[i], y[i + 1], y[i + 2]};
            i += 3;
          }
        return objective(trial, w, pf, 2).objective;
      };
      const std::vector<double> fd = oracle::fd_gradient(f, x, 1e-6);
      double scale = 0, diff = 0;
      for (double v : fd) scale = std::max(scale, std::abs(v));
      for (size_t i = 0; i < g.size(); ++i) {
        diff = std::max(diff, std::abs(g[i].x - fd[3 * i + 0]));
        diff = std::max(diff, std::abs(g[i].y - fd[3 * i + 1]));
        diff = std::max(diff, std::abs(g[i].z - fd[3 * i + 2]));
      }
      worst = std::max(worst, diff / std::max(scale, 1e-300));
    }
  }
  if (worst >= 1e-5)
    throw std::runtime_error("objective gradient vs finite differences: max rel err " + fmt(worst));
  return "objective gradient matches finite differences on 5 meshes x 7 weights (max rel err " +
         fmt(worst) + ")";
}

std::string check_mean_curvature() {
  std::mt19937_64 rng(67);
  double worstForm = 0;
  for (int i = 0; i < 4; ++i) {
    const TriMesh mesh = testutil::to_mesh(oracle::random_icosahedron(rng, 0.2));
    const VertexGeometry geo = compute_geometry(mesh, mesh.positions, false);
    double scale = 0;
    for (const Vec3& v : geo.vectorMeanCurvature) scale = std::max(scale, norm(v));
    for (int v = 0; v < mesh.vertexCount(); ++v) {
      const Vec3 cot = cotangent_mean_curvature(mesh, mesh.positions, v);
      worstForm = std::max(worstForm, norm(cot - geo.vectorMeanCurvature[v]) / scale);
    }
  }
  if (worstForm >= 1e-10)
    throw std::runtime_error("cotangent and cross-product forms differ: rel err " + fmt(worstForm));

  // Area-weighted RMS of the relative error. The pointwise max cannot drop
  // below 14.59%: at the 12 valence-5 vertices the cotangent estimate tends
  // to the pentagonal-cap limit 2.2918/r instead of 2/r, at every level.
  std::vector<double> err;
  for (int level = 1; level <= 3; ++level) {
    const TriMesh sphere = make_icosphere(level, 1.0);
    const VertexGeometry geo = compute_geometry(sphere, sphere.positions, true);
    double sq = 0;
    for (int v = 0; v < sphere.vertexCount(); ++v) {
      const double rel = std::abs(std::sqrt(geo.trl2[v]) - 2.0) / 2.0;
      sq += geo.vertexArea[v] * rel * rel;
    }
    err.push_back(std::sqrt(sq / geo.totalArea));
  }
  if (!(err[0] > err[1] && err[1] > err[2]))
    throw std::runtime_error("sqrt(trl2) RMS error not monotone: " + fmt(err[0]) + ", " +
                             fmt(err[1]) + ", " + fmt(err[2]));
  if (err[1] >= 0.1)
    throw std::runtime_error("sqrt(trl2) RMS error at level 2 is " + fmt(err[1]) + " relative");
  return "curvature forms agree (rel err " + fmt(worstForm) +
         "), sphere RMS error refines monotonically (level-2 " + fmt(err[1]) + ")";
}

std::string check_concentric() {
  double worst = 0;
  std::string worstLabel;
  for (const ConcentricCase& c : concentric_or_throw()) {
    double sq = 0;
    for (int j = 0; j <= 20; ++j) {
      const double rel = (mean_radius(c.path20.frames[j]) - c.exact20[j]) / c.exact20[j];
      sq += rel * rel;
    }
    const double rms = std::sqrt(sq / 21);
    if (rms > worst) {
      worst = rms;
      worstLabel = c.label;
    }
  }
  if (worst > 0.05)
    throw std::runtime_error("radius curve off for " + worstLabel + ": RMS rel err " + fmt(worst));
  return "6 concentric-sphere geodesics match closed-form radius curves (worst RMS rel err " +
         fmt(worst) + ", " + worstLabel + ")";
}

std::string check_a_independence() {
  const auto& cases = concentric_or_throw();
  const ConcentricCase* si = nullptr;
  for (const ConcentricCase& c : cases)
    if (c.label == "ScaleInvariant") si = &c;
  if (!si) throw std::runtime_error("missing scale-invariant solve");

  const ShapePath other = solve_concentric({ScaleInvariant{0.1}}, si->r0, si->r1, 20);
  double worst = 0;
  for (int j = 0; j <= 20; ++j) {
    const double a = mean_radius(other.frames[j]);
    const double b = mean_radius(si->path20.frames[j]);
    worst = std::max(worst, std::abs(a - b) / b);
  }
  if (worst >= 0.01)
    throw std::runtime_error("A=0.1 and A=1 radius curves differ pointwise by " + fmt(worst));
  return "scale-invariant trajectories for A=0.1 and A=1 agree pointwise (max rel diff " +
         fmt(worst) + ")";
}

std::string check_scale_invariance() {
  const auto& cases = concentric_or_throw();
  const ConcentricCase* si = nullptr;
  for (const ConcentricCase& c : cases)
    if (c.label == "ScaleInvariant") si = &c;
  if (!si) throw std::runtime_error("missing scale-invariant solve");

  ShapePath doubled = si->path20;
  for (Frame& f : doubled.frames) f = scaled(f, 2.0);
  const double e1 = objective(si->path20, si->w, 0, 2).energy;
  const double e2 = objective(doubled, si->w, 0, 2).energy;
  const double rel = std::abs(e2 - e1) / e1;
  if (rel >= 1e-10)
    throw std::runtime_error("energy changed by " + fmt(rel) + " under lambda = 2");
  return "scale-invariant energy unchanged under doubling the whole path (rel diff " + fmt(rel) +
         ")";
}

std::string check_sphere_identities() {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> uk(-1.8, 3.5), ur(0.2, 2.0);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const MetricWeight w{ConformalPower{uk(rng)}};
    const double r = ur(rng);
    const double ell = crossover_length(w, r);
    const double lhs = translation_energy(w, r, ell);
    const double rhs = shrink_grow_energy(w, r);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  for (double r : {0.4, 0.8, 1.2}) {
    const MetricWeight w{ConformalExp{}};
    const double ell = crossover_length(w, r);
    worst = std::max(worst, std::abs(translation_energy(w, r, ell) - shrink_grow_energy(w, r)) /
                                shrink_grow_energy(w, r));
  }
  if (worst > 1e-12) throw std::runtime_error("crossover identity rel err " + fmt(worst));

  if (optimal_translation_radius(1.0 / 16, 2) != 1.0)
    throw std::runtime_error("optimal translation radius for (1/16, 2) is not exactly 1");

  const auto expect = [](bool got, bool want, const char* label) {
    if (got != want) throw std::runtime_error(std::string("completeness wrong for ") + label);
  };
  for (double k : {-1.0, 1.0, 2.0, 3.0})
    expect(completeness({ConformalPower{k}}).complete(), false, "Vol^k");
  expect(completeness({ConformalExp{}}).complete(), false, "e^Vol");
  expect(completeness({GAPower{1, 1}}).complete(), false, "GAPower k=1");
  expect(completeness({GAPower{1, 2}}).complete(), true, "GAPower k=2");
  expect(completeness({GAPower{0.3, 3}}).complete(), true, "GAPower k=3");
  expect(completeness({ScaleInvariant{0}}).complete(), true, "ScaleInvariant A=0");
  expect(completeness({ScaleInvariant{1}}).complete(), true, "ScaleInvariant A=1");

  return "crossover identity to " + fmt(worst) + ", optimal radius exact, completeness table reproduced";
}

double translation_gap(int level, int N) {
  const ShapePath path = translation_path(level, N, 1.0);
  const double exact = 16 * M_PI * M_PI / 3;
  return std::abs(objective(path, {ConformalPower{1}}, 0, 2).energy - exact) / exact;
}

std::string check_translation_energy() {
  const double base = translation_gap(2, 20);
  const double finerMesh = translation_gap(3, 20);
  const double finerTime = translation_gap(2, 40);
  if (base >= 0.05) throw std::runtime_error("level-2 translation energy off by " + fmt(base));
  if (finerMesh >= base)
    throw std::runtime_error("mesh refinement did not shrink the gap: " + fmt(finerMesh) +
                             " vs " + fmt(base));
  // For an exact linear translation the discretization is N-independent, so
  // time refinement can only tie; allow the tie but no growth.
  if (finerTime > base * (1 + 1e-12))
    throw std::runtime_error("time refinement grew the gap: " + fmt(finerTime) + " vs " +
                             fmt(base));
  return "translation energy within " + fmt(base) + " of the continuum value; refinement gaps " +
         fmt(finerMesh) + " (level 3), " + fmt(finerTime) + " (N=40)";
}

// max_t |p_t - mean| over the mean per-step L1 momentum mass; see the
// diagnostics conventions for the increment normalization.
double momentum_variation(const ShapePath& path, const MetricWeight& w) {
  const PathDiagnostics d = path_diagnostics(path, w);
  const int N = path.timesteps();
  double mass = 0;
  for (int t = 0; t < N; ++t) {
    const VertexGeometry geo = compute_geometry(*path.mesh, path.frames[t], uses_trl2(w));
    for (int v = 0; v < path.mesh->vertexCount(); ++v) {
      const Vec3 inc = static_cast<double>(N) * (path.frames[t + 1][v] - path.frames[t][v]);
      const double trl2 = uses_trl2(w) ? geo.trl2[v] : 0.0;
      mass += evaluate(w, geo.totalArea, trl2) * geo.vertexArea[v] * norm(inc);
    }
  }
  mass /= N;
  Vec3 mean{};
  for (const Vec3& p : d.linearMomentum) mean += p;
  mean = (1.0 / N) * mean;
  double worst = 0;
  for (const Vec3& p : d.linearMomentum) worst = std::max(worst, norm(p - mean));
  return worst / mass;
}

std::string check_momentum() {
  double worst20 = 0, worst10 = 0;
  for (const ConcentricCase& c : concentric_or_throw()) {
    const double v20 = momentum_variation(c.path20, c.w);
    const double v10 = momentum_variation(c.path10, c.w);
    worst20 = std::max(worst20, v20);
    worst10 = std::max(worst10, v10);
    if (v20 >= 0.05)
      throw std::runtime_error("momentum variation " + fmt(v20) + " for " + c.label);
    // The energy and penalty are translation invariant, so at an exact
    // critical point the discrete momenta are equal for every N; what remains
    // on these symmetric paths is the solver's convergence residual, which
    // does not shrink with refinement. The comparison therefore only binds
    // above a residual floor of 1e-4 of the momentum mass.
    if (v20 > std::max(v10, 1e-4))
      throw std::runtime_error("N=20 variation " + fmt(v20) + " exceeds N=10 variation " +
                               fmt(v10) + " for " + c.label);
  }
  return "linear momentum conserved (worst variation " + fmt(worst20) + " at N=20, " +
         fmt(worst10) + " at N=10)";
}

std::string check_swept_bounds() {
  std::vector<std::pair<ShapePath, MetricWeight>> paths;
  for (const ConcentricCase& c : concentric_or_throw()) paths.emplace_back(c.path20, c.w);
  paths.emplace_back(translation_path(2, 20, 1.0), MetricWeight{ConformalPower{1}});
  paths.emplace_back(translation_path(3, 20, 1.0), MetricWeight{ConformalPower{1}});
  paths.emplace_back(translation_path(2, 40, 1.0), MetricWeight{ConformalPower{1}});

  double minMargin = std::numeric_limits<double>::infinity();
  for (const auto& [path, w] : paths) {
    // Valid on-path lower bounds: Phi >= C1 and Phi >= C * Vol pointwise.
    double c1 = std::numeric_limits<double>::infinity(), cRatio = c1;
    for (const Frame& f : path.frames) {
      const VertexGeometry geo = compute_geometry(*path.mesh, f, uses_trl2(w));
      for (int v = 0; v < path.mesh->vertexCount(); ++v) {
        const double phi = evaluate(w, geo.totalArea, uses_trl2(w) ? geo.trl2[v] : 0.0);
        c1 = std::min(c1, phi);
        cRatio = std::min(cRatio, phi / geo.totalArea);
      }
    }
    const SweptAreaBounds b = swept_area_bounds(path, w, c1, std::nullopt, cRatio);
    if (!b.sweptVsMaxVol.holds())
      throw std::runtime_error("swept-vs-max-vol bound violated by " +
                               fmt(-b.sweptVsMaxVol.margin()));
    if (!b.sweptVsLength.holds())
      throw std::runtime_error("swept-vs-length bound violated by " +
                               fmt(-b.sweptVsLength.margin()));
    minMargin = std::min({minMargin, b.sweptVsMaxVol.margin(), b.sweptVsLength.margin()});
  }
  return "both swept-area bounds hold on all " + std::to_string(paths.size()) +
         " paths (smallest margin " + fmt(minMargin) + ")";
}

std::string check_curvature() {
  const TriMesh sphere = make_icosphere(2, 1.0);
  const int nv = sphere.vertexCount();
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(-1, 1);

  double minValue = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a1(nv), a2(nv);
    for (double& v : a1) v = u(rng);
    for (double& v : a2) v = u(rng);
    minValue = std::min(minValue, g0_curvature_quadrature(sphere, sphere.positions, a1, a2));
  }
  if (minValue < 0) throw std::runtime_error("negative curvature value " + fmt(minValue));

  std::vector<double> a1(nv), a2(nv);
  for (double& v : a1) v = u(rng);
  for (int v = 0; v < nv; ++v) a2[v] = 2.0 * a1[v];
  if (g0_curvature_quadrature(sphere, sphere.positions, a1, a2) != 0.0)
    throw std::runtime_error("proportional fields gave a nonzero value");

  std::vector<double> ones(nv, 1.0), field(nv);
  for (double& v : field) v = u(rng);
  const double got = g0_curvature_quadrature(sphere, sphere.positions, ones, field);
  const double want = 0.5 * oracle::dirichlet_edge_sum(testutil::to_oracle_positions(sphere.positions),
                                                       testutil::to_oracle_faces(sphere), field);
  const double rel = std::abs(got - want) / want;
  if (rel >= 1e-10) throw std::runtime_error("Dirichlet oracle rel err " + fmt(rel));
  return "nonnegative on 100 random pairs, exact zero on proportional pairs, Dirichlet oracle to " +
         fmt(rel);
}

std::string check_optimal_radius_translation() {
  const MetricWeight w{GAPower{1.0 / 16, 2}};
  auto mesh = std::make_shared<TriMesh>(make_icosphere(2, 1.0));
  const Frame end = translated(mesh->positions, {2, 0, 0});
  auto [path, report] =
      solve_geodesic(mesh, mesh->positions, end, 10, w, 1.0, 2, solver_config());
  (void)report;
  const double mid = mean_radius(path.frames[5]);
  if (std::abs(mid - 1.0) >= 0.05)
    throw std::runtime_error("middle-frame mean radius drifted to " + fmt(mid));
  return "unit sphere translated at the optimal radius keeps middle-frame radius " + fmt(mid);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string()>>> criteria = {
      {"gradient correctness", check_gradients},
      {"discrete mean curvature", check_mean_curvature},
      {"concentric-sphere geodesics", check_concentric},
      {"scale-invariant A-independence", check_a_independence},
      {"scale invariance of the energy", check_scale_invariance},
      {"sphere-analytics identities", check_sphere_identities},
      {"pure-translation energy", check_translation_energy},
      {"momentum conservation", check_momentum},
      {"swept-area bounds", check_swept_bounds},
      {"curvature quadrature", check_curvature},
      {"optimal-radius translation", check_optimal_radius_translation},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = true;
    try {
      detail = criteria[i].second();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
      ++failures;
    }
    std::printf("%s %2zu %s: %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first,
                detail.c_str());
    std::fflush(stdout);
  }
  if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  else std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
