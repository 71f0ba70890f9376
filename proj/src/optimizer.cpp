#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

#include "numfmt.hpp"

namespace shapegeo {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::LineSearchFailure: return "LineSearchFailure";
  }
  return "Unknown";
}

ShapePath initialize_path(std::shared_ptr<const TriMesh> mesh, const Frame& start, const Frame& end,
                          int timesteps) {
  if (timesteps < 2) fail(ErrorCode::InvalidArgument, "need at least 2 timesteps");
  validate_frame(*mesh, start, "start frame");
  validate_frame(*mesh, end, "end frame");
  const int nv = mesh->vertexCount();
  std::vector<Frame> frames(timesteps + 1, Frame(nv));
  for (int t = 0; t <= timesteps; ++t) {
    const double a = static_cast<double>(t) / timesteps;
    for (int v = 0; v < nv; ++v) frames[t][v] = (1 - a) * start[v] + a * end[v];
  }
  ShapePath path{std::move(mesh), std::move(frames)};
  for (int t = 1; t < timesteps; ++t)
    if (!frame_is_admissible(*path.mesh, path.frames[t]))
      fail(ErrorCode::DegenerateFrame,
           "linear interpolation degenerates at timestep " + std::to_string(t) +
               "; supply an explicit initial path");
  return path;
}

namespace {

struct FlatProblem {
  ShapePath path;  // working copy; interior frames are overwritten from x
  const MetricWeight* w = nullptr;
  double penaltyFactor = 1;
  int penaltyExponent = 2;
  int nv = 0;
  int N = 0;

  size_t size() const { return static_cast<size_t>(N - 1) * nv * 3; }

  void unpack(const std::vector<double>& x) {
    size_t i = 0;
    for (int t = 1; t < N; ++t)
      for (int v = 0; v < nv; ++v) {
        path.frames[t][v] = {x[i], x[i + 1], x[i + 2]};
        i += 3;
      }
  }

  std::vector<double> pack() const {
    std::vector<double> x(size());
    size_t i = 0;
    for (int t = 1; t < N; ++t)
      for (int v = 0; v < nv; ++v) {
        x[i] = path.frames[t][v].x;
        x[i + 1] = path.frames[t][v].y;
        x[i + 2] = path.frames[t][v].z;
        i += 3;
      }
    return x;
  }

  bool feasible(const std::vector<double>& x) {
    unpack(x);
    for (int t = 1; t < N; ++t)
      if (!frame_is_admissible(*path.mesh, path.frames[t])) return false;
    return true;
  }

  // Pre: feasible(x) was just checked (path holds x).
  EnergyBreakdown eval(std::vector<double>& g) {
    std::vector<Vec3> grad;
    EnergyBreakdown b = objective_with_gradient(path, *w, penaltyFactor, penaltyExponent, grad);
    g.resize(size());
    for (size_t i = 0; i < grad.size(); ++i) {
      g[3 * i] = grad[i].x;
      g[3 * i + 1] = grad[i].y;
      g[3 * i + 2] = grad[i].z;
    }
    return b;
  }
};

double dot_flat(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Probe {
  bool feasible = false;
  double f = std::numeric_limits<double>::infinity();
  double slope = 0;  // gradient . direction
  std::vector<double> x, g;
  EnergyBreakdown breakdown;
};

class LineSearch {
 public:
  LineSearch(FlatProblem& problem, const std::vector<double>& x0, const std::vector<double>& d,
             double f0, double slope0, double c1, double c2)
      : problem_(problem), x0_(x0), d_(d), f0_(f0), slope0_(slope0), c1_(c1), c2_(c2) {}

  Probe probe(double alpha) {
    Probe p;
    p.x.resize(x0_.size());
    for (size_t i = 0; i < x0_.size(); ++i) p.x[i] = x0_[i] + alpha * d_[i];
    if (!problem_.feasible(p.x)) return p;
    p.feasible = true;
    p.breakdown = problem_.eval(p.g);
    p.f = p.breakdown.objective;
    p.slope = dot_flat(p.g, d_);
    return p;
  }

  bool armijo(double alpha, const Probe& p) const { return p.f <= f0_ + c1_ * alpha * slope0_; }
  bool curvature(const Probe& p) const { return std::abs(p.slope) <= -c2_ * slope0_; }

  // Strong Wolfe search; returns the accepted probe and step, or an
  // infeasible probe when no acceptable step exists.
  std::pair<double, Probe> run(double alphaInit) {
    double alphaPrev = 0;
    Probe prev;  // probe at alphaPrev; alpha 0 state is (f0, slope0)
    double fPrev = f0_;
    double alpha = alphaInit;
    for (int i = 0; i < 20; ++i) {
      Probe p = probe(alpha);
      if (!p.feasible || !armijo(alpha, p) || (i > 0 && p.f >= fPrev)) {
        return zoom(alphaPrev, fPrev, std::move(prev), alpha, std::move(p));
      }
      if (curvature(p)) return {alpha, std::move(p)};
      if (p.slope >= 0) {
        return zoom(alpha, p.f, std::move(p), alphaPrev, std::move(prev));
      }
      alphaPrev = alpha;
      fPrev = p.f;
      prev = std::move(p);
      alpha *= 2;
    }
    // Expansion never bracketed; the last point satisfies Armijo with a
    // negative slope, accept it.
    if (prev.feasible && prev.f < f0_) return {alphaPrev, std::move(prev)};
    return {0.0, Probe{}};
  }

 private:
  // lo always satisfies Armijo (or is alpha = 0); hi fails Armijo, is
  // infeasible, or has non-negative slope.
  std::pair<double, Probe> zoom(double alphaLo, double fLo, Probe lo, double alphaHi, Probe hi) {
    for (int i = 0; i < 50; ++i) {
      if (std::abs(alphaHi - alphaLo) < 1e-16 * std::max(1.0, std::abs(alphaLo))) break;
      double alpha;
      if (hi.feasible) {
        // Quadratic through (lo, f, slope) and (hi, f), clamped to the interior.
        const double slopeLo = alphaLo == 0 ? slope0_ : lo.slope;
        const double denom = hi.f - fLo - slopeLo * (alphaHi - alphaLo);
        alpha = denom > 0 ? alphaLo + 0.5 * slopeLo * (alphaHi - alphaLo) * (alphaHi - alphaLo) / -denom
                          : 0.5 * (alphaLo + alphaHi);
        const double lob = std::min(alphaLo, alphaHi), upb = std::max(alphaLo, alphaHi);
        const double margin = 0.1 * (upb - lob);
        if (!(alpha > lob + margin) || !(alpha < upb - margin)) alpha = 0.5 * (alphaLo + alphaHi);
      } else {
        alpha = alphaLo + 0.25 * (alphaHi - alphaLo);
      }
      Probe p = probe(alpha);
      if (!p.feasible || !armijo(alpha, p) || p.f >= fLo) {
        alphaHi = alpha;
        hi = std::move(p);
      } else {
        if (curvature(p)) return {alpha, std::move(p)};
        if (p.slope * (alphaHi - alphaLo) >= 0) {
          alphaHi = alphaLo;
          hi = std::move(lo);
        }
        alphaLo = alpha;
        fLo = p.f;
        lo = std::move(p);
      }
    }
    if (lo.feasible && lo.f < f0_) return {alphaLo, std::move(lo)};  // decrease without curvature
    return {0.0, Probe{}};
  }

  FlatProblem& problem_;
  const std::vector<double>& x0_;
  const std::vector<double>& d_;
  double f0_, slope0_, c1_, c2_;
};

double default_grad_tolerance(const Frame& start, const Frame& end) {
  Vec3 lo = start[0], hi = start[0];
  for (const Frame* f : {&start, &end})
    for (const Vec3& p : *f) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
  return 1e-6 * std::max(norm(hi - lo), 1e-12);
}

}  // namespace

std::pair<ShapePath, SolveReport> solve_geodesic(std::shared_ptr<const TriMesh> mesh, const Frame& start,
                                                 const Frame& end, int timesteps, const MetricWeight& w,
                                                 double penaltyFactor, int penaltyExponent,
                                                 const SolverConfig& config, const ShapePath* providedInit) {
  if (config.memory < 1) fail(ErrorCode::InvalidArgument, "quasi-Newton memory must be >= 1");
  if (!(0 < config.c1 && config.c1 < config.c2 && config.c2 < 1))
    fail(ErrorCode::InvalidArgument, "line search needs 0 < c1 < c2 < 1");

  FlatProblem problem;
  if (providedInit) {
    if (providedInit->timesteps() != timesteps)
      fail(ErrorCode::InvalidArgument, "provided path has " + std::to_string(providedInit->timesteps()) +
                                           " timesteps, expected " + std::to_string(timesteps));
    if (providedInit->mesh->vertexCount() != mesh->vertexCount() ||
        providedInit->mesh->faceCount() != mesh->faceCount())
      fail(ErrorCode::SharedCombinatoricsMismatch, "provided path does not share the mesh combinatorics");
    problem.path = *providedInit;
    problem.path.mesh = mesh;
    problem.path.frames.front() = start;
    problem.path.frames.back() = end;
    for (size_t t = 0; t < problem.path.frames.size(); ++t)
      validate_frame(*mesh, problem.path.frames[t], "provided frame " + std::to_string(t));
  } else {
    problem.path = initialize_path(mesh, start, end, timesteps);
  }
  problem.w = &w;
  problem.penaltyFactor = penaltyFactor;
  problem.penaltyExponent = penaltyExponent;
  problem.nv = mesh->vertexCount();
  problem.N = timesteps;

  const double gradTol = config.gradTolerance > 0 ? config.gradTolerance : default_grad_tolerance(start, end);

  std::vector<double> x = problem.pack();
  if (!problem.feasible(x)) fail(ErrorCode::DegenerateFrameEncountered, "initial path is degenerate");
  std::vector<double> g;
  EnergyBreakdown breakdown = problem.eval(g);
  double f = breakdown.objective;

  SolveReport report;
  report.energyHistory.push_back(f);
  report.gradInfNorm = inf_norm(g);

  std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)
  std::deque<double> rho;
  int stallCount = 0;
  Termination reason = Termination::MaxIterations;
  int iter = 0;

  auto progress = [&](int k, double step) {
    if (!config.verbose) return;
    std::fprintf(stderr, "iter %d objective %s g_inf %s step %s\n", k, format_double(f).c_str(),
                 format_double(report.gradInfNorm).c_str(), format_double(step).c_str());
  };
  progress(0, 0);

  for (iter = 0; iter < config.maxIterations; ++iter) {
    if (report.gradInfNorm <= gradTol) {
      reason = Termination::Converged;
      break;
    }

    // Two-loop recursion for d = -H g.
    std::vector<double> d = g;
    std::vector<double> alphaCoef(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      alphaCoef[i] = rho[i] * dot_flat(history[i].first, d);
      const auto& y = history[i].second;
      for (size_t j = 0; j < d.size(); ++j) d[j] -= alphaCoef[i] * y[j];
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      const double gamma = dot_flat(s, y) / dot_flat(y, y);
      for (double& v : d) v *= gamma;
    }
    for (size_t i = 0; i < history.size(); ++i) {
      const double beta = rho[i] * dot_flat(history[i].second, d);
      const auto& s = history[i].first;
      for (size_t j = 0; j < d.size(); ++j) d[j] += (alphaCoef[i] - beta) * s[j];
    }
    for (double& v : d) v = -v;

    double slope = dot_flat(g, d);
    if (!(slope < 0)) {
      history.clear();
      rho.clear();
      d = g;
      for (double& v : d) v = -v;
      slope = dot_flat(g, d);
    }

    const double alphaInit = history.empty() ? 1.0 / std::max(1.0, report.gradInfNorm) : 1.0;
    LineSearch search(problem, x, d, f, slope, config.c1, config.c2);
    auto [alpha, accepted] = search.run(alphaInit);
    if (!accepted.feasible) {
      if (!history.empty()) {
        // Retry once along steepest descent before giving up.
        history.clear();
        rho.clear();
        d = g;
        for (double& v : d) v = -v;
        slope = dot_flat(g, d);
        LineSearch retry(problem, x, d, f, slope, config.c1, config.c2);
        std::tie(alpha, accepted) = retry.run(1.0 / std::max(1.0, report.gradInfNorm));
      }
      if (!accepted.feasible) {
        reason = Termination::LineSearchFailure;
        break;
      }
    }

    std::vector<double> s(x.size()), y(g.size());
    for (size_t i = 0; i < x.size(); ++i) s[i] = accepted.x[i] - x[i];
    for (size_t i = 0; i < g.size(); ++i) y[i] = accepted.g[i] - g[i];
    const double sy = dot_flat(s, y);
    if (sy > 1e-10 * std::sqrt(dot_flat(s, s)) * std::sqrt(dot_flat(y, y))) {
      history.emplace_back(std::move(s), std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(history.size()) > config.memory) {
        history.pop_front();
        rho.pop_front();
      }
    }

    const double fPrev = f;
    x = std::move(accepted.x);
    g = std::move(accepted.g);
    f = accepted.f;
    breakdown = std::move(accepted.breakdown);
    report.gradInfNorm = inf_norm(g);
    report.energyHistory.push_back(f);
    progress(iter + 1, alpha);

    if (fPrev - f <= config.relEnergyTolerance * std::max(1.0, std::abs(f))) {
      if (++stallCount >= 3) {
        ++iter;
        reason = Termination::Converged;
        break;
      }
    } else {
      stallCount = 0;
    }
  }

  problem.unpack(x);
  report.iterations = iter;
  report.final = std::move(breakdown);
  report.reason = reason;
  return {std::move(problem.path), std::move(report)};
}

}  // namespace shapegeo
