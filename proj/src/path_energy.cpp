#include "path_energy.hpp"

#include <cmath>

#include "parallel.hpp"

namespace shapegeo {

namespace {

struct Forward {
  std::vector<VertexGeometry> geo;          // per frame
  std::vector<std::vector<double>> phi;     // per frame, per vertex
  std::vector<std::vector<Vec3>> inc;       // per timestep t = 0..N-1, per vertex
  // S[t][v] with the increment of the same timestep, S'[t][v] with the
  // previous one: the two halves of the symmetrized energy.
  std::vector<std::vector<double>> sFwd;    // t = 0..N-1
  std::vector<std::vector<double>> sBwd;    // t = 1..N
  bool needTrl2 = false;
};

double star_quadratic(const TriMesh& mesh, const VertexGeometry& g, int v, const Vec3& u) {
  double s = 0;
  for (int f : mesh.facesOfVertex[v]) {
    const double d = dot(u, g.faceCross[f]);
    s += d * d / g.faceCrossNorm[f];
  }
  return s;
}

Forward run_forward(const ShapePath& path, const MetricWeight& w) {
  const TriMesh& mesh = *path.mesh;
  const int N = path.timesteps();
  const int nv = mesh.vertexCount();

  Forward fw;
  fw.needTrl2 = uses_trl2(w);
  fw.geo.resize(N + 1);
  fw.phi.assign(N + 1, std::vector<double>(nv));
  fw.inc.assign(N, std::vector<Vec3>(nv));
  fw.sFwd.assign(N + 1, {});
  fw.sBwd.assign(N + 1, {});

  ExceptionCollector errors;
#pragma omp parallel for schedule(static)
  for (int t = 0; t <= N; ++t) {
    errors.run([&, t] {
      fw.geo[t] = compute_geometry(mesh, path.frames[t], fw.needTrl2);
      for (int v = 0; v < nv; ++v)
        fw.phi[t][v] = evaluate(w, fw.geo[t].totalArea, fw.needTrl2 ? fw.geo[t].trl2[v] : 0.0);
    });
  }
  errors.rethrow();
  for (int t = 0; t < N; ++t)
    for (int v = 0; v < nv; ++v) fw.inc[t][v] = static_cast<double>(N) * (path.frames[t + 1][v] - path.frames[t][v]);

#pragma omp parallel for schedule(static)
  for (int t = 0; t <= N; ++t) {
    if (t < N) {
      fw.sFwd[t].resize(nv);
      for (int v = 0; v < nv; ++v) fw.sFwd[t][v] = star_quadratic(mesh, fw.geo[t], v, fw.inc[t][v]);
    }
    if (t > 0) {
      fw.sBwd[t].resize(nv);
      for (int v = 0; v < nv; ++v) fw.sBwd[t][v] = star_quadratic(mesh, fw.geo[t], v, fw.inc[t - 1][v]);
    }
  }
  return fw;
}

std::vector<double> per_timestep_energy(const ShapePath& path, const Forward& fw) {
  const int N = path.timesteps();
  const int nv = path.mesh->vertexCount();
  std::vector<double> per(N, 0.0);
  for (int t = 0; t < N; ++t) {
    double s = 0;
    for (int v = 0; v < nv; ++v) s += fw.phi[t][v] * fw.sFwd[t][v] + fw.phi[t + 1][v] * fw.sBwd[t + 1][v];
    per[t] = s / (12.0 * N);
  }
  return per;
}

double penalty_frame(const TriMesh& mesh, const Frame& frame, const std::vector<double>& perfect,
                     int exponent) {
  double p = 0;
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    for (const auto& pair : mesh.adjacentEdgePairsOfVertex[v]) {
      const auto& ea = mesh.edges[pair.edgeA];
      const auto& eb = mesh.edges[pair.edgeB];
      const Vec3 u = static_cast<double>(pair.signA) * (frame[ea[1]] - frame[ea[0]]);
      const Vec3 w = static_cast<double>(pair.signB) * (frame[eb[1]] - frame[eb[0]]);
      const double nu = norm(u), nw = norm(w);
      if (!(nu > 0) || !(nw > 0))
        fail(ErrorCode::ZeroLengthEdge, "zero-length edge at vertex " + std::to_string(v));
      const double dev = dot(u, w) / (nu * nw) - perfect[v];
      p += std::pow(std::abs(dev), exponent);
    }
  }
  return p;
}

void penalty_frame_gradient(const TriMesh& mesh, const Frame& frame, const std::vector<double>& perfect,
                            int exponent, double factor, std::vector<Vec3>& grad) {
  for (int v = 0; v < mesh.vertexCount(); ++v) {
    for (const auto& pair : mesh.adjacentEdgePairsOfVertex[v]) {
      const auto& ea = mesh.edges[pair.edgeA];
      const auto& eb = mesh.edges[pair.edgeB];
      const Vec3 u = static_cast<double>(pair.signA) * (frame[ea[1]] - frame[ea[0]]);
      const Vec3 w = static_cast<double>(pair.signB) * (frame[eb[1]] - frame[eb[0]]);
      const double nu = norm(u), nw = norm(w);
      if (!(nu > 0) || !(nw > 0))
        fail(ErrorCode::ZeroLengthEdge, "zero-length edge at vertex " + std::to_string(v));
      const double cosang = dot(u, w) / (nu * nw);
      const double dev = cosang - perfect[v];
      const double mag = std::abs(dev);
      if (mag == 0) continue;
      const double coeff = factor * exponent * std::pow(mag, exponent - 1) * (dev > 0 ? 1.0 : -1.0);
      const Vec3 du = (1.0 / (nu * nw)) * w - (cosang / (nu * nu)) * u;
      const Vec3 dw = (1.0 / (nu * nw)) * u - (cosang / (nw * nw)) * w;
      grad[ea[1]] += (coeff * pair.signA) * du;
      grad[ea[0]] -= (coeff * pair.signA) * du;
      grad[eb[1]] += (coeff * pair.signB) * dw;
      grad[eb[0]] -= (coeff * pair.signB) * dw;
    }
  }
}

std::vector<double> perfect_angles(const TriMesh& mesh) {
  std::vector<double> perfect(mesh.vertexCount());
  for (int v = 0; v < mesh.vertexCount(); ++v)
    perfect[v] = std::cos(2 * M_PI / static_cast<double>(mesh.facesOfVertex[v].size()));
  return perfect;
}

// d/dc of (u.c)^2 / |c|, with nu = c / |c|.
Vec3 star_quadratic_dc(const Vec3& u, const Vec3& c, double cn, const Vec3& nu) {
  const double d = dot(u, c);
  return (2 * d / cn) * u - (d * d / (cn * cn)) * nu;
}

// Gradient of the energy with respect to the positions of frame s, given the
// forward pass. Writes only into grad (one slot per vertex of frame s).
void frame_energy_gradient(const ShapePath& path, const MetricWeight& w, const Forward& fw, int s,
                           std::vector<Vec3>& grad) {
  const TriMesh& mesh = *path.mesh;
  const int N = path.timesteps();
  const int nv = mesh.vertexCount();
  const int nf = mesh.faceCount();
  const VertexGeometry& g = fw.geo[s];
  const Frame& frame = path.frames[s];
  const double scale = 1.0 / (12.0 * N);

  // Increment channel: inc_{s-1} gains f_s with +N, inc_s with -N.
  for (int v = 0; v < nv; ++v) {
    Vec3 d{};
    if (s > 0) {
      const Vec3& u = fw.inc[s - 1][v];
      Vec3 t{};
      for (int f : mesh.facesOfVertex[v])
        t += (dot(u, fw.geo[s - 1].faceCross[f]) / fw.geo[s - 1].faceCrossNorm[f]) * fw.geo[s - 1].faceCross[f];
      d += (2 * scale * fw.phi[s - 1][v]) * t;
      t = {};
      for (int f : mesh.facesOfVertex[v])
        t += (dot(u, g.faceCross[f]) / g.faceCrossNorm[f]) * g.faceCross[f];
      d += (2 * scale * fw.phi[s][v]) * t;
      grad[v] += static_cast<double>(N) * d;
    }
    if (s < N) {
      const Vec3& u = fw.inc[s][v];
      Vec3 t{};
      for (int f : mesh.facesOfVertex[v])
        t += (dot(u, g.faceCross[f]) / g.faceCrossNorm[f]) * g.faceCross[f];
      d = (2 * scale * fw.phi[s][v]) * t;
      t = {};
      for (int f : mesh.facesOfVertex[v])
        t += (dot(u, fw.geo[s + 1].faceCross[f]) / fw.geo[s + 1].faceCrossNorm[f]) * fw.geo[s + 1].faceCross[f];
      d += (2 * scale * fw.phi[s + 1][v]) * t;
      grad[v] -= static_cast<double>(N) * d;
    }
  }

  // Geometry channel: adjoints of the frame-s crosses, assembled from the
  // direct quadratic terms and from Phi through (totalArea, trl2).
  std::vector<Vec3> cBar(nf, Vec3{});
  for (int v = 0; v < nv; ++v) {
    const double weight = scale * fw.phi[s][v];
    for (int f : mesh.facesOfVertex[v]) {
      Vec3 d{};
      if (s < N) d += star_quadratic_dc(fw.inc[s][v], g.faceCross[f], g.faceCrossNorm[f], g.faceNormal[f]);
      if (s > 0) d += star_quadratic_dc(fw.inc[s - 1][v], g.faceCross[f], g.faceCrossNorm[f], g.faceNormal[f]);
      cBar[f] += weight * d;
    }
  }

  // dE/dPhi_s(v), then through the weight's partial derivatives.
  double volBar = 0;
  for (int v = 0; v < nv; ++v) {
    const double phiBar = scale * ((s < N ? fw.sFwd[s][v] : 0.0) + (s > 0 ? fw.sBwd[s][v] : 0.0));
    if (phiBar == 0) continue;
    const Partials dPhi = partials(w, g.totalArea, fw.needTrl2 ? g.trl2[v] : 0.0);
    volBar += phiBar * dPhi.dVol;
    if (!fw.needTrl2 || dPhi.dTrl2 == 0) continue;

    const double trl2Bar = phiBar * dPhi.dTrl2;
    const double va2 = norm2(g.vectorArea[v]);
    const Vec3 vmBar = (2 * trl2Bar / va2) * g.vectorMeanCurvature[v];
    const Vec3 vaBar = (-2 * trl2Bar * g.trl2[v] / va2) * g.vectorArea[v];
    for (int f : mesh.facesOfVertex[v]) cBar[f] += (1.0 / 6.0) * vaBar;
    for (const auto& entry : mesh.linkOfVertex[v]) {
      const auto& e = mesh.edges[entry.edge];
      const Vec3 edgeVec = frame[e[1]] - frame[e[0]];
      const Vec3 nu = g.faceNormal[entry.face];
      const double half = 0.5 * entry.orientation;
      // through the face normal: d(vmBar . (nu x e))/dnu = e x vmBar,
      // projected by dnu/dc = (I - nu nu^T)/|c|
      const Vec3 q = cross(edgeVec, vmBar);
      cBar[entry.face] += (half / g.faceCrossNorm[entry.face]) * (q - dot(nu, q) * nu);
      // through the edge vector
      const Vec3 r = half * cross(vmBar, nu);
      grad[e[1]] += r;
      grad[e[0]] -= r;
    }
  }
  if (volBar != 0)
    for (int f = 0; f < nf; ++f) cBar[f] += (volBar / 2) * g.faceNormal[f];

  // Crosses to positions: for face (q0, q1, q2),
  // d(wBar . cross)/dq_i = (q_{i+1} - q_{i+2}) x wBar.
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    const Vec3& wBar = cBar[f];
    grad[tri[0]] += cross(frame[tri[1]] - frame[tri[2]], wBar);
    grad[tri[1]] += cross(frame[tri[2]] - frame[tri[0]], wBar);
    grad[tri[2]] += cross(frame[tri[0]] - frame[tri[1]], wBar);
  }
}

}  // namespace

double path_energy(const ShapePath& path, const MetricWeight& w) {
  const Forward fw = run_forward(path, w);
  double e = 0;
  for (double p : per_timestep_energy(path, fw)) e += p;
  return e;
}

double penalty(const ShapePath& path, int exponent) {
  if (exponent < 1) fail(ErrorCode::InvalidArgument, "penalty exponent must be a positive integer");
  const std::vector<double> perfect = perfect_angles(*path.mesh);
  double p = 0;
  for (const Frame& frame : path.frames) p += penalty_frame(*path.mesh, frame, perfect, exponent);
  return p;
}

EnergyBreakdown objective(const ShapePath& path, const MetricWeight& w, double penaltyFactor,
                          int penaltyExponent) {
  const Forward fw = run_forward(path, w);
  EnergyBreakdown b;
  b.perTimestepEnergy = per_timestep_energy(path, fw);
  for (double p : b.perTimestepEnergy) b.energy += p;
  b.penalty = penalty(path, penaltyExponent);
  b.objective = b.energy + penaltyFactor * b.penalty;
  return b;
}

EnergyBreakdown objective_with_gradient(const ShapePath& path, const MetricWeight& w,
                                        double penaltyFactor, int penaltyExponent,
                                        std::vector<Vec3>& grad) {
  if (penaltyExponent < 1) fail(ErrorCode::InvalidArgument, "penalty exponent must be a positive integer");
  const TriMesh& mesh = *path.mesh;
  const int N = path.timesteps();
  const int nv = mesh.vertexCount();
  const Forward fw = run_forward(path, w);
  const std::vector<double> perfect = perfect_angles(mesh);

  EnergyBreakdown b;
  b.perTimestepEnergy = per_timestep_energy(path, fw);
  for (double p : b.perTimestepEnergy) b.energy += p;
  for (const Frame& frame : path.frames) b.penalty += penalty_frame(mesh, frame, perfect, penaltyExponent);
  b.objective = b.energy + penaltyFactor * b.penalty;

  grad.assign(static_cast<size_t>(N - 1) * nv, Vec3{});
  ExceptionCollector errors;
#pragma omp parallel for schedule(static)
  for (int s = 1; s < N; ++s) {
    errors.run([&, s] {
      std::vector<Vec3> frameGrad(nv, Vec3{});
      frame_energy_gradient(path, w, fw, s, frameGrad);
      if (penaltyFactor != 0)
        penalty_frame_gradient(mesh, path.frames[s], perfect, penaltyExponent, penaltyFactor, frameGrad);
      for (int v = 0; v < nv; ++v) grad[static_cast<size_t>(s - 1) * nv + v] = frameGrad[v];
    });
  }
  errors.rethrow();
  return b;
}

std::vector<Vec3> gradient(const ShapePath& path, const MetricWeight& w, double penaltyFactor,
                           int penaltyExponent) {
  std::vector<Vec3> grad;
  objective_with_gradient(path, w, penaltyFactor, penaltyExponent, grad);
  return grad;
}

}  // namespace shapegeo
