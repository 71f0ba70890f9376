#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "geometry.hpp"
#include "numfmt.hpp"
#include "parallel.hpp"
#include "path_energy.hpp"

namespace shapegeo {

PathDiagnostics path_diagnostics(const ShapePath& path, const MetricWeight& w) {
  const TriMesh& mesh = *path.mesh;
  const int N = path.timesteps();
  const int nv = mesh.vertexCount();
  const bool needTrl2 = uses_trl2(w);

  PathDiagnostics d;
  d.linearMomentum.assign(N, Vec3{});
  d.angularMomentum.assign(N, Vec3{});
  d.scalingMomentum.assign(N, 0.0);
  d.horizontality.assign(N, 0.0);
  d.sweptIncrements.assign(N, 0.0);
  d.sweptIncrementsFull.assign(N, 0.0);

  ExceptionCollector errors;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < N; ++t) {
    errors.run([&, t] {
      const VertexGeometry geo = compute_geometry(mesh, path.frames[t], needTrl2);
      std::vector<Vec3> inc(nv);
      Vec3 lin{}, ang{};
      double scal = 0, tan2 = 0, full2 = 0;
      for (int v = 0; v < nv; ++v) {
        const Vec3 f = path.frames[t][v];
        inc[v] = N * (path.frames[t + 1][v] - f);
        const double phi = evaluate(w, geo.totalArea, needTrl2 ? geo.trl2[v] : 0.0);
        const double a = geo.vertexArea[v];
        lin += (phi * a) * inc[v];
        ang += (phi * a) * cross(f, inc[v]);
        scal += phi * a * dot(f, inc[v]);
        const double va = norm(geo.vectorArea[v]);
        const double normal = va > 0 ? dot(inc[v], geo.vectorArea[v]) / va : 0.0;
        tan2 += a * (norm2(inc[v]) - normal * normal);
        full2 += a * norm2(inc[v]);
      }
      // Swept area by a face quadrature: the face-averaged increment against
      // the face normal. Per face (x_1+x_2+x_3)^2 <= 3 (x_1^2+x_2^2+x_3^2),
      // which keeps sqrt(C) sweptArea <= pathLength exact at the discrete
      // level whenever Phi >= C Vol holds; a vertex quadrature would lose
      // that inequality in the continuum-equality case of radial motion.
      double sweptN = 0, sweptF = 0;
      for (int f = 0; f < mesh.faceCount(); ++f) {
        const auto& tri = mesh.faces[f];
        const Vec3 bar = (1.0 / 3.0) * (inc[tri[0]] + inc[tri[1]] + inc[tri[2]]);
        sweptN += geo.faceArea[f] * std::abs(dot(bar, geo.faceNormal[f]));
        sweptF += geo.faceArea[f] * norm(bar);
      }
      d.linearMomentum[t] = lin;
      d.angularMomentum[t] = ang;
      d.scalingMomentum[t] = scal;
      d.horizontality[t] = full2 > 0 ? std::sqrt(std::max(0.0, tan2) / full2) : 0.0;
      d.sweptIncrements[t] = sweptN / N;
      d.sweptIncrementsFull[t] = sweptF / N;
    });
  }
  errors.rethrow();

  d.stepEnergy = objective(path, w, 0.0, 2).perTimestepEnergy;
  for (int t = 0; t < N; ++t) {
    d.sweptArea += d.sweptIncrements[t];
    d.sweptAreaFull += d.sweptIncrementsFull[t];
    d.pathLength += std::sqrt(std::max(0.0, d.stepEnergy[t]) / N);
  }
  return d;
}

SweptAreaBounds swept_area_bounds(const ShapePath& path, const MetricWeight& w,
                                  std::optional<double> C1, std::optional<double> C2,
                                  std::optional<double> C) {
  const bool hasC1 = C1 && *C1 > 0, hasC2 = C2 && *C2 > 0, hasC = C && *C > 0;
  if (!hasC1 && !hasC2 && !hasC)
    fail(ErrorCode::InapplicableBound, "no positive lower-bound constant supplied");

  const PathDiagnostics d = path_diagnostics(path, w);
  double maxVol = 0;
  for (const Frame& f : path.frames)
    maxVol = std::max(maxVol, compute_geometry(*path.mesh, f, false).totalArea);
  const double volStart = compute_geometry(*path.mesh, path.frames.front(), false).totalArea;
  const double volEnd = compute_geometry(*path.mesh, path.frames.back(), false).totalArea;

  SweptAreaBounds b;
  if (hasC1) {
    b.sweptVsMaxVol.applicable = true;
    b.sweptVsMaxVol.lhs = std::sqrt(*C1) * d.sweptArea;
    b.sweptVsMaxVol.rhs = std::sqrt(maxVol) * d.pathLength;
  }
  if (hasC2) {
    b.volLipschitz.applicable = true;
    b.volLipschitz.lhs = std::abs(std::sqrt(volEnd) - std::sqrt(volStart));
    b.volLipschitz.rhs = d.pathLength / (2 * std::sqrt(*C2));
  }
  if (hasC) {
    b.sweptVsLength.applicable = true;
    b.sweptVsLength.lhs = std::sqrt(*C) * d.sweptArea;
    b.sweptVsLength.rhs = d.pathLength;
  }
  return b;
}

double g0_curvature_quadrature(const TriMesh& mesh, const Frame& frame,
                               const std::vector<double>& a1, const std::vector<double>& a2) {
  const int nv = mesh.vertexCount();
  if (static_cast<int>(a1.size()) != nv || static_cast<int>(a2.size()) != nv)
    fail(ErrorCode::InvalidArgument, "coefficient fields must have one value per vertex");
  const VertexGeometry geo = compute_geometry(mesh, frame, false);

  double total = 0;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& tri = mesh.faces[f];
    const double area = geo.faceArea[f];
    Vec3 grad1{}, grad2{};
    double bar1 = 0, bar2 = 0;
    for (int c = 0; c < 3; ++c) {
      const int v = tri[c];
      // In-plane gradient of the hat function of corner c.
      const Vec3 oppEdge = frame[tri[(c + 2) % 3]] - frame[tri[(c + 1) % 3]];
      const Vec3 gradHat = (1 / (2 * area)) * cross(geo.faceNormal[f], oppEdge);
      grad1 += a1[v] * gradHat;
      grad2 += a2[v] * gradHat;
      bar1 += a1[v] / 3;
      bar2 += a2[v] / 3;
    }
    total += 0.5 * norm2(bar1 * grad2 - bar2 * grad1) * area;
  }
  return total;
}

void write_diagnostics_csv(std::ostream& out, const PathDiagnostics& d) {
  out << "t,linear_x,linear_y,linear_z,angular_x,angular_y,angular_z,scaling,"
         "horizontality,swept_increment,swept_increment_full,step_energy\n";
  for (size_t t = 0; t < d.linearMomentum.size(); ++t) {
    const Vec3& l = d.linearMomentum[t];
    const Vec3& a = d.angularMomentum[t];
    out << t << ',' << format_double(l.x) << ',' << format_double(l.y) << ',' << format_double(l.z)
        << ',' << format_double(a.x) << ',' << format_double(a.y) << ',' << format_double(a.z)
        << ',' << format_double(d.scalingMomentum[t]) << ',' << format_double(d.horizontality[t])
        << ',' << format_double(d.sweptIncrements[t]) << ','
        << format_double(d.sweptIncrementsFull[t]) << ',' << format_double(d.stepEnergy[t])
        << '\n';
  }
}

void write_diagnostics_csv(const std::string& path, const PathDiagnostics& d) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_diagnostics_csv(out, d);
  if (!out.good()) fail(ErrorCode::IoError, "write to " + path + " failed");
}

}  // namespace shapegeo
