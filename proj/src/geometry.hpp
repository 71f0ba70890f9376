#pragma once

#include <vector>

#include "mesh.hpp"
#include "vec3.hpp"

namespace shapegeo {

// Per-frame discrete differential quantities.
//
// For a face (p1, p2, p3): cross = (p2 - p1) x (p3 - p1), area = |cross| / 2,
// normal = cross / |cross|. Per vertex: area A(p) = sum of incident face
// areas / 3; vector area VA(p) = sum of incident crosses / 6, which is the
// exact gradient of enclosed volume; vector mean curvature VM(p) = half the
// oriented link sum (1/2) sum o (normal x edge), which equals the cotangent
// sum (1/2) sum (cot a + cot b)(p - p_i) and the exact gradient of total
// surface area; trL2(p) = |VM|^2 / |VA|^2, the squared scalar mean curvature.
struct VertexGeometry {
  std::vector<Vec3> faceCross;
  std::vector<double> faceCrossNorm;
  std::vector<Vec3> faceNormal;
  std::vector<double> faceArea;

  std::vector<double> vertexArea;
  std::vector<Vec3> vectorArea;
  std::vector<Vec3> vectorMeanCurvature;
  std::vector<double> trl2;

  double totalArea = 0;
};

// needTrl2 = false skips the |VA| division so metrics that never read trL2
// can be evaluated on frames with saddle-symmetric vertices (trl2 is then
// left as 0 at those vertices instead of raising ZeroVectorArea).
VertexGeometry compute_geometry(const TriMesh& mesh, const Frame& frame, bool needTrl2 = true);

// The cotangent form (1/2) sum over ring edges (cot a_i + cot b_i)(p - p_i);
// agrees with vectorMeanCurvature and with the finite-difference gradient of
// total surface area.
Vec3 cotangent_mean_curvature(const TriMesh& mesh, const Frame& frame, int vertex);

}  // namespace shapegeo
