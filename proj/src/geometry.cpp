#include "geometry.hpp"

#include <cmath>
#include <string>

namespace shapegeo {

VertexGeometry compute_geometry(const TriMesh& mesh, const Frame& frame, bool needTrl2) {
  if (frame.size() != mesh.positions.size())
    fail(ErrorCode::InvalidArgument, "frame size does not match the mesh");
  const int nv = mesh.vertexCount();
  const int nf = mesh.faceCount();
  const double areaFloor = frame_area_floor(frame);

  VertexGeometry g;
  g.faceCross.resize(nf);
  g.faceCrossNorm.resize(nf);
  g.faceNormal.resize(nf);
  g.faceArea.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    const Vec3 c = cross(frame[tri[1]] - frame[tri[0]], frame[tri[2]] - frame[tri[0]]);
    const double n = norm(c);
    if (!(n / 2 > areaFloor))
      fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " is at or below the area floor");
    g.faceCross[f] = c;
    g.faceCrossNorm[f] = n;
    g.faceNormal[f] = (1.0 / n) * c;
    g.faceArea[f] = n / 2;
    g.totalArea += n / 2;
  }

  g.vertexArea.assign(nv, 0.0);
  g.vectorArea.assign(nv, Vec3{});
  g.vectorMeanCurvature.assign(nv, Vec3{});
  g.trl2.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    for (int f : mesh.facesOfVertex[v]) {
      g.vertexArea[v] += g.faceArea[f] / 3;
      g.vectorArea[v] += (1.0 / 6.0) * g.faceCross[f];
    }
    Vec3 vm{};
    for (const auto& entry : mesh.linkOfVertex[v]) {
      const auto& e = mesh.edges[entry.edge];
      const Vec3 edgeVec = frame[e[1]] - frame[e[0]];
      vm += (0.5 * entry.orientation) * cross(g.faceNormal[entry.face], edgeVec);
    }
    g.vectorMeanCurvature[v] = vm;
    const double va2 = norm2(g.vectorArea[v]);
    if (va2 > 0) {
      g.trl2[v] = norm2(vm) / va2;
    } else if (needTrl2) {
      fail(ErrorCode::ZeroVectorArea, "vertex " + std::to_string(v) + " has zero vector area");
    }
  }
  return g;
}

Vec3 cotangent_mean_curvature(const TriMesh& mesh, const Frame& frame, int vertex) {
  if (vertex < 0 || vertex >= mesh.vertexCount()) fail(ErrorCode::InvalidArgument, "vertex index out of range");
  // Each incident face (v, a, b) contributes its gradient of area with
  // respect to v, written with the corner cotangents at a and b:
  //   grad_v area = (1/2)(cot(angle at a)(v - b) + cot(angle at b)(v - a)).
  // Summing over the star regroups into the edge form
  //   (1/2) sum over ring edges (cot a_i + cot b_i)(v - p_i).
  Vec3 sum{};
  const Vec3 p = frame[vertex];
  for (const auto& entry : mesh.linkOfVertex[vertex]) {
    const auto& e = mesh.edges[entry.edge];
    const int a = entry.orientation > 0 ? e[0] : e[1];
    const int b = entry.orientation > 0 ? e[1] : e[0];
    const Vec3 ua = p - frame[a], va = frame[b] - frame[a];
    const Vec3 ub = p - frame[b], vb = frame[a] - frame[b];
    const double sinA = norm(cross(ua, va)), sinB = norm(cross(ub, vb));
    if (!(sinA > 0) || !(sinB > 0))
      fail(ErrorCode::DegenerateAngle, "zero-sine corner angle at vertex " + std::to_string(vertex));
    const double cotA = dot(ua, va) / sinA;
    const double cotB = dot(ub, vb) / sinB;
    sum += 0.5 * (cotA * (p - frame[b]) + cotB * (p - frame[a]));
  }
  return sum;
}

}  // namespace shapegeo
