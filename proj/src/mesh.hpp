#pragma once

#include <array>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "vec3.hpp"

namespace shapegeo {

using Frame = std::vector<Vec3>;

// Closed oriented triangle mesh: positions plus derived combinatorics.
// The derived sets are immutable after build_combinatorics and shareable
// across threads; per-frame position arrays live outside the mesh.
struct TriMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> faces;

  // Derived. Edges are canonical (v0 < v1), indexed in first-appearance order.
  std::vector<std::array<int, 2>> edges;

  // One entry per incident face of a vertex v, in counter-clockwise order
  // around v as seen from outside. `edge` is the face's edge opposite v; the
  // link traversal direction is edge endpoint a -> b, and orientation = +1
  // when the canonical edge direction agrees with that traversal.
  struct LinkEntry {
    int face;
    int edge;
    int orientation;
  };
  std::vector<std::vector<LinkEntry>> linkOfVertex;

  // Faces incident to each vertex, ordered consistently with linkOfVertex.
  std::vector<std::vector<int>> facesOfVertex;

  // Consecutive pairs of edges emanating from a vertex (one pair per incident
  // face corner). Signs flip the canonical edge vector so it points away from
  // the vertex.
  struct EdgePair {
    int edgeA;
    int signA;
    int edgeB;
    int signB;
  };
  std::vector<std::vector<EdgePair>> adjacentEdgePairsOfVertex;

  int vertexCount() const { return static_cast<int>(positions.size()); }
  int faceCount() const { return static_cast<int>(faces.size()); }
  int edgeCount() const { return static_cast<int>(edges.size()); }

  // Index of the canonical edge {a, b}; throws InvalidArgument if absent.
  int edgeIndex(int a, int b) const;

  // Ring neighbours of v in counter-clockwise order (start vertices of the
  // link cycle edges).
  std::vector<int> vertexRing(int v) const;

 private:
  friend TriMesh build_combinatorics(std::vector<Vec3>, std::vector<std::array<int, 3>>);
  std::unordered_map<std::uint64_t, int> edgeLookup_;
};

TriMesh build_combinatorics(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces);

// Icosahedron subdivided `level` times with midpoint reprojection onto the
// sphere. level 0 gives 20 faces; each level multiplies faces by 4.
TriMesh make_icosphere(int level, double radius = 1.0, const Vec3& center = {});

TriMesh read_mesh(const std::string& path);
void write_mesh(const TriMesh& mesh, const std::string& path);
void write_mesh(const TriMesh& mesh, const Frame& frame, const std::string& path);

// Face-area floor for a frame: 1e-12 x (bounding-box diagonal)^2. Frames with
// any face at or below the floor are rejected as degenerate, since the face
// normal cross/|cross| is undefined at zero area.
double frame_area_floor(const Frame& frame);

// Smallest face area of the frame; positions must match the mesh.
double min_face_area(const TriMesh& mesh, const Frame& frame);

bool frame_is_admissible(const TriMesh& mesh, const Frame& frame);

// Throws DegenerateFrame if any face of the frame is at or below the floor.
void validate_frame(const TriMesh& mesh, const Frame& frame, const std::string& what);

// A time-indexed sequence of frames over one shared combinatorics.
// frames.front() and frames.back() are boundary data and are never moved by
// the solver.
struct ShapePath {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<Frame> frames;

  int timesteps() const { return static_cast<int>(frames.size()) - 1; }
};

// Validates frame count, sizes and the area floor on every frame.
ShapePath make_path(std::shared_ptr<const TriMesh> mesh, std::vector<Frame> frames);

}  // namespace shapegeo
