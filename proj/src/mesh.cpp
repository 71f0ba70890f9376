#include "mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "numfmt.hpp"

namespace shapegeo {

namespace {

std::uint64_t edge_key(int a, int b, int vertexCount) {
  if (a > b) std::swap(a, b);
  return static_cast<std::uint64_t>(a) * vertexCount + b;
}

}  // namespace

int TriMesh::edgeIndex(int a, int b) const {
  auto it = edgeLookup_.find(edge_key(a, b, vertexCount()));
  if (it == edgeLookup_.end())
    fail(ErrorCode::InvalidArgument, "no edge between vertices " + std::to_string(a) + " and " + std::to_string(b));
  return it->second;
}

std::vector<int> TriMesh::vertexRing(int v) const {
  std::vector<int> ring;
  ring.reserve(linkOfVertex[v].size());
  for (const LinkEntry& entry : linkOfVertex[v]) {
    const auto& e = edges[entry.edge];
    ring.push_back(entry.orientation > 0 ? e[0] : e[1]);
  }
  return ring;
}

TriMesh build_combinatorics(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces) {
  TriMesh mesh;
  mesh.positions = std::move(positions);
  mesh.faces = std::move(faces);
  const int nv = mesh.vertexCount();
  const int nf = mesh.faceCount();
  if (nv < 4 || nf < 4) fail(ErrorCode::InvalidArgument, "a closed triangle mesh needs at least 4 vertices and 4 faces");

  std::vector<bool> referenced(nv, false);
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      if (tri[c] < 0 || tri[c] >= nv)
        fail(ErrorCode::InvalidArgument, "face " + std::to_string(f) + " references vertex " + std::to_string(tri[c]));
      referenced[tri[c]] = true;
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " repeats a vertex index");
  }
  for (int v = 0; v < nv; ++v)
    if (!referenced[v]) fail(ErrorCode::InvalidArgument, "vertex " + std::to_string(v) + " is not referenced by any face");

  // Directed-edge census: a closed, consistently oriented surface traverses
  // every undirected edge exactly once in each direction.
  std::unordered_map<std::uint64_t, int> undirectedCount;
  std::unordered_map<std::uint64_t, int> directedFace;
  undirectedCount.reserve(nf * 3);
  directedFace.reserve(nf * 3);
  auto directed_key = [&](int a, int b) { return static_cast<std::uint64_t>(a) * nv + b; };
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      const int a = tri[c], b = tri[(c + 1) % 3];
      undirectedCount[edge_key(a, b, nv)]++;
      auto [it, inserted] = directedFace.emplace(directed_key(a, b), f);
      if (!inserted)
        fail(ErrorCode::InconsistentOrientation,
             "edge (" + std::to_string(a) + "," + std::to_string(b) + ") traversed in the same direction by faces " +
                 std::to_string(it->second) + " and " + std::to_string(f));
    }
  }
  for (const auto& [key, count] : undirectedCount) {
    if (count != 2) {
      const int a = static_cast<int>(key / nv), b = static_cast<int>(key % nv);
      fail(ErrorCode::NonManifoldEdge, "edge (" + std::to_string(a) + "," + std::to_string(b) + ") has " +
                                           std::to_string(count) + " incident faces, expected 2");
    }
  }

  // Canonical edges in first-appearance order.
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      const int a = std::min(tri[c], tri[(c + 1) % 3]);
      const int b = std::max(tri[c], tri[(c + 1) % 3]);
      const std::uint64_t key = edge_key(a, b, nv);
      if (mesh.edgeLookup_.emplace(key, mesh.edgeCount()).second) mesh.edges.push_back({a, b});
    }
  }

  // Per-vertex link cycles. For a face rotated to (v, a, b), the link edge of
  // v is a -> b; chaining b to the next face's start walks the link
  // counter-clockwise as seen from outside.
  std::vector<std::vector<std::array<int, 3>>> cornerOf(nv);  // v -> (a, b, face)
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    for (int c = 0; c < 3; ++c) cornerOf[tri[c]].push_back({tri[(c + 1) % 3], tri[(c + 2) % 3], f});
  }

  mesh.linkOfVertex.resize(nv);
  mesh.facesOfVertex.resize(nv);
  mesh.adjacentEdgePairsOfVertex.resize(nv);
  for (int v = 0; v < nv; ++v) {
    const auto& corners = cornerOf[v];
    std::unordered_map<int, std::pair<int, int>> next;  // a -> (b, face)
    next.reserve(corners.size());
    for (const auto& corner : corners) {
      if (!next.emplace(corner[0], std::make_pair(corner[1], corner[2])).second)
        fail(ErrorCode::InconsistentOrientation, "vertex " + std::to_string(v) + " has a forked link");
    }
    // Deterministic start: the corner of the lowest-indexed incident face.
    int start = corners[0][0];
    int bestFace = corners[0][2];
    for (const auto& corner : corners) {
      if (corner[2] < bestFace) {
        bestFace = corner[2];
        start = corner[0];
      }
    }
    int a = start;
    std::vector<TriMesh::LinkEntry>& link = mesh.linkOfVertex[v];
    for (size_t step = 0; step < corners.size(); ++step) {
      auto it = next.find(a);
      if (it == next.end())
        fail(ErrorCode::NonManifoldEdge, "link of vertex " + std::to_string(v) + " is not a closed cycle");
      const int b = it->second.first;
      const int face = it->second.second;
      const int edge = mesh.edgeIndex(a, b);
      link.push_back({face, edge, mesh.edges[edge][0] == a ? +1 : -1});
      mesh.facesOfVertex[v].push_back(face);
      a = b;
    }
    if (a != start)
      fail(ErrorCode::NonManifoldEdge, "link of vertex " + std::to_string(v) + " does not close up");

    auto emanating = [&](int neighbour) {
      const int e = mesh.edgeIndex(v, neighbour);
      return std::make_pair(e, mesh.edges[e][0] == v ? +1 : -1);
    };
    const int deg = static_cast<int>(link.size());
    for (int i = 0; i < deg; ++i) {
      const auto& e = mesh.edges[link[i].edge];
      const int ringA = link[i].orientation > 0 ? e[0] : e[1];
      const auto& eNext = mesh.edges[link[(i + 1) % deg].edge];
      const int ringB = link[(i + 1) % deg].orientation > 0 ? eNext[0] : eNext[1];
      const auto [ea, sa] = emanating(ringA);
      const auto [eb, sb] = emanating(ringB);
      mesh.adjacentEdgePairsOfVertex[v].push_back({ea, sa, eb, sb});
    }
  }

  return mesh;
}

namespace {

constexpr int kMaxIcosphereLevel = 6;

void icosahedron(std::vector<Vec3>& pos, std::vector<std::array<int, 3>>& faces) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  pos = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
         {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
           {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
}

}  // namespace

TriMesh make_icosphere(int level, double radius, const Vec3& center) {
  if (level < 0) fail(ErrorCode::InvalidArgument, "icosphere level must be non-negative");
  if (level > kMaxIcosphereLevel)
    fail(ErrorCode::LevelTooLarge, "icosphere level " + std::to_string(level) + " exceeds the maximum of " +
                                       std::to_string(kMaxIcosphereLevel));
  if (!(radius > 0)) fail(ErrorCode::InvalidArgument, "icosphere radius must be positive");

  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> faces;
  icosahedron(pos, faces);

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pos.push_back(0.5 * (pos[a] + pos[b]));
      midpoint.emplace(key, static_cast<int>(pos.size()) - 1);
      return static_cast<int>(pos.size()) - 1;
    };
    std::vector<std::array<int, 3>> refined;
    refined.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      refined.push_back({f[0], ab, ca});
      refined.push_back({f[1], bc, ab});
      refined.push_back({f[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    faces = std::move(refined);
  }

  for (Vec3& p : pos) p = center + (radius / norm(p)) * p;
  return build_combinatorics(std::move(pos), std::move(faces));
}

namespace {

enum class MeshFormat { Off, Obj };

MeshFormat format_from_path(const std::string& path) {
  const auto dotPos = path.find_last_of('.');
  std::string ext = dotPos == std::string::npos ? "" : path.substr(dotPos + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == "off") return MeshFormat::Off;
  if (ext == "obj") return MeshFormat::Obj;
  fail(ErrorCode::UnsupportedElement, "unrecognized mesh extension on '" + path + "' (expected .off or .obj)");
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    if (token[0] == '#') break;
    tokens.push_back(token);
  }
  return tokens;
}

[[noreturn]] void parse_fail(const std::string& path, int lineNo, const std::string& what) {
  fail(ErrorCode::ParseError, path + ":" + std::to_string(lineNo) + ": " + what);
}

double token_double(const std::string& path, int lineNo, const std::string& token) {
  if (auto v = parse_double(token)) return *v;
  parse_fail(path, lineNo, "expected a number, got '" + token + "'");
}

long long token_index(const std::string& path, int lineNo, const std::string& token) {
  // OBJ face entries may carry /texture/normal suffixes.
  const auto slash = token.find('/');
  const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  if (auto v = parse_int(head)) return *v;
  parse_fail(path, lineNo, "expected an index, got '" + token + "'");
}

TriMesh read_off(const std::string& path, std::istream& in) {
  std::string line;
  int lineNo = 0;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> rowLines;
  while (std::getline(in, line)) {
    ++lineNo;
    auto tokens = tokenize(line);
    if (!tokens.empty()) {
      rows.push_back(std::move(tokens));
      rowLines.push_back(lineNo);
    }
  }
  size_t row = 0;
  auto need_row = [&](const std::string& what) -> const std::vector<std::string>& {
    if (row >= rows.size()) parse_fail(path, lineNo, "unexpected end of file, expected " + what);
    return rows[row];
  };
  {
    const auto& header = need_row("OFF header");
    if (header.size() != 1 || header[0] != "OFF") parse_fail(path, rowLines[row], "expected OFF header");
    ++row;
  }
  const auto& counts = need_row("counts line");
  if (counts.size() < 2) parse_fail(path, rowLines[row], "expected '|V| |F| |E|' counts");
  const long long nv = token_index(path, rowLines[row], counts[0]);
  const long long nf = token_index(path, rowLines[row], counts[1]);
  ++row;
  if (nv <= 0 || nf <= 0) parse_fail(path, rowLines[row - 1], "vertex and face counts must be positive");

  std::vector<Vec3> pos;
  pos.reserve(nv);
  for (long long i = 0; i < nv; ++i) {
    const auto& r = need_row("vertex line");
    if (r.size() != 3) parse_fail(path, rowLines[row], "expected 'x y z'");
    pos.push_back({token_double(path, rowLines[row], r[0]), token_double(path, rowLines[row], r[1]),
                   token_double(path, rowLines[row], r[2])});
    ++row;
  }
  std::vector<std::array<int, 3>> faces;
  faces.reserve(nf);
  for (long long i = 0; i < nf; ++i) {
    const auto& r = need_row("face line");
    const long long arity = token_index(path, rowLines[row], r[0]);
    if (arity != 3)
      fail(ErrorCode::UnsupportedElement,
           path + ":" + std::to_string(rowLines[row]) + ": only triangle faces are supported, got " +
               std::to_string(arity) + " vertices");
    if (r.size() != 4) parse_fail(path, rowLines[row], "expected '3 i j k'");
    faces.push_back({static_cast<int>(token_index(path, rowLines[row], r[1])),
                     static_cast<int>(token_index(path, rowLines[row], r[2])),
                     static_cast<int>(token_index(path, rowLines[row], r[3]))});
    ++row;
  }
  return build_combinatorics(std::move(pos), std::move(faces));
}

TriMesh read_obj(const std::string& path, std::istream& in) {
  std::string line;
  int lineNo = 0;
  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> faces;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) parse_fail(path, lineNo, "expected 'v x y z'");
      pos.push_back({token_double(path, lineNo, tokens[1]), token_double(path, lineNo, tokens[2]),
                     token_double(path, lineNo, tokens[3])});
    } else if (tokens[0] == "f") {
      if (tokens.size() > 4)
        fail(ErrorCode::UnsupportedElement,
             path + ":" + std::to_string(lineNo) + ": only triangle faces are supported");
      if (tokens.size() != 4) parse_fail(path, lineNo, "expected 'f i j k'");
      std::array<int, 3> tri;
      for (int c = 0; c < 3; ++c) {
        const long long idx = token_index(path, lineNo, tokens[c + 1]);
        if (idx <= 0) parse_fail(path, lineNo, "face indices must be positive (1-based)");
        tri[c] = static_cast<int>(idx - 1);
      }
      faces.push_back(tri);
    }
    // Other directives (vn, vt, g, usemtl, ...) carry no geometry we keep.
  }
  return build_combinatorics(std::move(pos), std::move(faces));
}

}  // namespace

TriMesh read_mesh(const std::string& path) {
  const MeshFormat format = format_from_path(path);
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  return format == MeshFormat::Off ? read_off(path, in) : read_obj(path, in);
}

void write_mesh(const TriMesh& mesh, const Frame& frame, const std::string& path) {
  if (frame.size() != mesh.positions.size())
    fail(ErrorCode::InvalidArgument, "frame size does not match the mesh");
  const MeshFormat format = format_from_path(path);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  std::string buf;
  if (format == MeshFormat::Off) {
    buf += "OFF\n";
    buf += std::to_string(mesh.vertexCount()) + " " + std::to_string(mesh.faceCount()) + " 0\n";
    for (const Vec3& p : frame)
      buf += format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z) + "\n";
    for (const auto& f : mesh.faces)
      buf += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  } else {
    for (const Vec3& p : frame)
      buf += "v " + format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z) + "\n";
    for (const auto& f : mesh.faces)
      buf += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
  }
  out << buf;
  if (!out) fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

void write_mesh(const TriMesh& mesh, const std::string& path) { write_mesh(mesh, mesh.positions, path); }

double frame_area_floor(const Frame& frame) {
  Vec3 lo = frame.empty() ? Vec3{} : frame[0];
  Vec3 hi = lo;
  for (const Vec3& p : frame) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  return 1e-12 * norm2(hi - lo);
}

double min_face_area(const TriMesh& mesh, const Frame& frame) {
  double minArea = std::numeric_limits<double>::infinity();
  for (const auto& f : mesh.faces) {
    const double area = 0.5 * norm(cross(frame[f[1]] - frame[f[0]], frame[f[2]] - frame[f[0]]));
    minArea = std::min(minArea, area);
  }
  return minArea;
}

bool frame_is_admissible(const TriMesh& mesh, const Frame& frame) {
  return min_face_area(mesh, frame) > frame_area_floor(frame);
}

void validate_frame(const TriMesh& mesh, const Frame& frame, const std::string& what) {
  if (frame.size() != mesh.positions.size())
    fail(ErrorCode::SharedCombinatoricsMismatch, what + " has " + std::to_string(frame.size()) +
                                                     " vertices, mesh has " + std::to_string(mesh.vertexCount()));
  if (!frame_is_admissible(mesh, frame))
    fail(ErrorCode::DegenerateFrame, what + " contains a face at or below the area floor");
}

ShapePath make_path(std::shared_ptr<const TriMesh> mesh, std::vector<Frame> frames) {
  if (!mesh) fail(ErrorCode::InvalidArgument, "path needs a mesh");
  if (frames.size() < 3) fail(ErrorCode::InvalidArgument, "a path needs at least 2 timesteps (3 frames)");
  for (size_t t = 0; t < frames.size(); ++t)
    validate_frame(*mesh, frames[t], "frame " + std::to_string(t));
  return {std::move(mesh), std::move(frames)};
}

}  // namespace shapegeo
