#include "shapegeo/shapegeo.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <string>

#include "diagnostics.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "metric.hpp"
#include "optimizer.hpp"
#include "path_energy.hpp"
#include "sphere_analytics.hpp"

using namespace shapegeo;

struct sg_mesh {
  std::shared_ptr<const TriMesh> mesh;
};
struct sg_metric {
  MetricWeight w;
};
struct sg_geometry {
  VertexGeometry geo;
  int nv = 0;
};
struct sg_path {
  ShapePath path;
};
struct sg_report {
  SolveReport report;
};

namespace {

thread_local std::string g_lastError = "no error";

sg_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return SG_ERR_INVALID_ARGUMENT;
    case ErrorCode::NonManifoldEdge: return SG_ERR_NON_MANIFOLD_EDGE;
    case ErrorCode::InconsistentOrientation: return SG_ERR_INCONSISTENT_ORIENTATION;
    case ErrorCode::DegenerateFace: return SG_ERR_DEGENERATE_FACE;
    case ErrorCode::ParseError: return SG_ERR_PARSE;
    case ErrorCode::UnsupportedElement: return SG_ERR_UNSUPPORTED_ELEMENT;
    case ErrorCode::LevelTooLarge: return SG_ERR_LEVEL_TOO_LARGE;
    case ErrorCode::DegenerateAngle: return SG_ERR_DEGENERATE_ANGLE;
    case ErrorCode::ZeroVectorArea: return SG_ERR_ZERO_VECTOR_AREA;
    case ErrorCode::ZeroLengthEdge: return SG_ERR_ZERO_LENGTH_EDGE;
    case ErrorCode::DomainError: return SG_ERR_DOMAIN;
    case ErrorCode::NoAnalyticForm: return SG_ERR_NO_ANALYTIC_FORM;
    case ErrorCode::FitFailure: return SG_ERR_FIT_FAILURE;
    case ErrorCode::UnsupportedWeight: return SG_ERR_UNSUPPORTED_WEIGHT;
    case ErrorCode::NoPositiveOptimum: return SG_ERR_NO_POSITIVE_OPTIMUM;
    case ErrorCode::BlowupDetected: return SG_ERR_BLOWUP_DETECTED;
    case ErrorCode::StepFailure: return SG_ERR_STEP_FAILURE;
    case ErrorCode::SharedCombinatoricsMismatch: return SG_ERR_SHARED_COMBINATORICS_MISMATCH;
    case ErrorCode::DegenerateFrame: return SG_ERR_DEGENERATE_FRAME;
    case ErrorCode::DegenerateFrameEncountered: return SG_ERR_DEGENERATE_FRAME_ENCOUNTERED;
    case ErrorCode::InapplicableBound: return SG_ERR_INAPPLICABLE_BOUND;
    case ErrorCode::ConfigError: return SG_ERR_CONFIG;
    case ErrorCode::IoError: return SG_ERR_IO;
  }
  return SG_ERR_UNKNOWN;
}

template <class F>
sg_status guarded(F&& f) noexcept {
  try {
    f();
    return SG_OK;
  } catch (const Error& e) {
    g_lastError = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_lastError = e.what();
    return SG_ERR_UNKNOWN;
  } catch (...) {
    g_lastError = "unknown error";
    return SG_ERR_UNKNOWN;
  }
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

Frame frame_from(const double* positions, int nv) {
  Frame f(nv);
  for (int v = 0; v < nv; ++v) f[v] = {positions[3 * v], positions[3 * v + 1], positions[3 * v + 2]};
  return f;
}

void check_vertex(int v, int nv) {
  if (v < 0 || v >= nv) fail(ErrorCode::InvalidArgument, "vertex index out of range");
}

double nan_guarded(const std::function<double()>& f) noexcept {
  double out = std::numeric_limits<double>::quiet_NaN();
  guarded([&] { out = f(); });
  return out;
}

void check_timestep(const sg_path* path, int t) {
  if (t < 0 || t >= static_cast<int>(path->path.frames.size()))
    fail(ErrorCode::InvalidArgument, "timestep out of range");
}

}  // namespace

extern "C" {

const char* sg_last_error(void) { return g_lastError.c_str(); }

const char* sg_version(void) { return "0.1.0"; }

/* ---- meshes -------------------------------------------------------- */

sg_status sg_mesh_create(const double* positions, int vertex_count, const int* faces,
                         int face_count, sg_mesh** out) {
  return guarded([&] {
    require(positions, "positions");
    require(faces, "faces");
    require(out, "out");
    if (vertex_count < 0 || face_count < 0) fail(ErrorCode::InvalidArgument, "negative count");
    std::vector<std::array<int, 3>> fs(face_count);
    for (int i = 0; i < face_count; ++i) fs[i] = {faces[3 * i], faces[3 * i + 1], faces[3 * i + 2]};
    auto m = std::make_shared<TriMesh>(
        build_combinatorics(frame_from(positions, vertex_count), std::move(fs)));
    *out = new sg_mesh{std::move(m)};
  });
}

sg_status sg_mesh_make_icosphere(int level, double radius, const double center[3], sg_mesh** out) {
  return guarded([&] {
    require(out, "out");
    const Vec3 c = center ? Vec3{center[0], center[1], center[2]} : Vec3{};
    *out = new sg_mesh{std::make_shared<TriMesh>(make_icosphere(level, radius, c))};
  });
}

sg_status sg_mesh_read(const char* path, sg_mesh** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sg_mesh{std::make_shared<TriMesh>(read_mesh(path))};
  });
}

sg_status sg_mesh_write(const sg_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh, "mesh");
    require(path, "path");
    write_mesh(*mesh->mesh, path);
  });
}

void sg_mesh_free(sg_mesh* mesh) { delete mesh; }

int sg_mesh_vertex_count(const sg_mesh* mesh) { return mesh ? mesh->mesh->vertexCount() : 0; }
int sg_mesh_face_count(const sg_mesh* mesh) { return mesh ? mesh->mesh->faceCount() : 0; }
int sg_mesh_edge_count(const sg_mesh* mesh) { return mesh ? mesh->mesh->edgeCount() : 0; }

sg_status sg_mesh_positions(const sg_mesh* mesh, double* out) {
  return guarded([&] {
    require(mesh, "mesh");
    require(out, "out");
    for (int v = 0; v < mesh->mesh->vertexCount(); ++v) {
      out[3 * v] = mesh->mesh->positions[v].x;
      out[3 * v + 1] = mesh->mesh->positions[v].y;
      out[3 * v + 2] = mesh->mesh->positions[v].z;
    }
  });
}

sg_status sg_mesh_face(const sg_mesh* mesh, int face, int out[3]) {
  return guarded([&] {
    require(mesh, "mesh");
    require(out, "out");
    if (face < 0 || face >= mesh->mesh->faceCount())
      fail(ErrorCode::InvalidArgument, "face index out of range");
    for (int c = 0; c < 3; ++c) out[c] = mesh->mesh->faces[face][c];
  });
}

int sg_mesh_same_faces(const sg_mesh* a, const sg_mesh* b) {
  if (!a || !b) return 0;
  return a->mesh->faces == b->mesh->faces ? 1 : 0;
}

/* ---- metric weights ------------------------------------------------- */

sg_status sg_metric_parse_json(const char* json, sg_metric** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new sg_metric{metric_from_json(json)};
  });
}

int sg_metric_to_json(const sg_metric* metric, char* buf, int cap) {
  int written = -1;
  guarded([&] {
    require(metric, "metric");
    const std::string s = metric_to_json(metric->w);
    if (buf && cap > 0) {
      const int n = std::min<int>(cap - 1, static_cast<int>(s.size()));
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
    written = static_cast<int>(s.size());
  });
  return written;
}

void sg_metric_free(sg_metric* metric) { delete metric; }

double sg_metric_evaluate(const sg_metric* metric, double vol, double trl2) {
  return nan_guarded([&] {
    require(metric, "metric");
    return evaluate(metric->w, vol, trl2);
  });
}

void sg_metric_partials(const sg_metric* metric, double vol, double trl2, double* d_vol,
                        double* d_trl2) {
  guarded([&] {
    require(metric, "metric");
    const Partials p = partials(metric->w, vol, trl2);
    if (d_vol) *d_vol = p.dVol;
    if (d_trl2) *d_trl2 = p.dTrl2;
  });
}

/* ---- per-frame geometry --------------------------------------------- */

sg_status sg_geometry_compute(const sg_mesh* mesh, const double* positions, sg_geometry** out) {
  return guarded([&] {
    require(mesh, "mesh");
    require(out, "out");
    const int nv = mesh->mesh->vertexCount();
    const Frame frame = positions ? frame_from(positions, nv) : mesh->mesh->positions;
    *out = new sg_geometry{compute_geometry(*mesh->mesh, frame, true), nv};
  });
}

void sg_geometry_free(sg_geometry* geo) { delete geo; }

double sg_geometry_total_area(const sg_geometry* geo) {
  return nan_guarded([&] {
    require(geo, "geometry");
    return geo->geo.totalArea;
  });
}

double sg_geometry_vertex_area(const sg_geometry* geo, int vertex) {
  return nan_guarded([&] {
    require(geo, "geometry");
    check_vertex(vertex, geo->nv);
    return geo->geo.vertexArea[vertex];
  });
}

double sg_geometry_trl2(const sg_geometry* geo, int vertex) {
  return nan_guarded([&] {
    require(geo, "geometry");
    check_vertex(vertex, geo->nv);
    return geo->geo.trl2[vertex];
  });
}

sg_status sg_geometry_vector_area(const sg_geometry* geo, int vertex, double out[3]) {
  return guarded([&] {
    require(geo, "geometry");
    require(out, "out");
    check_vertex(vertex, geo->nv);
    const Vec3& v = geo->geo.vectorArea[vertex];
    out[0] = v.x;
    out[1] = v.y;
    out[2] = v.z;
  });
}

sg_status sg_geometry_vector_mean_curvature(const sg_geometry* geo, int vertex, double out[3]) {
  return guarded([&] {
    require(geo, "geometry");
    require(out, "out");
    check_vertex(vertex, geo->nv);
    const Vec3& v = geo->geo.vectorMeanCurvature[vertex];
    out[0] = v.x;
    out[1] = v.y;
    out[2] = v.z;
  });
}

/* ---- paths ----------------------------------------------------------- */

sg_status sg_path_new(const sg_mesh* mesh, int timesteps, sg_path** out) {
  return guarded([&] {
    require(mesh, "mesh");
    require(out, "out");
    if (timesteps < 2) fail(ErrorCode::InvalidArgument, "need at least 2 timesteps");
    std::vector<Frame> frames(timesteps + 1, mesh->mesh->positions);
    *out = new sg_path{ShapePath{mesh->mesh, std::move(frames)}};
  });
}

sg_status sg_path_set_frame(sg_path* path, int t, const double* positions) {
  return guarded([&] {
    require(path, "path");
    require(positions, "positions");
    check_timestep(path, t);
    path->path.frames[t] = frame_from(positions, path->path.mesh->vertexCount());
  });
}

sg_status sg_path_get_frame(const sg_path* path, int t, double* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    check_timestep(path, t);
    const Frame& f = path->path.frames[t];
    for (size_t v = 0; v < f.size(); ++v) {
      out[3 * v] = f[v].x;
      out[3 * v + 1] = f[v].y;
      out[3 * v + 2] = f[v].z;
    }
  });
}

sg_status sg_path_frame_mesh(const sg_path* path, int t, sg_mesh** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    check_timestep(path, t);
    auto copy = std::make_shared<TriMesh>(*path->path.mesh);
    copy->positions = path->path.frames[t];
    *out = new sg_mesh{std::move(copy)};
  });
}

int sg_path_timesteps(const sg_path* path) { return path ? path->path.timesteps() : 0; }
int sg_path_vertex_count(const sg_path* path) {
  return path ? path->path.mesh->vertexCount() : 0;
}

void sg_path_free(sg_path* path) { delete path; }

sg_status sg_path_objective(const sg_path* path, const sg_metric* metric, double penalty_factor,
                            int penalty_exponent, double* energy, double* penalty,
                            double* objective_out) {
  return guarded([&] {
    require(path, "path");
    require(metric, "metric");
    const EnergyBreakdown b = objective(path->path, metric->w, penalty_factor, penalty_exponent);
    if (energy) *energy = b.energy;
    if (penalty) *penalty = b.penalty;
    if (objective_out) *objective_out = b.objective;
  });
}

/* ---- geodesic solver -------------------------------------------------- */

void sg_solver_config_default(sg_solver_config* config) {
  if (!config) return;
  const SolverConfig d;
  config->max_iterations = d.maxIterations;
  config->grad_tolerance = d.gradTolerance;
  config->rel_energy_tolerance = d.relEnergyTolerance;
  config->memory = d.memory;
  config->c1 = d.c1;
  config->c2 = d.c2;
  config->verbose = d.verbose ? 1 : 0;
}

sg_status sg_solve_geodesic(const sg_mesh* start, const sg_mesh* end, int timesteps,
                            const sg_metric* metric, double penalty_factor, int penalty_exponent,
                            const sg_solver_config* config, const sg_path* initial_path,
                            sg_path** out_path, sg_report** out_report) {
  return guarded([&] {
    require(start, "start");
    require(end, "end");
    require(metric, "metric");
    if (!sg_mesh_same_faces(start, end))
      fail(ErrorCode::SharedCombinatoricsMismatch, "start and end meshes differ in combinatorics");
    SolverConfig cfg;
    if (config) {
      cfg.maxIterations = config->max_iterations;
      cfg.gradTolerance = config->grad_tolerance;
      cfg.relEnergyTolerance = config->rel_energy_tolerance;
      cfg.memory = config->memory;
      cfg.c1 = config->c1;
      cfg.c2 = config->c2;
      cfg.verbose = config->verbose != 0;
    }
    auto [path, report] =
        solve_geodesic(start->mesh, start->mesh->positions, end->mesh->positions, timesteps,
                       metric->w, penalty_factor, penalty_exponent, cfg,
                       initial_path ? &initial_path->path : nullptr);
    if (out_path) *out_path = new sg_path{std::move(path)};
    if (out_report) *out_report = new sg_report{std::move(report)};
  });
}

int sg_report_iterations(const sg_report* report) { return report ? report->report.iterations : 0; }
double sg_report_energy(const sg_report* report) {
  return report ? report->report.final.energy : std::numeric_limits<double>::quiet_NaN();
}
double sg_report_penalty(const sg_report* report) {
  return report ? report->report.final.penalty : std::numeric_limits<double>::quiet_NaN();
}
double sg_report_objective(const sg_report* report) {
  return report ? report->report.final.objective : std::numeric_limits<double>::quiet_NaN();
}
double sg_report_grad_inf_norm(const sg_report* report) {
  return report ? report->report.gradInfNorm : std::numeric_limits<double>::quiet_NaN();
}
const char* sg_report_reason(const sg_report* report) {
  return report ? termination_name(report->report.reason) : "Unknown";
}
int sg_report_history_size(const sg_report* report) {
  return report ? static_cast<int>(report->report.energyHistory.size()) : 0;
}
double sg_report_history(const sg_report* report, int i) {
  if (!report || i < 0 || i >= sg_report_history_size(report))
    return std::numeric_limits<double>::quiet_NaN();
  return report->report.energyHistory[i];
}
int sg_report_step_energy_count(const sg_report* report) {
  return report ? static_cast<int>(report->report.final.perTimestepEnergy.size()) : 0;
}
double sg_report_step_energy(const sg_report* report, int t) {
  if (!report || t < 0 || t >= sg_report_step_energy_count(report))
    return std::numeric_limits<double>::quiet_NaN();
  return report->report.final.perTimestepEnergy[t];
}
void sg_report_free(sg_report* report) { delete report; }

/* ---- diagnostics ------------------------------------------------------ */

sg_status sg_diagnostics_write_csv(const sg_path* path, const sg_metric* metric,
                                   const char* csv_path) {
  return guarded([&] {
    require(path, "path");
    require(metric, "metric");
    require(csv_path, "csv_path");
    write_diagnostics_csv(csv_path, path_diagnostics(path->path, metric->w));
  });
}

sg_status sg_diagnostics_summary(const sg_path* path, const sg_metric* metric, double* swept_area,
                                 double* swept_area_full, double* path_length) {
  return guarded([&] {
    require(path, "path");
    require(metric, "metric");
    const PathDiagnostics d = path_diagnostics(path->path, metric->w);
    if (swept_area) *swept_area = d.sweptArea;
    if (swept_area_full) *swept_area_full = d.sweptAreaFull;
    if (path_length) *path_length = d.pathLength;
  });
}

sg_status sg_swept_area_bounds(const sg_path* path, const sg_metric* metric, const double* c1,
                               const double* c2, const double* c,
                               sg_bound_check* swept_vs_max_vol, sg_bound_check* vol_lipschitz,
                               sg_bound_check* swept_vs_length) {
  return guarded([&] {
    require(path, "path");
    require(metric, "metric");
    auto opt = [](const double* p) { return p ? std::optional<double>(*p) : std::nullopt; };
    const SweptAreaBounds b = swept_area_bounds(path->path, metric->w, opt(c1), opt(c2), opt(c));
    auto put = [](sg_bound_check* out, const BoundCheck& in) {
      if (!out) return;
      out->applicable = in.applicable ? 1 : 0;
      out->lhs = in.lhs;
      out->rhs = in.rhs;
    };
    put(swept_vs_max_vol, b.sweptVsMaxVol);
    put(vol_lipschitz, b.volLipschitz);
    put(swept_vs_length, b.sweptVsLength);
  });
}

sg_status sg_g0_curvature(const sg_mesh* mesh, const double* positions, const double* a1,
                          const double* a2, double* out) {
  return guarded([&] {
    require(mesh, "mesh");
    require(a1, "a1");
    require(a2, "a2");
    require(out, "out");
    const int nv = mesh->mesh->vertexCount();
    const Frame frame = positions ? frame_from(positions, nv) : mesh->mesh->positions;
    *out = g0_curvature_quadrature(*mesh->mesh, frame, std::vector<double>(a1, a1 + nv),
                                   std::vector<double>(a2, a2 + nv));
  });
}

/* ---- sphere analytics -------------------------------------------------- */

sg_status sg_radius_ode_rhs(const sg_metric* metric, double r, double rdot, int n, double* out) {
  return guarded([&] {
    require(metric, "metric");
    require(out, "out");
    *out = radius_ode_rhs(r, rdot, metric->w, n);
  });
}

sg_status sg_translation_energy(const sg_metric* metric, double r, double ell, double* out) {
  return guarded([&] {
    require(metric, "metric");
    require(out, "out");
    *out = translation_energy(metric->w, r, ell);
  });
}

sg_status sg_shrink_grow_energy(const sg_metric* metric, double r, double* out) {
  return guarded([&] {
    require(metric, "metric");
    require(out, "out");
    *out = shrink_grow_energy(metric->w, r);
  });
}

sg_status sg_crossover_length(const sg_metric* metric, double r, double* out) {
  return guarded([&] {
    require(metric, "metric");
    require(out, "out");
    *out = crossover_length(metric->w, r);
  });
}

sg_status sg_optimal_translation_radius(double A, int k, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = optimal_translation_radius(A, k);
  });
}

sg_status sg_completeness(const sg_metric* metric, int n, int* complete_at_zero,
                          int* complete_at_infinity) {
  return guarded([&] {
    require(metric, "metric");
    const Completeness c = completeness(metric->w, n);
    if (complete_at_zero) *complete_at_zero = c.completeAtZero ? 1 : 0;
    if (complete_at_infinity) *complete_at_infinity = c.completeAtInfinity ? 1 : 0;
  });
}

sg_status sg_sphere_bvp_csv(const sg_metric* metric, double r0, double r1, int samples,
                            const char* csv_path) {
  return guarded([&] {
    require(metric, "metric");
    require(csv_path, "csv_path");
    if (samples < 2) fail(ErrorCode::InvalidArgument, "need at least 2 samples");
    const RadiusCurve curve = closed_form_radius(metric->w, r0, r1);
    OdeResult res;
    for (int i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / (samples - 1);
      res.samples.push_back({t, curve.r(t), curve.rdot(t)});
    }
    write_radius_csv(csv_path, res);
  });
}

sg_status sg_sphere_ivp_csv(const sg_metric* metric, double r0, double rdot0, double t_end,
                            int samples, const char* csv_path, int* collapsed) {
  return guarded([&] {
    require(metric, "metric");
    require(csv_path, "csv_path");
    const OdeResult res = integrate_radius_ode(metric->w, r0, rdot0, t_end, 3, samples);
    write_radius_csv(csv_path, res);
    if (collapsed) *collapsed = res.collapsed ? 1 : 0;
  });
}

}  // extern "C"
