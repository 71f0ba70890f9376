// Command-line front end for the shapegeo library.  All numerical work goes
// through the C API; this file only handles configuration, file naming and
// report assembly.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapegeo/shapegeo.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitMesh = 4;
constexpr int kExitNumeric = 5;

int exit_code_for(sg_status s) {
  switch (s) {
    case SG_OK: return 0;
    case SG_ERR_INVALID_ARGUMENT:
    case SG_ERR_CONFIG: return kExitConfig;
    case SG_ERR_IO: return kExitIo;
    case SG_ERR_NON_MANIFOLD_EDGE:
    case SG_ERR_INCONSISTENT_ORIENTATION:
    case SG_ERR_DEGENERATE_FACE:
    case SG_ERR_PARSE:
    case SG_ERR_UNSUPPORTED_ELEMENT:
    case SG_ERR_LEVEL_TOO_LARGE:
    case SG_ERR_DEGENERATE_ANGLE:
    case SG_ERR_ZERO_VECTOR_AREA:
    case SG_ERR_ZERO_LENGTH_EDGE:
    case SG_ERR_SHARED_COMBINATORICS_MISMATCH:
    case SG_ERR_DEGENERATE_FRAME:
    case SG_ERR_DEGENERATE_FRAME_ENCOUNTERED: return kExitMesh;
    case SG_ERR_DOMAIN:
    case SG_ERR_NO_ANALYTIC_FORM:
    case SG_ERR_FIT_FAILURE:
    case SG_ERR_UNSUPPORTED_WEIGHT:
    case SG_ERR_NO_POSITIVE_OPTIMUM:
    case SG_ERR_BLOWUP_DETECTED:
    case SG_ERR_STEP_FAILURE:
    case SG_ERR_INAPPLICABLE_BOUND: return kExitNumeric;
    default: return kExitInternal;
  }
}

// Thrown to unwind to main with a categorized exit code.
struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) { throw CliError{code, message}; }

void check(sg_status s, const std::string& what) {
  if (s != SG_OK) die(exit_code_for(s), what + ": " + sg_last_error());
}

// RAII wrappers around the C handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  explicit Handle(T* q) : p(q) {}
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    if (this != &o) {
      Free(p);
      p = o.p;
      o.p = nullptr;
    }
    return *this;
  }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using MeshHandle = Handle<sg_mesh, sg_mesh_free>;
using MetricHandle = Handle<sg_metric, sg_metric_free>;
using PathHandle = Handle<sg_path, sg_path_free>;
using ReportHandle = Handle<sg_report, sg_report_free>;

ordered_json load_config(const std::string& path, const std::vector<std::string>& sets) {
  ordered_json config = ordered_json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) die(kExitIo, "cannot open config file " + path);
    config = ordered_json::parse(in, nullptr, false);
    if (config.is_discarded()) die(kExitConfig, "config file " + path + " is not valid JSON");
    if (!config.is_object()) die(kExitConfig, "config root must be a JSON object");
  }
  for (const std::string& kv : sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) die(kExitConfig, "--set expects key=value, got " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    ordered_json value = ordered_json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // unquoted strings
    ordered_json* node = &config;
    size_t start = 0;
    for (size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
      const std::string part = key.substr(start, dot - start);
      if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = ordered_json::object();
      node = &(*node)[part];
      start = dot + 1;
    }
    (*node)[key.substr(start)] = std::move(value);
  }
  return config;
}

const ordered_json& must_get(const ordered_json& config, const std::string& key) {
  if (!config.contains(key)) die(kExitConfig, "config is missing required key '" + key + "'");
  return config.at(key);
}

std::string get_string(const ordered_json& config, const std::string& key) {
  const ordered_json& v = must_get(config, key);
  if (!v.is_string()) die(kExitConfig, "config key '" + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const ordered_json& config, const std::string& key, double fallback,
                  bool required = false) {
  if (!config.contains(key)) {
    if (required) die(kExitConfig, "config is missing required key '" + key + "'");
    return fallback;
  }
  if (!config.at(key).is_number()) die(kExitConfig, "config key '" + key + "' must be a number");
  return config.at(key).get<double>();
}

int get_int(const ordered_json& config, const std::string& key, int fallback,
            bool required = false) {
  if (!config.contains(key)) {
    if (required) die(kExitConfig, "config is missing required key '" + key + "'");
    return fallback;
  }
  if (!config.at(key).is_number_integer())
    die(kExitConfig, "config key '" + key + "' must be an integer");
  return config.at(key).get<int>();
}

MetricHandle parse_metric(const ordered_json& config) {
  const ordered_json& m = must_get(config, "metric");
  if (!m.is_object()) die(kExitConfig, "config key 'metric' must be a JSON object");
  MetricHandle metric;
  check(sg_metric_parse_json(m.dump().c_str(), metric.out()), "metric");
  return metric;
}

MeshHandle read_mesh_file(const std::string& path) {
  MeshHandle mesh;
  check(sg_mesh_read(path.c_str(), mesh.out()), path);
  return mesh;
}

std::string frame_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04d.off", t);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) die(kExitIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out.good()) die(kExitIo, "write to " + path.string() + " failed");
}

int run_make_sphere(const ordered_json& config, bool quiet) {
  const int level = get_int(config, "level", 0, true);
  const double radius = get_number(config, "radius", 1.0);
  double center[3] = {0, 0, 0};
  if (config.contains("center")) {
    const auto& c = config.at("center");
    if (!c.is_array() || c.size() != 3) die(kExitConfig, "'center' must be an array of 3 numbers");
    for (int i = 0; i < 3; ++i) center[i] = c.at(i).get<double>();
  }
  const std::string out = get_string(config, "out");

  MeshHandle mesh;
  check(sg_mesh_make_icosphere(level, radius, center, mesh.out()), "make-sphere");
  check(sg_mesh_write(mesh.get(), out.c_str()), out);
  if (!quiet)
    std::cout << "wrote " << out << " (" << sg_mesh_vertex_count(mesh.get()) << " vertices, "
              << sg_mesh_face_count(mesh.get()) << " faces)\n";
  return 0;
}

int run_sphere_ode(const ordered_json& config, bool quiet) {
  MetricHandle metric = parse_metric(config);
  const int samples = get_int(config, "samples", 101);
  const std::string csvOut = get_string(config, "csvOut");
  const double r0 = get_number(config, "r0", 0, true);

  const bool bvp = config.contains("r1");
  const bool ivp = config.contains("rdot0") || config.contains("tEnd");
  if (bvp && ivp) die(kExitConfig, "give either r1 (boundary problem) or rdot0+tEnd, not both");
  if (bvp) {
    check(sg_sphere_bvp_csv(metric.get(), r0, get_number(config, "r1", 0, true), samples,
                            csvOut.c_str()),
          "sphere-ode");
    if (!quiet) std::cout << "wrote " << csvOut << " (" << samples << " samples)\n";
  } else if (ivp) {
    int collapsed = 0;
    check(sg_sphere_ivp_csv(metric.get(), r0, get_number(config, "rdot0", 0, true),
                            get_number(config, "tEnd", 0, true), samples, csvOut.c_str(),
                            &collapsed),
          "sphere-ode");
    if (!quiet)
      std::cout << "wrote " << csvOut << (collapsed ? " (radius collapsed before tEnd)" : "")
                << "\n";
  } else {
    die(kExitConfig, "sphere-ode needs either r1 or rdot0+tEnd");
  }
  return 0;
}

PathHandle load_frame_dir(const std::string& dir, MeshHandle& first) {
  std::vector<std::string> names;
  for (int t = 0;; ++t) {
    const fs::path p = fs::path(dir) / frame_name(t);
    if (!fs::exists(p)) break;
    names.push_back(p.string());
  }
  if (names.size() < 3)
    die(kExitIo, "frame directory " + dir + " needs at least frame_0000.off..frame_0002.off");

  first = read_mesh_file(names[0]);
  PathHandle path;
  check(sg_path_new(first.get(), static_cast<int>(names.size()) - 1, path.out()), dir);
  std::vector<double> positions(3 * static_cast<size_t>(sg_mesh_vertex_count(first.get())));
  for (size_t t = 1; t < names.size(); ++t) {
    MeshHandle m = read_mesh_file(names[t]);
    if (!sg_mesh_same_faces(first.get(), m.get()))
      die(kExitMesh, names[t] + " does not share the combinatorics of " + names[0]);
    check(sg_mesh_positions(m.get(), positions.data()), names[t]);
    check(sg_path_set_frame(path.get(), static_cast<int>(t), positions.data()), names[t]);
  }
  return path;
}

int run_analyze(const ordered_json& config, bool quiet) {
  const std::string frameDir = get_string(config, "frameDir");
  const std::string csvOut = get_string(config, "csvOut");
  MetricHandle metric = parse_metric(config);

  MeshHandle first;
  PathHandle path = load_frame_dir(frameDir, first);
  check(sg_diagnostics_write_csv(path.get(), metric.get(), csvOut.c_str()), csvOut);

  double swept = 0, sweptFull = 0, length = 0;
  check(sg_diagnostics_summary(path.get(), metric.get(), &swept, &sweptFull, &length), frameDir);
  if (!quiet)
    std::cout << "wrote " << csvOut << " (sweptArea " << swept << ", pathLength " << length
              << ")\n";
  return 0;
}

int run_geodesic(const ordered_json& config, bool quiet) {
  const std::string startPath = get_string(config, "startMesh");
  const std::string endPath = get_string(config, "endMesh");
  const int timesteps = get_int(config, "timesteps", 0, true);
  const double penaltyFactor = get_number(config, "penaltyFactor", 1.0);
  const int penaltyExponent = get_int(config, "penaltyExponent", 2);
  const std::string outputDir = config.contains("outputDir") ? get_string(config, "outputDir") : ".";
  MetricHandle metric = parse_metric(config);

  sg_solver_config solver;
  sg_solver_config_default(&solver);
  if (config.contains("solver")) {
    const ordered_json& s = config.at("solver");
    if (!s.is_object()) die(kExitConfig, "config key 'solver' must be a JSON object");
    solver.max_iterations = get_int(s, "maxIterations", solver.max_iterations);
    solver.grad_tolerance = get_number(s, "gradTolerance", solver.grad_tolerance);
    solver.rel_energy_tolerance = get_number(s, "relEnergyTolerance", solver.rel_energy_tolerance);
    solver.memory = get_int(s, "memory", solver.memory);
    solver.c1 = get_number(s, "c1", solver.c1);
    solver.c2 = get_number(s, "c2", solver.c2);
  }
  solver.verbose = quiet ? 0 : 1;

  MeshHandle start = read_mesh_file(startPath);
  MeshHandle end = read_mesh_file(endPath);

  std::error_code ec;
  fs::create_directories(outputDir, ec);
  if (ec) die(kExitIo, "cannot create output directory " + outputDir);

  PathHandle path;
  ReportHandle report;
  check(sg_solve_geodesic(start.get(), end.get(), timesteps, metric.get(), penaltyFactor,
                          penaltyExponent, &solver, nullptr, path.out(), report.out()),
        "geodesic solve");

  ordered_json frames = ordered_json::array();
  for (int t = 0; t <= timesteps; ++t) {
    MeshHandle frame;
    check(sg_path_frame_mesh(path.get(), t, frame.out()), "frame export");
    const std::string name = frame_name(t);
    check(sg_mesh_write(frame.get(), (fs::path(outputDir) / name).string().c_str()), name);
    frames.push_back(name);
  }

  const std::string csvName = (fs::path(outputDir) / "diagnostics.csv").string();
  check(sg_diagnostics_write_csv(path.get(), metric.get(), csvName.c_str()), csvName);
  double swept = 0, sweptFull = 0, length = 0;
  check(sg_diagnostics_summary(path.get(), metric.get(), &swept, &sweptFull, &length),
        "diagnostics");

  ordered_json result;
  result["iterations"] = sg_report_iterations(report.get());
  result["reason"] = sg_report_reason(report.get());
  result["energy"] = sg_report_energy(report.get());
  result["penalty"] = sg_report_penalty(report.get());
  result["objective"] = sg_report_objective(report.get());
  result["gradInfNorm"] = sg_report_grad_inf_norm(report.get());
  ordered_json history = ordered_json::array();
  for (int i = 0; i < sg_report_history_size(report.get()); ++i)
    history.push_back(sg_report_history(report.get(), i));
  result["energyHistory"] = std::move(history);
  ordered_json steps = ordered_json::array();
  for (int t = 0; t < sg_report_step_energy_count(report.get()); ++t)
    steps.push_back(sg_report_step_energy(report.get(), t));
  result["perTimestepEnergy"] = std::move(steps);
  result["sweptArea"] = swept;
  result["sweptAreaFull"] = sweptFull;
  result["pathLength"] = length;
  result["frames"] = std::move(frames);

  ordered_json reportJson;
  reportJson["command"] = "geodesic";
  reportJson["config"] = config;
  reportJson["result"] = std::move(result);
  reportJson["timestamp"] = utc_timestamp();
  write_text(fs::path(outputDir) / "report.json", reportJson.dump(2) + "\n");

  if (!quiet)
    std::cout << "geodesic: " << sg_report_reason(report.get()) << " after "
              << sg_report_iterations(report.get())
              << " iterations, objective " << sg_report_objective(report.get()) << "; outputs in "
              << outputDir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "shapegeo: geodesics between closed triangulated surfaces under almost-local metrics.\n"
      "Exit codes: 0 success, 1 internal error, 2 configuration error, 3 I/O error,\n"
      "4 mesh error, 5 numerical error."};
  app.require_subcommand(1);

  std::string configPath;
  std::vector<std::string> sets;
  int threads = 0;
  bool quiet = false;
  app.add_option("--config", configPath, "JSON config file");
  app.add_option("--set", sets, "override a config key, e.g. --set metric.A=0.5")
      ->take_all()
      ->expected(-1);
  app.add_option("--threads", threads, "worker threads (default: library choice)");
  app.add_flag("--quiet", quiet, "suppress progress and summaries");

  CLI::App* geodesic = app.add_subcommand(
      "geodesic",
      "Solve the geodesic boundary-value problem between two meshes.\n"
      "Config keys: startMesh, endMesh, timesteps, metric, penaltyFactor (1),\n"
      "penaltyExponent (2), solver{maxIterations,gradTolerance,relEnergyTolerance,\n"
      "memory,c1,c2}, outputDir ('.'). Writes frame_XXXX.off, report.json,\n"
      "diagnostics.csv.");
  CLI::App* sphereOde = app.add_subcommand(
      "sphere-ode",
      "Concentric-sphere radius trajectories.\n"
      "Config keys: metric, r0 and either r1 (boundary problem) or rdot0+tEnd\n"
      "(initial value), samples (101), csvOut. Writes a t,r,r_t CSV.");
  CLI::App* analyze = app.add_subcommand(
      "analyze",
      "Diagnostics for an existing frame_XXXX.off sequence.\n"
      "Config keys: frameDir, metric, csvOut.");
  CLI::App* makeSphere = app.add_subcommand(
      "make-sphere",
      "Write an icosphere mesh.\n"
      "Config keys: level, radius (1), center ([0,0,0]), out.");
  for (CLI::App* sub : {geodesic, sphereOde, analyze, makeSphere}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  if (threads > 0) setenv("OMP_NUM_THREADS", std::to_string(threads).c_str(), 1);

  try {
    const ordered_json config = load_config(configPath, sets);
    if (geodesic->parsed()) return run_geodesic(config, quiet);
    if (sphereOde->parsed()) return run_sphere_ode(config, quiet);
    if (analyze->parsed()) return run_analyze(config, quiet);
    if (makeSphere->parsed()) return run_make_sphere(config, quiet);
    return kExitConfig;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
