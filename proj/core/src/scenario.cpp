#include "lab/scenario.hpp"

#include "lab/json_io.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace lab {

namespace {

using nlohmann::json;

SamplingBudget budget_from_json(const json& j) {
  SamplingBudget b;
  b.geodesics = j.value("geodesics", b.geodesics);
  b.geodesic_length = j.value("geodesic_length", b.geodesic_length);
  b.geodesic_dt = j.value("geodesic_dt", b.geodesic_dt);
  b.walks = j.value("walks", b.walks);
  b.walk_steps = j.value("walk_steps", b.walk_steps);
  b.walk_step_len = j.value("walk_step_len", b.walk_step_len);
  b.l_min = j.value("l_min", b.l_min);
  b.frak_scan_hmax = j.value("frak_scan_hmax", b.frak_scan_hmax);
  b.frak_resolution = j.value("frak_resolution", b.frak_resolution);
  b.norm_dir_radius = j.value("norm_dir_radius", b.norm_dir_radius);
  b.norm_n_max = j.value("norm_n_max", b.norm_n_max);
  return b;
}

json budget_to_json(const SamplingBudget& b) {
  return json{{"geodesics", b.geodesics},
              {"geodesic_length", b.geodesic_length},
              {"geodesic_dt", b.geodesic_dt},
              {"walks", b.walks},
              {"walk_steps", b.walk_steps},
              {"walk_step_len", b.walk_step_len},
              {"l_min", b.l_min},
              {"frak_scan_hmax", b.frak_scan_hmax},
              {"frak_resolution", b.frak_resolution},
              {"norm_dir_radius", b.norm_dir_radius},
              {"norm_n_max", b.norm_n_max}};
}

CertifyBudget certify_budget_from_json(const json& j, std::uint64_t seed) {
  CertifyBudget b;
  b.vicious_resolution = j.value("vicious_resolution", 0);
  if (j.contains("cone")) b.cone = budget_from_json(j["cone"]);
  b.grid_per_axis = j.value("grid_per_axis", 0);
  b.rays_per_point = j.value("rays_per_point", 0);
  b.margin = j.value("margin", 1e-3);
  b.p01a_samples = j.value("p01a_samples", 64);
  b.seed = seed;
  return b;
}

json certify_budget_to_json(const CertifyBudget& b) {
  return json{{"vicious_resolution", b.vicious_resolution},
              {"cone", budget_to_json(b.cone)},
              {"grid_per_axis", b.grid_per_axis},
              {"rays_per_point", b.rays_per_point},
              {"margin", b.margin},
              {"p01a_samples", b.p01a_samples}};
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InvalidInput("config field '" + field + "': " + what);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

std::string csv_of_points(const std::vector<Vec>& pts) {
  std::ostringstream os;
  if (pts.empty()) return "";
  for (int i = 0; i < pts.front().size(); ++i) os << (i ? ",x" : "x") << i;
  os << "\n";
  for (const auto& p : pts) {
    for (int i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << "\n";
  }
  return os.str();
}

struct TaskContext {
  const MetricField& field;
  const Scenario& scenario;
  std::filesystem::path out_dir;
  std::uint64_t task_seed;
  int index;
};

// each runner returns the report body ("result") and may write CSV siblings
json run_cone_estimate(const TaskContext& ctx, const json& params) {
  const SamplingBudget budget = budget_from_json(params.value("budget", json::object()));
  auto est = estimate_stable_cone(ctx.field, budget, ctx.task_seed);
  est.err_est = check_p01a(ctx.field, est, params.value("p01a_samples", 64), ctx.task_seed)
                    .err_est;
  json result = est.to_json();
  result["resolved_budget"] = budget_to_json(budget);
  write_text(ctx.out_dir / ("task_" + std::to_string(ctx.index) + "_cone_section.csv"),
             csv_of_points(est.cross_section));
  return result;
}

json run_timesep(const TaskContext& ctx, const json& params) {
  std::vector<std::pair<Vec, Vec>> pairs;
  json jpairs = params.value("pairs", json::array());
  if (params.contains("file")) {
    std::ifstream is(params["file"].get<std::string>());
    require(is.good(), "tasks[].params.file", "cannot open the query file");
    json batch;
    is >> batch;
    jpairs = batch;
  }
  require(jpairs.is_array() && !jpairs.empty(), "tasks[].params.pairs",
          "expected a nonempty array of [p, q] pairs");
  for (const auto& pq : jpairs) {
    require(pq.is_array() && pq.size() == 2, "tasks[].params.pairs", "entries must be [p, q]");
    pairs.emplace_back(vec_from_json(pq[0]), vec_from_json(pq[1]));
  }
  const int segments = params.value("segments", 8);
  const int restarts = params.value("restarts", 16);
  require(segments >= 2, "tasks[].params.segments", "must be >= 2");

  json rows = json::array();
  int qi = 0;
  for (const auto& [p, q] : pairs) {
    const auto r = time_separation(ctx.field, p, q, segments, restarts, ctx.task_seed + qi);
    json row;
    row["p"] = to_json(p);
    row["q"] = to_json(q);
    row["value"] = r.value;
    row["converged"] = r.converged;
    row["restarts_used"] = r.restarts_used;
    row["projection_events"] = r.projection_events;
    json trace = json::array();
    for (const auto& [legs, value] : r.refinement_trace)
      trace.push_back(json{{"legs", legs}, {"value", value}});
    row["refinement_trace"] = trace;
    if (!r.path.vertices.empty()) {
      std::ostringstream os;
      write_csv(r.path, os);
      write_text(ctx.out_dir / ("task_" + std::to_string(ctx.index) + "_path_" +
                                std::to_string(qi) + ".csv"),
                 os.str());
    }
    rows.push_back(row);
    ++qi;
  }
  return json{{"segments", segments}, {"restarts", restarts}, {"queries", rows}};
}

json run_certify(const TaskContext& ctx, const json& params) {
  const CertifyBudget budget = certify_budget_from_json(params, ctx.task_seed);
  const Certificate cert = certify_class_a(ctx.field, budget);
  json result = cert.to_json();
  result["resolved_budget"] = certify_budget_to_json(budget);
  return result;
}

json run_lipschitz(const TaskContext& ctx, const json& params) {
  const double eps = params.value("eps", 0.2);
  const int samples = params.value("samples", 256);
  require(eps > 0, "tasks[].params.eps", "must be positive");
  require(samples >= 1, "tasks[].params.samples", "must be >= 1");
  const SamplingBudget budget = budget_from_json(params.value("budget", json::object()));
  const auto est = estimate_stable_cone(ctx.field, budget, ctx.task_seed);
  LipschitzOptions opt;
  opt.segments = params.value("segments", opt.segments);
  opt.restarts = params.value("restarts", opt.restarts);
  const auto rep = coarse_lipschitz(ctx.field, est, eps, samples, ctx.task_seed, opt);
  json result = rep.to_json();
  result["resolved_budget"] = budget_to_json(budget);
  // histogram CSV
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b + 1 < rep.hist_edges.size(); ++b)
    os << rep.hist_edges[b] << "," << rep.hist_edges[b + 1] << "," << rep.hist_counts[b]
       << "\n";
  write_text(ctx.out_dir / ("task_" + std::to_string(ctx.index) + "_lipschitz_hist.csv"),
             os.str());
  return result;
}

json run_sctp(const TaskContext& ctx, const json& params) {
  require(params.contains("alpha"), "tasks[].params.alpha", "is required");
  const Vec alpha = vec_from_json(params["alpha"]);
  SctpOptions opt;
  opt.resolution = params.value("resolution", opt.resolution);
  opt.max_n0 = params.value("max_n0", opt.max_n0);
  return sctp_check(ctx.field, alpha, opt).to_json();
}

json run_frak_f(const TaskContext& ctx, const json& params) {
  const int resolution = params.value("resolution", 32);
  require(resolution >= 16, "tasks[].params.resolution", "must be >= 16");
  json result;
  if (params.contains("h")) {
    const VecI h = veci_from_json(params["h"]);
    const auto e = frak_f(ctx.field, h, resolution);
    result = json{{"h", to_json(h)},
                  {"f_of_h", e.f_of_h},
                  {"minimizing_x", to_json(e.minimizing_x)},
                  {"boundary_active", e.boundary_active}};
  } else {
    const int hmax = params.value("hmax", 4);
    FrakFOptions opt;
    opt.hmax = hmax;
    const auto table = build_frak_f_table(ctx.field, resolution, opt);
    json rows = json::array();
    const int n = ctx.field.dim();
    const int side = 2 * hmax + 1;
    std::int64_t slots = 1;
    for (int i = 0; i < n; ++i) slots *= side;
    for (std::int64_t t = 0; t < slots; ++t) {
      std::int64_t r = t;
      VecI h(n);
      for (int i = n - 1; i >= 0; --i) {
        h[i] = static_cast<int>(r % side) - hmax;
        r /= side;
      }
      const auto e = table.at(h);
      rows.push_back(json{{"h", to_json(h)},
                          {"f_of_h", e.f_of_h},
                          {"boundary_active", e.boundary_active}});
    }
    result = json{{"hmax", hmax}, {"cell", table.cell()}, {"values", rows}};
  }
  result["resolution"] = resolution;
  return result;
}

json run_stable_norm(const TaskContext& ctx, const json& params) {
  require(params.contains("h"), "tasks[].params.h", "is required");
  const VecI h = veci_from_json(params["h"]);
  const int n_max = params.value("n_max", 64);
  require(n_max >= 8, "tasks[].params.n_max", "must be >= 8");
  StableNormOptions opt;
  opt.resolution = params.value("resolution", opt.resolution);
  const auto r = stable_norm(ctx.field, h, n_max, opt);
  std::ostringstream os;
  os << "n,dist_over_n\n";
  for (std::size_t n = 0; n < r.trace.size(); ++n) os << n + 1 << "," << r.trace[n] << "\n";
  write_text(ctx.out_dir / ("task_" + std::to_string(ctx.index) + "_plateau.csv"), os.str());
  return json{{"h", to_json(h)},
              {"n_max", n_max},
              {"norm", r.norm},
              {"std_est", r.std_est},
              {"dists", r.dists},
              {"trace", r.trace}};
}

json run_p01a(const TaskContext& ctx, const json& params) {
  const SamplingBudget budget = budget_from_json(params.value("budget", json::object()));
  const int samples = params.value("samples", 64);
  const int resolution = params.value("resolution", 32);
  const double range = params.value("h_norm_range", 2.5);
  const auto est = estimate_stable_cone(ctx.field, budget, ctx.task_seed);
  const auto rep = check_p01a(ctx.field, est, samples, ctx.task_seed, resolution, range);
  return json{{"err_est", rep.err_est},
              {"samples", samples},
              {"resolution", resolution},
              {"h_norm_range", range},
              {"forward_samples", rep.forward_samples},
              {"backward_samples", rep.backward_samples},
              {"resolved_budget", budget_to_json(budget)}};
}

json run_flow_rho(const TaskContext& ctx, const json& params) {
  const VectorFieldSpec field = VectorFieldSpec::from_json(params.value("field", json::object()));
  const double T = params.value("T", 100.0);
  require(T > 0, "tasks[].params.T", "must be positive");
  Vec x0 = Vec::Zero(ctx.field.dim());
  if (params.contains("x0")) x0 = vec_from_json(params["x0"]);
  const Vec rho = flow_rotation_vector(ctx.field, field, x0, T);
  const SamplingBudget budget = budget_from_json(params.value("budget", json::object()));
  const auto est = estimate_stable_cone(ctx.field, budget, ctx.task_seed);
  const double dist = exterior_distance(est.cone, rho, NormModel::euclidean(ctx.field.dim()));
  return json{{"field", field.to_json()},
              {"T", T},
              {"x0", to_json(x0)},
              {"rho", to_json(rho)},
              {"cone_distance", dist},
              {"resolved_budget", budget_to_json(budget)}};
}

json run_perturb(const TaskContext& ctx, const json& params) {
  const double amplitude = params.value("amplitude", 0.05);
  const CertifyBudget budget = certify_budget_from_json(params, ctx.task_seed);
  const Certificate cert = perturbation_smoke_test(ctx.scenario.preset, amplitude, budget);
  json result = cert.to_json();
  result["amplitude"] = amplitude;
  result["resolved_budget"] = certify_budget_to_json(budget);
  return result;
}

json run_reach(const TaskContext& ctx, const json& params) {
  const int resolution = params.value("resolution", 48);
  require(resolution >= 16, "tasks[].params.resolution", "must be >= 16");
  Vec x = Vec::Zero(ctx.field.dim());
  if (params.contains("x")) x = vec_from_json(params["x"]);
  const int w = params.value("window", 2);
  const auto reach = forward_reach(ctx.field, x, VecI::Constant(ctx.field.dim(), -w),
                                   VecI::Constant(ctx.field.dim(), w), resolution);
  std::ostringstream os;
  reach.write_csv(os);
  write_text(ctx.out_dir / ("task_" + std::to_string(ctx.index) + "_reach_points.csv"),
             os.str());
  // a downsampled slice kept in the report for re-plotting
  std::vector<Vec> sample;
  const int stride = std::max<std::int64_t>(1, reach.reached_count() / 20000);
  std::int64_t seen = 0;
  for (std::int64_t i = 0; i < reach.geom.total; ++i) {
    if (!reach.reached[i]) continue;
    if (seen++ % stride) continue;
    sample.push_back(reach.geom.point(reach.geom.unindex(i)));
  }
  json pts = json::array();
  for (const auto& p : sample) pts.push_back(to_json(p));
  return json{{"resolution", resolution},
              {"window", w},
              {"x", to_json(x)},
              {"reached_count", reach.reached_count()},
              {"points", pts}};
}

using TaskRunner = json (*)(const TaskContext&, const json&);

const std::map<std::string, TaskRunner>& runners() {
  static const std::map<std::string, TaskRunner> r = {
      {"cone_estimate", run_cone_estimate}, {"timesep", run_timesep},
      {"certify", run_certify},             {"lipschitz", run_lipschitz},
      {"sctp", run_sctp},                   {"frak_f", run_frak_f},
      {"stable_norm", run_stable_norm},     {"p01a", run_p01a},
      {"flow_rho", run_flow_rho},           {"perturb", run_perturb},
      {"reach", run_reach},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& known_task_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : runners()) k.push_back(name);
    return k;
  }();
  return kinds;
}

Scenario Scenario::from_json(const json& j) {
  Scenario s;
  require(j.is_object(), "<root>", "config must be a JSON object");
  require(j.contains("preset"), "preset", "is required");
  s.preset = PresetSpec::from_json(j["preset"]);
  s.seed = j.value("seed", 0ull);
  s.output_dir = j.value("output_dir", std::string("out"));
  require(j.contains("tasks") && j["tasks"].is_array(), "tasks", "must be an array");
  int idx = 0;
  for (const auto& t : j["tasks"]) {
    require(t.is_object() && t.contains("kind") && t["kind"].is_string(),
            "tasks[" + std::to_string(idx) + "].kind", "must be a string");
    TaskSpec spec;
    spec.kind = t["kind"].get<std::string>();
    require(runners().count(spec.kind) != 0, "tasks[" + std::to_string(idx) + "].kind",
            "unknown task kind '" + spec.kind + "'");
    spec.params = t.value("params", json::object());
    require(spec.params.is_object(), "tasks[" + std::to_string(idx) + "].params",
            "must be an object");
    s.tasks.push_back(std::move(spec));
    ++idx;
  }
  return s;
}

json Scenario::resolved() const {
  json j;
  j["preset"] = preset.to_json();
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  json ts = json::array();
  for (const auto& t : tasks) ts.push_back(json{{"kind", t.kind}, {"params", t.params}});
  j["tasks"] = ts;
  return j;
}

int run_scenario(const Scenario& scenario, const RunOptions& options) {
  MetricField field;
  try {
    field = make_preset(scenario.preset);
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  const std::filesystem::path out_dir =
      options.output_dir_override.empty() ? scenario.output_dir : options.output_dir_override;
  std::filesystem::create_directories(out_dir);

  int threads = options.threads;
  if (threads <= 0) {
    if (const char* env = std::getenv("LAB_THREADS")) threads = std::atoi(env);
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }

  std::vector<std::string> report_files(scenario.tasks.size());
  std::vector<int> errored(scenario.tasks.size(), 0);

  auto run_one = [&](int i) {
    const TaskSpec& task = scenario.tasks[i];
    const std::uint64_t task_seed = scenario.seed * 1000003ull + 7919ull * i;
    const TaskContext ctx{field, scenario, out_dir, task_seed, i};
    json report;
    report["kind"] = task.kind;
    report["index"] = i;
    report["seed"] = task_seed;
    report["params"] = task.params;
    report["preset"] = scenario.preset.to_json();
    try {
      report["result"] = runners().at(task.kind)(ctx, task.params);
      report["status"] = "ok";
    } catch (const std::exception& e) {
      report["status"] = "error";
      report["error"] = e.what();
      errored[i] = 1;
    }
    const std::string name = "task_" + std::to_string(i) + "_" + task.kind + ".json";
    write_text(out_dir / name, report.dump(2) + "\n");
    report_files[i] = name;
  };

  if (options.parallel && threads > 1) {
    std::size_t next = 0;
    while (next < scenario.tasks.size()) {
      std::vector<std::future<void>> batch;
      for (int t = 0; t < threads && next < scenario.tasks.size(); ++t, ++next)
        batch.push_back(std::async(std::launch::async, run_one, static_cast<int>(next)));
      for (auto& f : batch) f.get();
    }
  } else {
    for (std::size_t i = 0; i < scenario.tasks.size(); ++i) run_one(static_cast<int>(i));
  }

  int errors = 0;
  for (int e : errored) errors += e;
  json summary;
  summary["scenario"] = scenario.resolved();
  summary["task_reports"] = report_files;
  summary["task_errors"] = errors;
  summary["status"] = errors ? "errors" : "ok";
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return errors ? 2 : 0;
}

int run_scenario_file(const std::filesystem::path& config_path, const RunOptions& options) {
  json j;
  if (auto builtin = find_builtin_scenario(config_path.string())) {
    j = *builtin;
  } else {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << "config error: cannot open '" << config_path.string() << "'\n";
      return 1;
    }
    try {
      is >> j;
    } catch (const std::exception& e) {
      std::cerr << "config error: invalid JSON: " << e.what() << "\n";
      return 1;
    }
  }
  Scenario s;
  try {
    s = Scenario::from_json(j);
    // validate the preset eagerly so bad configs exit 1 before any task runs
    make_preset(s.preset);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return run_scenario(s, options);
}

int emit_plot_data(const std::filesystem::path& report_path, const std::string& kind,
                   const std::filesystem::path& out_csv) {
  std::ifstream is(report_path);
  if (!is) {
    std::cerr << "plot error: cannot open '" << report_path.string() << "'\n";
    return 1;
  }
  json report;
  try {
    is >> report;
  } catch (const std::exception& e) {
    std::cerr << "plot error: invalid JSON: " << e.what() << "\n";
    return 1;
  }
  const json result = report.value("result", report);
  std::ostringstream os;
  if (kind == "cone_section") {
    if (!result.contains("cross_section")) {
      std::cerr << "plot error: report has no cross_section (kind mismatch)\n";
      return 1;
    }
    std::vector<Vec> pts;
    for (const auto& p : result["cross_section"]) pts.push_back(vec_from_json(p));
    os << csv_of_points(pts);
  } else if (kind == "reach_slice") {
    if (!result.contains("points")) {
      std::cerr << "plot error: report has no reach points (kind mismatch)\n";
      return 1;
    }
    std::vector<Vec> pts;
    for (const auto& p : result["points"]) pts.push_back(vec_from_json(p));
    os << csv_of_points(pts);
  } else if (kind == "lipschitz_hist") {
    if (!result.contains("hist_edges")) {
      std::cerr << "plot error: report has no histogram (kind mismatch)\n";
      return 1;
    }
    os << "bin_lo,bin_hi,count\n";
    const auto& edges = result["hist_edges"];
    const auto& counts = result["hist_counts"];
    for (std::size_t b = 0; b < counts.size(); ++b)
      os << edges[b].get<double>() << "," << edges[b + 1].get<double>() << ","
         << counts[b].get<int>() << "\n";
  } else if (kind == "plateau") {
    if (!result.contains("trace")) {
      std::cerr << "plot error: report has no plateau trace (kind mismatch)\n";
      return 1;
    }
    os << "n,dist_over_n\n";
    const auto& trace = result["trace"];
    for (std::size_t n = 0; n < trace.size(); ++n)
      os << n + 1 << "," << trace[n].get<double>() << "\n";
  } else {
    std::cerr << "plot error: unknown kind '" << kind << "'\n";
    return 1;
  }
  write_text(out_csv, os.str());
  return 0;
}

const std::map<std::string, json>& builtin_scenarios() {
  static const std::map<std::string, json> pack = [] {
    std::map<std::string, json> p;
    auto preset = [](const std::string& name, json params = json::object()) {
      return json{{"name", name}, {"params", params}};
    };
    p["accept/flat-cone"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "cone_estimate"}, {"params", json::object()}}})}};
    p["accept/conformal-cone"] = json{
        {"preset", preset("conformal_flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "cone_estimate"}, {"params", json::object()}}})}};
    p["accept/product-cone"] = json{
        {"preset", preset("product_circle")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "cone_estimate"}, {"params", json::object()}}})}};
    p["accept/minkowski-timesep"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks",
         json::array({json{{"kind", "timesep"},
                           {"params",
                            json{{"pairs", json::array({json::array({json::array({0, 0}),
                                                                     json::array({2, 1})}),
                                                        json::array({json::array({0, 0}),
                                                                     json::array({1, 2})})})}}}}})}};
    p["accept/burago-plateau"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "stable_norm"},
                                    {"params", json{{"h", json::array({3, 4})}, {"n_max", 64}}}}})}};
    p["accept/frak-inequalities"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "frak_f"},
                                    {"params", json{{"hmax", 4}, {"resolution", 32}}}}})}};
    p["accept/p01a"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "p01a"}, {"params", json::object()}}})}};
    p["accept/cert-flat"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "certify"}, {"params", json::object()}},
                               json{{"kind", "sctp"},
                                    {"params", json{{"alpha", json::array({1, 0})}}}}})}};
    p["accept/cert-product"] = json{
        {"preset", preset("product_circle")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "certify"}, {"params", json::object()}},
                               json{{"kind", "sctp"},
                                    {"params", json{{"alpha", json::array({1, 0})}}}}})}};
    p["accept/e1-vicious"] = json{
        {"preset", preset("e1_counterexample")},
        {"seed", 1},
        {"tasks",
         json::array({json{{"kind", "certify"},
                           {"params", json{{"vicious_resolution", 20},
                                           {"cone", json{{"geodesics", 48},
                                                         {"walks", 16},
                                                         {"frak_scan_hmax", 0},
                                                         {"norm_dir_radius", 1},
                                                         {"norm_n_max", 8}}}}}}})}};
    p["accept/lipschitz-flat"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "lipschitz"},
                                    {"params", json{{"eps", 0.2}, {"samples", 1000}}}}})}};
    p["accept/perturb-flat"] = json{
        {"preset", preset("flat")},
        {"seed", 1},
        {"tasks", json::array({json{{"kind", "perturb"},
                                    {"params", json{{"amplitude", 0.05}}}}})}};
    return p;
  }();
  return pack;
}

std::optional<json> find_builtin_scenario(const std::string& name) {
  const auto& pack = builtin_scenarios();
  if (auto it = pack.find(name); it != pack.end()) return std::optional<json>(std::in_place, it->second);
  return std::nullopt;
}

}  // namespace lab
