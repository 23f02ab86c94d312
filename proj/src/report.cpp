#include "tklab/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tklab/version.hpp"

namespace tklab {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

const std::set<std::string>& suite_names() {
  static const std::set<std::string> names = {"a2",        "stability",     "c2",  "resolvent",
                                              "semigroup", "decomposition", "demo", "all"};
  return names;
}

/// Running order between consecutive grids at the same (experiment, level).
std::string running_order(double err_prev, double err, double dx_prev, double dx) {
  if (err_prev <= 0.0 || err <= 0.0 || !(dx < dx_prev)) return "";
  return fmt(std::log(err_prev / err) / std::log(dx_prev / dx));
}

}  // namespace

std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "must be a JSON object");
  ExperimentConfig cfg;

  auto require_type = [&](const char* field, bool ok, const char* expected) {
    if (!ok) throw ConfigError(field, std::string("expected ") + expected);
  };

  if (doc.contains("suite")) {
    require_type("suite", doc["suite"].is_string(), "string");
    cfg.suite = doc["suite"].get<std::string>();
  }
  if (!suite_names().count(cfg.suite))
    throw ConfigError("suite", "unknown suite '" + cfg.suite + "'");

  if (doc.contains("functions")) {
    require_type("functions", doc["functions"].is_array(), "array of names");
    cfg.functions.clear();
    const auto known = catalog();
    for (const auto& item : doc["functions"]) {
      require_type("functions", item.is_string(), "array of names");
      const auto name = item.get<std::string>();
      if (!known.count(name)) throw ConfigError("functions", "unknown function '" + name + "'");
      cfg.functions.push_back(name);
    }
    if (cfg.functions.empty()) throw ConfigError("functions", "must not be empty");
  }

  if (doc.contains("schedule")) {
    require_type("schedule", doc["schedule"].is_array(), "array of [l, N] pairs");
    cfg.schedule.clear();
    for (const auto& item : doc["schedule"]) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
          !item[1].is_number_integer())
        throw ConfigError("schedule", "entries must be [l, N] integer pairs");
      try {
        cfg.schedule.push_back(make_grid(item[0].get<int>(), item[1].get<int>()));
      } catch (const std::exception& e) {
        throw ConfigError("schedule", e.what());
      }
    }
    if (cfg.schedule.empty()) throw ConfigError("schedule", "must not be empty");
    for (std::size_t i = 0; i + 1 < cfg.schedule.size(); ++i)
      if (cfg.schedule[i + 1].nodes_per_unit <= cfg.schedule[i].nodes_per_unit)
        throw ConfigError("schedule", "must be strictly refining in N");
  }

  if (doc.contains("levels")) {
    require_type("levels", doc["levels"].is_array(), "array of positive reals");
    cfg.levels.clear();
    for (const auto& item : doc["levels"]) {
      require_type("levels", item.is_number(), "array of positive reals");
      const double l = item.get<double>();
      if (!(l > 0.0)) throw ConfigError("levels", "levels must be positive");
      cfg.levels.push_back(l);
    }
    if (cfg.levels.empty()) throw ConfigError("levels", "must not be empty");
  }

  if (doc.contains("lambda0")) {
    require_type("lambda0", doc["lambda0"].is_number(), "positive number");
    cfg.lambda0 = doc["lambda0"].get<double>();
    if (!(cfg.lambda0 > 0.0)) throw ConfigError("lambda0", "must be positive");
  }
  if (doc.contains("t0")) {
    require_type("t0", doc["t0"].is_number(), "positive number");
    cfg.t0 = doc["t0"].get<double>();
    if (!(cfg.t0 > 0.0)) throw ConfigError("t0", "must be positive");
  }
  if (doc.contains("time_points")) {
    require_type("time_points", doc["time_points"].is_number_integer(), "integer >= 2");
    cfg.time_points = doc["time_points"].get<int>();
    if (cfg.time_points < 2) throw ConfigError("time_points", "must be >= 2");
  }
  if (doc.contains("method")) {
    require_type("method", doc["method"].is_string(), "method name");
    try {
      cfg.method = evolve_method_from_string(doc["method"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError("method", e.what());
    }
  }
  if (doc.contains("quad_rel_tol")) {
    require_type("quad_rel_tol", doc["quad_rel_tol"].is_number(), "number in (0, 1e-6)");
    cfg.quad_rel_tol = doc["quad_rel_tol"].get<double>();
    if (!(cfg.quad_rel_tol > 0.0 && cfg.quad_rel_tol < 1e-6))
      throw ConfigError("quad_rel_tol", "must lie in (0, 1e-6)");
  }
  if (doc.contains("stability_trials")) {
    require_type("stability_trials", doc["stability_trials"].is_number_integer(), "integer >= 100");
    cfg.stability_trials = doc["stability_trials"].get<int>();
    if (cfg.stability_trials < 100) throw ConfigError("stability_trials", "must be >= 100");
  }
  if (doc.contains("out_dir")) {
    require_type("out_dir", doc["out_dir"].is_string(), "string");
    cfg.out_dir = doc["out_dir"].get<std::string>();
  }
  if (doc.contains("seed")) {
    require_type("seed", doc["seed"].is_number_unsigned() || doc["seed"].is_number_integer(),
                 "nonnegative integer");
    const auto s = doc["seed"].get<std::int64_t>();
    if (s < 0) throw ConfigError("seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  return cfg;
}

std::string config_canonical_json(const ExperimentConfig& cfg) {
  json doc;
  doc["suite"] = cfg.suite;
  doc["functions"] = cfg.functions;
  json sched = json::array();
  for (const auto& g : cfg.schedule)
    sched.push_back({g.window_halfwidth, g.nodes_per_unit});
  doc["schedule"] = sched;
  doc["levels"] = cfg.levels;
  doc["lambda0"] = cfg.lambda0;
  doc["t0"] = cfg.t0;
  doc["time_points"] = cfg.time_points;
  doc["method"] = to_string(cfg.method);
  doc["quad_rel_tol"] = cfg.quad_rel_tol;
  doc["stability_trials"] = cfg.stability_trials;
  doc["seed"] = cfg.seed;
  return doc.dump();
}

// --- CSV emitters -------------------------------------------------------------

void emit_convergence_csv(const std::vector<ConvergenceReport>& reports,
                          const std::string& error_column, std::ostream& out) {
  out << "experiment,l,N,dx,level," << error_column << ",sup_bounded,order\n";
  for (const auto& rep : reports) {
    std::map<double, std::pair<double, double>> prev;  // level -> (err, dx)
    for (const auto& row : rep.rows) {
      std::string order;
      if (auto it = prev.find(row.level); it != prev.end())
        order = running_order(it->second.first, row.error, it->second.second, row.grid.dx());
      prev[row.level] = {row.error, row.grid.dx()};
      out << rep.experiment << ',' << row.grid.window_halfwidth << ',' << row.grid.nodes_per_unit
          << ',' << fmt(row.grid.dx()) << ',' << fmt(row.level) << ',' << fmt(row.error) << ','
          << fmt_bool(row.sup_bounded) << ',' << order << '\n';
    }
  }
}

void emit_consistency_csv(const std::vector<ConsistencyReport>& reports, std::ostream& out) {
  out << "experiment,l,N,dx,level,interp_error,generator_error,bound,order\n";
  for (const auto& rep : reports) {
    std::map<double, std::pair<double, double>> prev;
    for (const auto& row : rep.rows) {
      std::string order;
      if (auto it = prev.find(row.level); it != prev.end())
        order =
            running_order(it->second.first, row.generator_error, it->second.second, row.grid.dx());
      prev[row.level] = {row.generator_error, row.grid.dx()};
      out << rep.experiment << ',' << row.grid.window_halfwidth << ',' << row.grid.nodes_per_unit
          << ',' << fmt(row.grid.dx()) << ',' << fmt(row.level) << ',' << fmt(row.interp_error)
          << ',' << fmt(row.generator_error) << ',' << fmt(row.bound) << ',' << order << '\n';
    }
  }
}

void emit_stability_csv(const StabilityReport& report, int trials, std::ostream& out) {
  out << "experiment,l,N,dx,trials,max_pairing,growth_backward_euler,growth_crank_nicolson,"
         "growth_pade_expm,pade_min_entry,pade_max_row_sum\n";
  for (const auto& row : report.rows) {
    out << "stability" << ',' << row.grid.window_halfwidth << ',' << row.grid.nodes_per_unit << ','
        << fmt(row.grid.dx()) << ',' << trials << ',' << fmt(row.max_pairing) << ','
        << fmt(row.growth_backward_euler) << ',' << fmt(row.growth_crank_nicolson) << ','
        << fmt(row.growth_pade) << ',' << fmt(row.pade_min_entry) << ','
        << fmt(row.pade_max_row_sum) << '\n';
  }
}

void emit_decomposition_csv(const std::vector<ErrorDecompositionResult>& results,
                            std::ostream& out) {
  out << "experiment,l,N,dx,t,lambda0,term1_norm,term2_norm,term3_norm,measured_norm,residual,"
         "residual_relative\n";
  for (const auto& r : results) {
    out << "decomposition" << ',' << r.grid.window_halfwidth << ',' << r.grid.nodes_per_unit << ','
        << fmt(r.grid.dx()) << ',' << fmt(r.t) << ',' << fmt(r.lambda0) << ','
        << fmt(r.term1_norm) << ',' << fmt(r.term2_norm) << ',' << fmt(r.term3_norm) << ','
        << fmt(r.measured_norm) << ',' << fmt(r.residual) << ',' << fmt(r.residual_relative)
        << '\n';
  }
}

void emit_translation_csv(const TranslationDemoReport& report, std::ostream& out) {
  out << "experiment,shift,level,max_seminorm_exact,max_seminorm_discrete,sup_norm_exact\n";
  for (const auto& row : report.rows) {
    out << "demo_translation" << ',' << fmt(row.shift) << ',' << fmt(row.level) << ','
        << fmt(row.max_sn_exact) << ',' << fmt(row.max_sn_discrete) << ',' << fmt(row.sup_exact)
        << '\n';
  }
}

void emit_chirp_csv(const ChirpDemoReport& report, std::ostream& out) {
  out << "experiment,t,seminorm_gap_l2,far_field_gap\n";
  for (const auto& row : report.rows) {
    out << "demo_chirp" << ',' << fmt(row.t) << ',' << fmt(row.seminorm_gap) << ','
        << fmt(row.far_field_gap) << '\n';
  }
}

// --- run orchestration ----------------------------------------------------------

namespace {

struct FileSink {
  std::filesystem::path dir;
  std::vector<std::pair<std::string, std::string>> files;

  std::string write(const std::string& name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.close();
    files.emplace_back(name, fnv1a64_hex(content));
    return path.string();
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunManifest run_experiments(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (const char* env = std::getenv("TKLAB_QUAD_RTOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || !(v > 0.0 && v < 1e-6))
      throw ConfigError("TKLAB_QUAD_RTOL", "must be a number in (0, 1e-6)");
    cfg.quad_rel_tol = v;
  }

  std::filesystem::create_directories(cfg.out_dir);
  FileSink sink{cfg.out_dir, {}};

  QuadratureSpec q;
  q.rel_tol = cfg.quad_rel_tol;
  SeminormFamily family;
  family.levels = cfg.levels;
  const auto known = catalog();
  std::vector<ContinuousFunction> fns;
  for (const auto& name : cfg.functions) fns.push_back(known.at(name));

  const bool all = cfg.suite == "all";
  RunManifest manifest;
  manifest.version = kVersion;
  manifest.config_hash = fnv1a64_hex(config_canonical_json(cfg));
  manifest.seed = cfg.seed;

  auto run_suite = [&](const std::string& name, auto&& body) {
    if (!all && cfg.suite != name) return;
    const auto t_start = std::chrono::steady_clock::now();
    SuiteOutcome outcome;
    outcome.name = name;
    body(outcome);
    outcome.wall_seconds = seconds_since(t_start);
    manifest.suites.push_back(std::move(outcome));
  };

  run_suite("a2", [&](SuiteOutcome& outcome) {
    std::vector<ConvergenceReport> reports;
    bool pass = true;
    for (const auto& f : fns) {
      if (!f.decays_at_infinity) continue;
      reports.push_back(interpolation_convergence(f, cfg.schedule, family));
      pass = pass && reports.back().pass;
    }
    const auto proj = projection_checks(cfg.schedule, fns, 200, cfg.seed);
    pass = pass && proj.pass;
    outcome.notes.push_back("M1_hat=" + fmt(proj.m1_hat) + " M2_hat=" + fmt(proj.m2_hat));
    for (const auto& fail : proj.failures) outcome.notes.push_back(fail);
    std::ostringstream csv;
    emit_convergence_csv(reports, "error", csv);
    sink.write("a2.csv", csv.str());
    outcome.pass = pass;
  });

  run_suite("stability", [&](SuiteOutcome& outcome) {
    const std::vector<double> t_list = {0.1, 0.5, 1.0};
    const auto rep = stability_suite(cfg.schedule, cfg.stability_trials, t_list, cfg.seed);
    std::ostringstream csv;
    emit_stability_csv(rep, cfg.stability_trials, csv);
    sink.write("stability.csv", csv.str());
    if (rep.witness) {
      std::ostringstream wit;
      write_grid_csv(*rep.witness, wit);
      sink.write("stability_witness.csv", wit.str());
    }
    outcome.notes.push_back("M_hat=" + fmt(rep.m_hat) + " omega_hat=" + fmt(rep.omega_hat));
    for (const auto& fail : rep.failures) outcome.notes.push_back(fail);
    outcome.pass = rep.pass;
  });

  run_suite("c2", [&](SuiteOutcome& outcome) {
    std::vector<ConsistencyReport> reports;
    bool pass = true;
    for (const auto& f : fns) {
      if (!f.decays_at_infinity || !f.has_second_derivative()) continue;
      reports.push_back(generator_consistency(f, cfg.schedule, family));
      pass = pass && reports.back().pass;
    }
    std::ostringstream csv;
    emit_consistency_csv(reports, csv);
    sink.write("c2.csv", csv.str());
    outcome.pass = pass && !reports.empty();
  });

  run_suite("resolvent", [&](SuiteOutcome& outcome) {
    std::vector<ConvergenceReport> reports;
    bool pass = true;
    for (const auto& f : fns) {
      if (!f.decays_at_infinity) continue;
      reports.push_back(resolvent_convergence(f, cfg.lambda0, cfg.schedule, family, q));
      pass = pass && reports.back().pass;
    }
    std::ostringstream csv;
    emit_convergence_csv(reports, "error", csv);
    sink.write("resolvent.csv", csv.str());
    outcome.pass = pass && !reports.empty();
  });

  run_suite("semigroup", [&](SuiteOutcome& outcome) {
    std::vector<ConvergenceReport> reports;
    bool pass = true;
    for (const auto& f : fns) {
      if (!f.decays_at_infinity) continue;
      reports.push_back(
          semigroup_convergence(f, cfg.t0, cfg.time_points, cfg.schedule, family, q, cfg.method));
      pass = pass && reports.back().pass;
    }
    std::ostringstream csv;
    emit_convergence_csv(reports, "t_max_error", csv);
    sink.write("semigroup.csv", csv.str());
    outcome.pass = pass && !reports.empty();
  });

  run_suite("decomposition", [&](SuiteOutcome& outcome) {
    std::vector<ErrorDecompositionResult> results;
    bool pass = true;
    GridSchedule grids;
    for (const auto& g : cfg.schedule)
      if (g.nodes_per_unit >= 32) grids.push_back(g);
    if (grids.size() > 2) grids.erase(grids.begin(), grids.end() - 2);
    const std::vector<double> ts = {cfg.t0 / 4.0, cfg.t0 / 2.0};
    bool any = false;
    for (const auto& f : fns) {
      if (!f.has_exact_evolution() || !f.has_fourth_derivative()) continue;
      any = true;
      for (const auto& g : grids)
        for (double t : ts) {
          results.push_back(error_decomposition(f, t, g, cfg.lambda0, q));
          pass = pass &&
                 results.back().residual_relative <= thresholds::kDecompositionResidual;
        }
    }
    std::ostringstream csv;
    emit_decomposition_csv(results, csv);
    sink.write("decomposition.csv", csv.str());
    outcome.pass = pass && any && !grids.empty();
  });

  run_suite("demo", [&](SuiteOutcome& outcome) {
    // grid: widest window at moderate resolution keeps the demo quick
    GridSpec grid = cfg.schedule.back();
    int max_l = 0;
    for (const auto& g : cfg.schedule) max_l = std::max(max_l, g.window_halfwidth);
    for (const auto& g : cfg.schedule)
      if (g.window_halfwidth == max_l && g.nodes_per_unit >= 32) {
        grid = g;
        break;
      }
    const std::vector<double> shifts = {0.0, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0, 20.0};
    const auto translation = translation_demo(bump(), shifts, 0.5, grid, family, q);
    const std::vector<double> chirp_times = {1e-4, 1e-3, 1e-2};
    const auto chirp_rep = chirp_demo(chirp_times, q);
    std::ostringstream csv;
    emit_translation_csv(translation, csv);
    sink.write("demo.csv", csv.str());
    std::ostringstream chirp_csv;
    emit_chirp_csv(chirp_rep, chirp_csv);
    sink.write("demo_chirp.csv", chirp_csv.str());
    outcome.pass = translation.pass && chirp_rep.pass;
  });

  manifest.all_pass = true;
  for (const auto& s : manifest.suites) manifest.all_pass = manifest.all_pass && s.pass;
  manifest.files = sink.files;

  std::ostringstream mjson;
  write_manifest_json(manifest, mjson);
  {
    const auto path = std::filesystem::path(cfg.out_dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << mjson.str();
  }
  return manifest;
}

void write_manifest_json(const RunManifest& m, std::ostream& out) {
  json doc;
  doc["schema_version"] = 1;
  doc["tool_version"] = m.version;
  doc["config_hash"] = m.config_hash;
  doc["seed"] = m.seed;
  doc["all_pass"] = m.all_pass;
  json suites = json::array();
  for (const auto& s : m.suites) {
    json entry;
    entry["name"] = s.name;
    entry["pass"] = s.pass;
    entry["wall_seconds"] = s.wall_seconds;
    entry["notes"] = s.notes;
    suites.push_back(entry);
  }
  doc["suites"] = suites;
  json files = json::array();
  for (const auto& [path, digest] : m.files) {
    json entry;
    entry["path"] = path;
    entry["fnv1a64"] = digest;
    files.push_back(entry);
  }
  doc["files"] = files;
  out << doc.dump(2) << '\n';
}

}  // namespace tklab
