#include "c0ip/driver.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "c0ip/problems.hpp"

namespace c0ip {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  // strtod instead of stod: subnormals must parse, not raise out_of_range
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (value.empty() || end != begin + value.size())
    throw std::invalid_argument(key + ": malformed number '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw std::invalid_argument(key + ": malformed integer '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument(key + ": malformed boolean '" + value + "'");
}

RefineMode parse_mode(const std::string& value) {
  if (value == "adaptive") return RefineMode::adaptive;
  if (value == "uniform") return RefineMode::uniform;
  throw std::invalid_argument("mode: must be 'adaptive' or 'uniform', got '" + value + "'");
}

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "problem")
    cfg.problem = value;
  else if (key == "degree")
    cfg.degree = parse_int(key, value);
  else if (key == "sigma")
    cfg.sigma = parse_double(key, value);
  else if (key == "theta")
    cfg.theta = parse_double(key, value);
  else if (key == "mode")
    cfg.mode = parse_mode(value);
  else if (key == "max_dof")
    cfg.max_dof = parse_int(key, value);
  else if (key == "output_dir")
    cfg.output_dir = value;
  else if (key == "dump_mesh")
    cfg.dump_mesh = parse_bool(key, value);
  else if (key == "dump_estimator")
    cfg.dump_estimator = parse_bool(key, value);
  else if (key == "solver_tol")
    cfg.solver_tol = parse_double(key, value);
  else if (key == "pdas_c")
    cfg.pdas_c = parse_double(key, value);
  else
    throw std::invalid_argument("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value, got '" + stripped + "'");
    apply_key_value(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
}

void print_g17(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

constexpr const char* kHistoryHeader =
    "level,ndof,h_max,eta,err_h,q1,q2,lambda_mass,lambda_gap,pdas_iters,wall_ms";

}  // namespace

double RunConfig::resolved_sigma() const {
  return sigma > 0.0 ? sigma : ProblemSpec::default_sigma(degree);
}

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errors;
  static const std::set<std::string> known = {"example1", "example2", "example3"};
  if (!known.count(problem)) errors.push_back("problem: unknown name '" + problem + "'");
  if (degree != 2 && degree != 3) errors.push_back("degree: must be 2 or 3");
  if (sigma != 0.0 && sigma < 1.0)
    errors.push_back("sigma: must be at least 1 (or 0 to pick the default)");
  if (!(theta > 0.0 && theta < 1.0)) errors.push_back("theta: must lie strictly in (0,1)");
  if (known.count(problem) && (degree == 2 || degree == 3)) {
    Mesh initial = Mesh::initial(problem_by_name(problem).domain);
    int n0 = build_dofmap(initial, degree).n_dofs;
    if (max_dof < n0)
      errors.push_back("max_dof: must be at least the initial dof count (" +
                       std::to_string(n0) + ")");
  }
  if (output_dir.empty()) errors.push_back("output_dir: must not be empty");
  if (!(solver_tol > 0.0)) errors.push_back("solver_tol: must be positive");
  if (!(pdas_c > 0.0)) errors.push_back("pdas_c: must be positive");
  return errors;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config: missing file path");
      apply_config_file(cfg, args[i + 1]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      apply_config_file(cfg, args[i].substr(9));
    }
  }

  CLI::App app{"C0 interior penalty solver for the clamped-plate obstacle problem"};
  std::string config_path;
  std::string mode_str = cfg.mode == RefineMode::uniform ? "uniform" : "adaptive";
  app.add_option("--config", config_path, "key=value file of defaults");
  app.add_option("--problem", cfg.problem, "benchmark name (example1|example2|example3)");
  app.add_option("--degree", cfg.degree, "polynomial degree (2 or 3)");
  app.add_option("--sigma", cfg.sigma, "penalty parameter; 0 picks the degree default");
  app.add_option("--theta", cfg.theta, "bulk-marking fraction in (0,1)");
  app.add_option("--mode", mode_str, "refinement mode (adaptive|uniform)");
  app.add_option("--max-dof", cfg.max_dof, "stop once a level would exceed this many dofs");
  app.add_option("--output-dir", cfg.output_dir, "directory for history.csv and dumps");
  app.add_flag("--dump-mesh", cfg.dump_mesh, "write mesh_<level>.txt per level");
  app.add_flag("--dump-estimator", cfg.dump_estimator, "write estimator_<level>.csv per level");
  app.add_option("--solver-tol", cfg.solver_tol, "inner linear solver tolerance");
  app.add_option("--pdas-c", cfg.pdas_c, "active-set scaling constant");

  std::vector<const char*> argv;
  argv.push_back("c0ip");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    cfg.show_help = true;
    cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::Error& e) {
    throw std::invalid_argument(e.what());
  }
  cfg.mode = parse_mode(mode_str);
  return cfg;
}

void write_history_csv(std::ostream& os, const std::vector<LevelRecord>& history) {
  os << kHistoryHeader << "\n";
  for (const auto& rec : history) {
    os << rec.level << ',' << rec.n_dofs << ',';
    print_g17(os, rec.h_max);
    os << ',';
    print_g17(os, rec.eta);
    os << ',';
    if (rec.error) print_g17(os, *rec.error);
    os << ',';
    print_g17(os, rec.q1);
    os << ',';
    print_g17(os, rec.q2);
    os << ',';
    print_g17(os, rec.lambda_mass);
    os << ',';
    if (rec.lambda_gap) print_g17(os, *rec.lambda_gap);
    os << ',' << rec.pdas_iterations << ',';
    print_g17(os, rec.wall_ms);
    os << "\n";
  }
}

std::vector<LevelRecord> read_history_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("history csv: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHistoryHeader)
    throw std::invalid_argument("history csv: unexpected header '" + line + "'");
  std::vector<LevelRecord> history;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 11)
      throw std::invalid_argument("history csv: expected 11 fields, got " +
                                  std::to_string(fields.size()));
    LevelRecord rec;
    rec.level = parse_int("level", fields[0]);
    rec.n_dofs = parse_int("ndof", fields[1]);
    rec.h_max = parse_double("h_max", fields[2]);
    rec.eta = parse_double("eta", fields[3]);
    if (!fields[4].empty()) rec.error = parse_double("err_h", fields[4]);
    rec.q1 = parse_double("q1", fields[5]);
    rec.q2 = parse_double("q2", fields[6]);
    rec.lambda_mass = parse_double("lambda_mass", fields[7]);
    if (!fields[8].empty()) rec.lambda_gap = parse_double("lambda_gap", fields[8]);
    rec.pdas_iterations = parse_int("pdas_iters", fields[9]);
    rec.wall_ms = parse_double("wall_ms", fields[10]);
    history.push_back(rec);
  }
  return history;
}

void write_estimator_csv(std::ostream& os, const EstimatorReport& report) {
  os << "entity_type,entity_id,term,value\n";
  auto row = [&os](const char* type, int id, const char* term, double value) {
    os << type << ',' << id << ',' << term << ',';
    print_g17(os, value);
    os << "\n";
  };
  for (int t = 0; t < report.eta_T.size(); ++t) {
    row("triangle", t, "eta_T", report.eta_T[t]);
    row("triangle", t, "osc_T", report.osc_T[t]);
  }
  for (int e = 0; e < report.eta_e1.size(); ++e) {
    row("edge", e, "eta_e1", report.eta_e1[e]);
    row("edge", e, "eta_e2", report.eta_e2[e]);
    row("edge", e, "eta_e3", report.eta_e3[e]);
  }
}

int run(const RunConfig& config) {
  auto errors = config.validate();
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
    return 2;
  }
  try {
    ProblemSpec problem = problem_by_name(config.problem);
    AdaptiveOptions opts;
    opts.degree = config.degree;
    opts.sigma = config.resolved_sigma();
    opts.theta = config.theta;
    opts.max_dof = config.max_dof;
    opts.mode = config.mode;
    opts.pdas.c_scale = config.pdas_c;
    opts.pdas.solver_tol = config.solver_tol;

    AdaptiveResult result = adaptive_solve(problem, opts);
    if (!problem.exact) fill_reference_errors(problem, opts, result);

    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    {
      std::ofstream out(fs::path(config.output_dir) / "history.csv");
      if (!out) throw std::runtime_error("cannot write history.csv in '" + config.output_dir + "'");
      write_history_csv(out, result.history);
    }
    for (std::size_t l = 0; l < result.levels.size(); ++l) {
      if (config.dump_mesh) {
        std::ofstream out(fs::path(config.output_dir) / ("mesh_" + std::to_string(l) + ".txt"));
        result.levels[l].mesh.dump(out);
      }
      if (config.dump_estimator) {
        std::ofstream out(fs::path(config.output_dir) /
                          ("estimator_" + std::to_string(l) + ".csv"));
        write_estimator_csv(out, result.levels[l].report);
      }
    }

    for (const auto& rec : result.history) {
      std::ostringstream line;
      line << "level " << rec.level << ": ndof=" << rec.n_dofs << " eta=" << rec.eta;
      if (rec.error) line << " err=" << *rec.error;
      line << " |lambda|=" << rec.lambda_mass << " pdas=" << rec.pdas_iterations;
      std::cout << line.str() << "\n";
    }
    std::cout << "wrote " << (std::filesystem::path(config.output_dir) / "history.csv").string()
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace c0ip
