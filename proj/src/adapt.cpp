#include "c0ip/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "c0ip/linsolve.hpp"

namespace c0ip {

std::vector<MarkKey> dorfler_mark(std::vector<Indicator> indicators, double theta) {
  if (indicators.empty()) throw std::invalid_argument("dorfler_mark: empty indicator list");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("dorfler_mark: theta not in (0,1)");
  std::sort(indicators.begin(), indicators.end(), [](const Indicator& a, const Indicator& b) {
    if (a.value2 != b.value2) return a.value2 > b.value2;
    if (a.key.kind != b.key.kind) return a.key.kind < b.key.kind;
    return a.key.id < b.key.id;
  });
  double total = 0.0;
  for (const Indicator& ind : indicators) total += ind.value2;
  std::vector<MarkKey> marked;
  double sum = 0.0;
  for (const Indicator& ind : indicators) {
    if (sum >= theta * total) break;
    if (ind.value2 == 0.0) break;
    marked.push_back(ind.key);
    sum += ind.value2;
  }
  return marked;
}

namespace {

double resolve_sigma(const AdaptiveOptions& opts) {
  return opts.sigma > 0.0 ? opts.sigma : ProblemSpec::default_sigma(opts.degree);
}

// Initial iterate and multipliers for the next level: the previous solution
// evaluated at the new nodes, and the previous vertex multipliers wherever
// the vertex survived (vertex ids are stable under refinement).
void apply_warm_start(const LevelState& prev, const DofMap& dofmap, const ReducedSystem& sys,
                      PdasOptions& popts) {
  FieldEvaluator old_field(prev.mesh, prev.dofmap, prev.solution.coeffs);
  Eigen::VectorXd x0(sys.matrix.rows());
  for (int i = 0; i < dofmap.n_dofs; ++i) {
    int f = sys.full_to_free[i];
    if (f >= 0) x0[f] = old_field(dofmap.node[i], 0).value;
  }
  popts.x0 = x0;

  std::unordered_map<int, int> prev_slot;
  for (std::size_t j = 0; j < prev.dofmap.interior_vertices.size(); ++j)
    prev_slot[prev.dofmap.interior_vertices[j]] = static_cast<int>(j);
  Eigen::VectorXd l0 = Eigen::VectorXd::Zero(static_cast<int>(dofmap.interior_vertices.size()));
  for (std::size_t j = 0; j < dofmap.interior_vertices.size(); ++j) {
    auto it = prev_slot.find(dofmap.interior_vertices[j]);
    if (it != prev_slot.end()) l0[static_cast<int>(j)] = prev.solution.lambda[it->second];
  }
  popts.lambda0 = l0;
}

}  // namespace

ReducedSystem build_system(const ProblemSpec& problem, const Mesh& mesh, const DofMap& dofmap,
                           double sigma) {
  SparseMatrix a = assemble_stiffness(mesh, dofmap, sigma);
  Eigen::VectorXd b = assemble_load(mesh, dofmap, problem.f);
  if (problem.boundary == BoundaryMode::from_exact) {
    if (!problem.exact)
      throw std::invalid_argument("build_system: boundary mode needs an exact solution");
    b += assemble_boundary_load(mesh, dofmap, sigma, problem.exact->gradient);
    Eigen::VectorXd g = interpolate(dofmap, problem.exact->value);
    return impose_boundary(a, b, dofmap, &g);
  }
  return impose_boundary(a, b, dofmap, nullptr);
}

AdaptiveResult adaptive_solve(const ProblemSpec& problem, const AdaptiveOptions& opts) {
  if (opts.degree != 2 && opts.degree != 3)
    throw std::invalid_argument("adaptive_solve: degree must be 2 or 3");
  if (opts.mode == RefineMode::adaptive && !(opts.theta > 0.0 && opts.theta < 1.0))
    throw std::invalid_argument("adaptive_solve: theta not in (0,1)");
  double sigma = resolve_sigma(opts);
  const ExactSolution* exact = problem.exact ? &*problem.exact : nullptr;

  AdaptiveResult out;
  Mesh mesh = Mesh::initial(problem.domain);
  for (int level = 0;; ++level) {
    DofMap dofmap = build_dofmap(mesh, opts.degree);
    if (level > 0 && dofmap.n_dofs > opts.max_dof) break;

    auto t0 = std::chrono::steady_clock::now();
    ReducedSystem sys = build_system(problem, mesh, dofmap, sigma);
    PdasOptions popts = opts.pdas;
    if (!out.levels.empty()) apply_warm_start(out.levels.back(), dofmap, sys, popts);
    DiscreteSolution sol = solve_obstacle(sys, dofmap, problem.psi, popts);
    EstimatorReport report = estimate(mesh, dofmap, sol.coeffs, problem.f, sigma, exact);

    LevelRecord rec;
    rec.level = level;
    rec.n_dofs = dofmap.n_dofs;
    rec.h_max = mesh.h_max();
    rec.eta = report.eta;
    if (exact) rec.error = error_norm_exact(mesh, dofmap, sol.coeffs, *exact, sigma);
    rec.q1 = q1(mesh, dofmap, sol.coeffs, exact);
    rec.q2 = q2(mesh, dofmap, sol.coeffs, problem.psi);
    rec.lambda_mass = sol.lambda_mass();
    if (!out.history.empty())
      rec.lambda_gap = lambda_gap(out.history.back().lambda_mass, rec.lambda_mass);
    rec.pdas_iterations = sol.pdas_iterations;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    if (!out.history.empty() && rec.n_dofs <= out.history.back().n_dofs)
      throw std::runtime_error("adaptive_solve: refinement did not increase the dof count");
    out.history.push_back(rec);
    out.levels.push_back({mesh, std::move(dofmap), std::move(sol), std::move(report)});

    if (opts.mode == RefineMode::uniform) {
      mesh = mesh.uniformly_refined();
      continue;
    }
    const EstimatorReport& rep = out.levels.back().report;
    std::vector<Indicator> pool;
    pool.reserve(mesh.n_triangles() + mesh.n_edges());
    for (int t = 0; t < mesh.n_triangles(); ++t)
      pool.push_back({{MarkKey::Kind::triangle, t}, rep.eta_T[t] * rep.eta_T[t]});
    for (int e = 0; e < mesh.n_edges(); ++e)
      pool.push_back({{MarkKey::Kind::edge, e}, rep.edge_total2(e)});
    std::vector<MarkKey> marked = dorfler_mark(std::move(pool), opts.theta);
    if (marked.empty()) break;  // estimator is exactly zero
    std::vector<int> tris, edges;
    for (const MarkKey& key : marked)
      (key.kind == MarkKey::Kind::triangle ? tris : edges).push_back(key.id);
    mesh = mesh.refined(tris, edges);
  }
  return out;
}

void fill_reference_errors(const ProblemSpec& problem, const AdaptiveOptions& opts,
                           AdaptiveResult& result) {
  if (result.levels.empty()) return;
  bool missing = false;
  for (const LevelRecord& rec : result.history) missing = missing || !rec.error;
  if (!missing) return;

  double sigma = resolve_sigma(opts);
  const LevelState& last = result.levels.back();
  Mesh ref_mesh = last.mesh.uniformly_refined();
  DofMap ref_dofmap = build_dofmap(ref_mesh, opts.degree);
  ReducedSystem sys = build_system(problem, ref_mesh, ref_dofmap, sigma);
  PdasOptions popts = opts.pdas;
  apply_warm_start(last, ref_dofmap, sys, popts);
  DiscreteSolution ref_sol = solve_obstacle(sys, ref_dofmap, problem.psi, popts);

  for (std::size_t l = 0; l < result.levels.size(); ++l) {
    if (result.history[l].error) continue;
    const LevelState& state = result.levels[l];
    result.history[l].error = error_norm_reference(state.mesh, state.dofmap,
                                                   state.solution.coeffs, ref_mesh, ref_dofmap,
                                                   ref_sol.coeffs, sigma);
  }
}

double fit_rate(const std::vector<LevelRecord>& history,
                const std::function<double(const LevelRecord&)>& field, int window) {
  if (window < 3) throw std::invalid_argument("fit_rate: window must be at least 3");
  if (static_cast<int>(history.size()) < window)
    throw std::invalid_argument("fit_rate: history shorter than the window");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = static_cast<int>(history.size()) - window;
       i < static_cast<int>(history.size()); ++i) {
    double value = field(history[i]);
    if (!(value > 0.0)) throw std::domain_error("fit_rate: field must be positive");
    double x = std::log(static_cast<double>(history[i].n_dofs));
    double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = window;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace c0ip
