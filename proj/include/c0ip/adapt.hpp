#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "c0ip/assembly.hpp"
#include "c0ip/estimator.hpp"
#include "c0ip/mesh.hpp"
#include "c0ip/problems.hpp"
#include "c0ip/space.hpp"
#include "c0ip/vi_solver.hpp"

namespace c0ip {

enum class RefineMode { adaptive, uniform };

// Marking pools triangles (by element indicator) and edges (by the sum of the
// squared edge terms) into one list.
struct MarkKey {
  enum class Kind { triangle, edge };
  Kind kind = Kind::triangle;
  int id = 0;
  friend bool operator==(const MarkKey&, const MarkKey&) = default;
};

struct Indicator {
  MarkKey key;
  double value2 = 0.0;  // squared contribution
};

// Bulk criterion: sort by squared value descending and mark the shortest
// prefix reaching theta times the total. Ties break deterministically by
// kind then id. Zero-valued entities are never marked.
std::vector<MarkKey> dorfler_mark(std::vector<Indicator> indicators, double theta);

// One row of the convergence history. The multiplier gap pairs this level
// with the previous one, so it is absent on the first row; the error stays
// empty until an exact solution or a reference solve provides it.
struct LevelRecord {
  int level = 0;
  int n_dofs = 0;
  double h_max = 0.0;
  double eta = 0.0;
  std::optional<double> error;
  double q1 = 0.0;
  double q2 = 0.0;
  double lambda_mass = 0.0;
  std::optional<double> lambda_gap;
  int pdas_iterations = 0;
  double wall_ms = 0.0;
};

struct AdaptiveOptions {
  int degree = 2;
  double sigma = 0.0;  // <= 0 picks the default for the degree
  double theta = 0.5;
  int max_dof = 10000;
  RefineMode mode = RefineMode::adaptive;
  PdasOptions pdas;
};

struct LevelState {
  Mesh mesh;
  DofMap dofmap;
  DiscreteSolution solution;
  EstimatorReport report;
};

struct AdaptiveResult {
  std::vector<LevelRecord> history;
  std::vector<LevelState> levels;
};

// Stiffness, load, boundary terms, and elimination for one mesh. Problems
// with exact data get the boundary load functional and interpolated boundary
// values; homogeneous problems pin the boundary dofs to zero.
ReducedSystem build_system(const ProblemSpec& problem, const Mesh& mesh, const DofMap& dofmap,
                           double sigma);

// Solve -> Estimate -> Mark -> Refine until the next mesh would exceed
// max_dof. Levels after the first warm-start the active-set solver from the
// previous solution. Throws if refinement fails to increase the dof count.
AdaptiveResult adaptive_solve(const ProblemSpec& problem, const AdaptiveOptions& opts);

// Post-pass for problems without a closed-form solution: solve once on the
// uniform refinement of the final mesh and fill every empty error slot with
// the energy distance to that reference.
void fill_reference_errors(const ProblemSpec& problem, const AdaptiveOptions& opts,
                           AdaptiveResult& result);

// Least-squares slope of log(field) against log(N) over the final `window`
// levels; window must be at least 3 and the field positive there.
double fit_rate(const std::vector<LevelRecord>& history,
                const std::function<double(const LevelRecord&)>& field, int window);

}  // namespace c0ip
