#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracivp/fracops.hpp"
#include "fracivp/model.hpp"
#include "fracivp/specfun.hpp"

namespace fracivp::solver {

using fracops::SampledFunction;
using model::Certificate;
using model::Problem;
using specfun::QuadratureRule;

struct SolverConfig {
  std::size_t n_grid = 129;      // solution nodes on [0, T0], >= 9
  std::size_t n_quad = 32;       // Gauss-Jacobi points, >= 4
  double tol = 1e-10;            // sup-norm stopping tolerance
  std::size_t max_iter = 1000;
  double divergence_factor = 10.0;  // multiple of the a-priori bound
  std::optional<double> horizon;    // T0; computed from the growth check when empty
  double ball_radius = 1.0;         // r used when T0 is computed here

  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, Diverged };

std::string_view to_string(SolveStatus s);

struct Solution {
  SampledFunction u;
  std::size_t iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::MaxIterations;
  double residual_sup = 0.0;
  std::vector<double> node_residuals;  // |u - Mu| at each grid node
  std::vector<Certificate> certificates;
  std::string notes;
};

/// Starting iterate for picard_solve.
class InitialGuess {
 public:
  /// u = u0 everywhere.
  static InitialGuess constant();
  static InitialGuess function(std::function<double(double)> f, std::string label = "function");
  /// Resampled (by linear interpolation) onto the solution grid.
  static InitialGuess samples(SampledFunction f);

  std::vector<double> on_grid(std::span<const double> grid, double u0) const;
  const std::string& label() const { return label_; }

 private:
  std::function<double(double)> fn_;
  std::string label_ = "u0";
};

/// (Mu)(x_i) = (1/G(a)) sum_j w_j h(x_i t_j, u(x_i t_j)) at every grid
/// node, with (Mu)(0) = G(1-a) h(0, u0). u is any callable on [0, grid.back()].
std::vector<double> apply_operator(std::span<const double> grid,
                                   const std::function<double(double)>& u, const Problem& p,
                                   const QuadratureRule& rule);

/// apply_operator on the piecewise linear interpolant of u.
SampledFunction apply_M(const SampledFunction& u, const Problem& p, const QuadratureRule& rule);

/// |u(x_i) - (Mu)(x_i)| at each node.
std::vector<double> node_residuals(std::span<const double> grid,
                                   const std::function<double(double)>& u, const Problem& p,
                                   const QuadratureRule& rule);

/// sup_i |u(x_i) - (Mu)(x_i)|: the definition of "numerical solution".
double residual(const SampledFunction& u, const Problem& p, const QuadratureRule& rule);
double residual(std::span<const double> grid, const std::function<double(double)>& u,
                const Problem& p, const QuadratureRule& rule);

/// Independent route for Mu: product integration of xi^{-a} h(xi, u(xi))
/// on an n_mesh-node graded mesh per output node. The constant part
/// h(0, u0) xi^{-a} is integrated in closed form; the remainder is
/// continuous and vanishes at 0, and goes through rl_integral_endpoint.
std::vector<double> apply_operator_product(std::span<const double> grid,
                                           const std::function<double(double)>& u,
                                           const Problem& p, std::size_t n_mesh = 2049);

/// Picard iteration u_{k+1} = M u_k on a uniform grid over [0, T0].
///
/// Stops when sup |u_{k+1} - u_k| <= tol and the residual of the new
/// iterate is <= 10 tol (converged), when max_iter is reached, or when
/// sup |u_k| exceeds divergence_factor times the a-priori bound.
/// Throws PreconditionError if the compatibility check fails.
Solution picard_solve(const Problem& p, const SolverConfig& cfg,
                      const InitialGuess& init = InitialGuess::constant());

/// T0 used by picard_solve when cfg.horizon is empty.
double solver_horizon(const Problem& p, const SolverConfig& cfg);

struct Cluster {
  std::size_t representative = 0;  // index into ProbeResult::runs
  std::vector<std::size_t> members;
};

struct ProbeResult {
  std::vector<Solution> runs;
  std::vector<std::string> labels;
  std::vector<Cluster> clusters;
  /// Pairwise sup distances between runs; NaN where either run did not converge.
  std::vector<std::vector<double>> distances;
  double cluster_radius = 0.0;
};

/// Runs picard_solve from each start and groups converged solutions whose
/// sup distance to a cluster representative is <= 100 tol. Two or more
/// clusters is numerical evidence of nonuniqueness. Throws NumericalError
/// when no start converges.
ProbeResult multistart_probe(const Problem& p, const SolverConfig& cfg,
                             const std::vector<InitialGuess>& inits);

}  // namespace fracivp::solver
