#pragma once

#include <Eigen/Core>
#include <vector>

#include "quantmc/likelihood.hpp"

namespace quantmc {

struct SolverConfig {
    /// Nuclear-norm ball radius; the single model parameter.
    double lambda = 1.0;
    int max_iterations = 1000;
    /// Relative objective change between accepted iterates that counts as
    /// converged.
    double tolerance = 1e-6;
    /// First trial step of the backtracking line search. The per-entry
    /// curvature of the binary logistic loss is bounded by 1/4, so 4.0 is a
    /// principled start; backtracking covers the general quantized case.
    double initial_step = 4.0;
    double backtracking_factor = 0.5;
    /// Reset the momentum whenever the objective of the accepted iterate
    /// increases.
    bool restart_on_increase = true;

    void validate() const;
};

struct FitResult {
    Eigen::MatrixXd z_hat;
    /// Objective at the initial point followed by every accepted iterate.
    std::vector<double> objective_trace;
    int iterations_used = 0;
    bool converged = false;
    /// Count of singular values of z_hat above 1e-8 * sigma_max.
    int effective_rank = 0;
};

/// Euclidean projection of v onto {u : sum_k |u_k| <= radius}. Returns v
/// unchanged when it is already inside the ball; otherwise soft-thresholds
/// by the KKT multiplier, preserving signs and never increasing any |v_k|.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

/// Projection onto the nuclear-norm ball: SVD, project the singular values
/// onto the l1 ball of the same radius, reconstruct. Returns the input
/// unchanged when its nuclear norm is already within the radius.
Eigen::MatrixXd project_nuclear_ball(const Eigen::MatrixXd& z, double radius);

/// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& z);

/// Count of singular values above 1e-8 * sigma_max; 0 for the zero matrix.
int effective_rank(const Eigen::MatrixXd& z);

struct LineSearchResult {
    Eigen::MatrixXd candidate;
    double step;
    /// nll at the candidate, already evaluated by the search.
    double objective;
};

/// One projected-gradient trial step from `point` with backtracking: the
/// step shrinks by `shrink_factor` until
///   f(c) <= f(point) + <grad, c - point> + ||c - point||_F^2 / (2 step)
/// holds for c = project_nuclear_ball(point - step * grad, radius).
/// Throws NumericalError when the step falls below 1e-12.
LineSearchResult backtracking_step(const Eigen::MatrixXd& point,
                                   double objective_at_point,
                                   const Eigen::MatrixXd& gradient,
                                   double step_in, double radius,
                                   double shrink_factor,
                                   const ObservedResponses& obs,
                                   const QuantizerSpec& q);

/**
 * Minimizes the quantized-response negative log-likelihood over the
 * nuclear-norm ball of radius cfg.lambda by accelerated projected gradient
 * descent (FISTA): gradient steps with backtracking line search, projection
 * onto the ball, momentum t_{k+1} = (1+sqrt(1+4 t_k^2))/2, and adaptive
 * restart on objective increase. The problem is convex, so the iterates
 * approach the global optimum.
 *
 * Starts from the zero matrix (feasible for every radius). Returns the best
 * iterate seen, so the final objective never exceeds the objective at the
 * start.
 */
FitResult fit(const ObservedResponses& obs, const QuantizerSpec& q,
              const SolverConfig& cfg);

/// Same, starting from `initial` (projected onto the ball first).
FitResult fit(const ObservedResponses& obs, const QuantizerSpec& q,
              const SolverConfig& cfg, const Eigen::MatrixXd& initial);

}  // namespace quantmc
