#include "quantmc/solver.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "quantmc/errors.hpp"

namespace quantmc {

namespace {

constexpr double kMinStep = 1e-12;

Eigen::BDCSVD<Eigen::MatrixXd> thin_svd(const Eigen::MatrixXd& z) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(
        z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("SVD did not converge");
    }
    return svd;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("solver: lambda must be positive");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("solver: max_iterations must be >= 1");
    }
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("solver: tolerance must be positive");
    }
    if (!(initial_step > 0.0)) {
        throw std::invalid_argument("solver: initial_step must be positive");
    }
    if (!(backtracking_factor > 0.0 && backtracking_factor < 1.0)) {
        throw std::invalid_argument(
            "solver: backtracking_factor must lie in (0,1)");
    }
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("project_l1_ball: radius must be positive");
    }
    if (!v.allFinite()) {
        throw std::invalid_argument("project_l1_ball: vector must be finite");
    }
    const Eigen::VectorXd a = v.cwiseAbs();
    if (a.sum() <= radius) {
        return v;
    }
    // KKT threshold of the simplex projection of |v| (sort, then the largest
    // k whose running mean stays above the would-be multiplier).
    std::vector<double> sorted(a.data(), a.data() + a.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double t = (cumulative - radius) / static_cast<double>(k + 1);
        if (sorted[k] - t > 0.0) {
            theta = t;
        }
    }
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::max(a[i] - theta, 0.0);
        out[i] = v[i] < 0.0 ? -mag : mag;
    }
    return out;
}

Eigen::MatrixXd project_nuclear_ball(const Eigen::MatrixXd& z, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument(
            "project_nuclear_ball: radius must be positive");
    }
    if (!z.allFinite()) {
        throw std::invalid_argument(
            "project_nuclear_ball: matrix must be finite");
    }
    const auto svd = thin_svd(z);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv.sum() <= radius) {
        return z;
    }
    const Eigen::VectorXd projected = project_l1_ball(sv, radius);
    return svd.matrixU() * projected.asDiagonal() *
           svd.matrixV().transpose();
}

double nuclear_norm(const Eigen::MatrixXd& z) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(z);
    return svd.singularValues().sum();
}

int effective_rank(const Eigen::MatrixXd& z) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(z);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0.0) {
        return 0;
    }
    const double cutoff = 1e-8 * sv[0];
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > cutoff) {
            ++rank;
        }
    }
    return rank;
}

LineSearchResult backtracking_step(const Eigen::MatrixXd& point,
                                   double objective_at_point,
                                   const Eigen::MatrixXd& gradient,
                                   double step_in, double radius,
                                   double shrink_factor,
                                   const ObservedResponses& obs,
                                   const QuantizerSpec& q) {
    if (!(step_in > 0.0)) {
        throw std::invalid_argument("backtracking: step must be positive");
    }
    if (!(shrink_factor > 0.0 && shrink_factor < 1.0)) {
        throw std::invalid_argument(
            "backtracking: shrink factor must lie in (0,1)");
    }
    double step = step_in;
    while (true) {
        Eigen::MatrixXd candidate =
            project_nuclear_ball(point - step * gradient, radius);
        const Eigen::MatrixXd diff = candidate - point;
        const double f_candidate = nll(candidate, obs, q);
        const double surrogate = objective_at_point +
                                 (gradient.array() * diff.array()).sum() +
                                 diff.squaredNorm() / (2.0 * step);
        if (f_candidate <= surrogate) {
            return {std::move(candidate), step, f_candidate};
        }
        step *= shrink_factor;
        if (step < kMinStep) {
            throw NumericalError("line search: step underflow below 1e-12");
        }
    }
}

FitResult fit(const ObservedResponses& obs, const QuantizerSpec& q,
              const SolverConfig& cfg) {
    return fit(obs, q, cfg,
               Eigen::MatrixXd::Zero(obs.num_questions(), obs.num_learners()));
}

FitResult fit(const ObservedResponses& obs, const QuantizerSpec& q,
              const SolverConfig& cfg, const Eigen::MatrixXd& initial) {
    cfg.validate();
    if (obs.empty()) {
        throw std::invalid_argument("fit: empty observation set");
    }
    if (obs.max_label() > q.num_labels()) {
        throw std::invalid_argument("fit: responses carry labels above P");
    }

    Eigen::MatrixXd z = project_nuclear_ball(initial, cfg.lambda);
    double f_z = nll(z, obs, q);
    if (!std::isfinite(f_z)) {
        throw NumericalError("fit: non-finite objective at the start");
    }

    FitResult result;
    result.objective_trace.reserve(
        static_cast<std::size_t>(cfg.max_iterations) + 1);
    result.objective_trace.push_back(f_z);

    Eigen::MatrixXd momentum = z;
    Eigen::MatrixXd best_z = z;
    double best_f = f_z;
    double t = 1.0;
    double step = cfg.initial_step;
    int accepted = 0;
    bool converged = false;

    while (accepted < cfg.max_iterations) {
        double f_momentum = nll(momentum, obs, q);
        Eigen::MatrixXd gradient = nll_gradient(momentum, obs, q);
        LineSearchResult ls =
            backtracking_step(momentum, f_momentum, gradient, step, cfg.lambda,
                              cfg.backtracking_factor, obs, q);

        if (cfg.restart_on_increase && ls.objective > f_z) {
            // momentum overshoot; redo as a plain projected-gradient step
            // from the last accepted iterate, which cannot increase f
            t = 1.0;
            momentum = z;
            f_momentum = f_z;
            gradient = nll_gradient(momentum, obs, q);
            ls = backtracking_step(momentum, f_momentum, gradient, step,
                                   cfg.lambda, cfg.backtracking_factor, obs, q);
        }
        if (!std::isfinite(ls.objective)) {
            throw NumericalError("fit: non-finite objective");
        }

        step = ls.step;
        const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
        momentum = ls.candidate + ((t - 1.0) / t_next) * (ls.candidate - z);
        t = t_next;

        const double change = std::abs(f_z - ls.objective);
        z = std::move(ls.candidate);
        f_z = ls.objective;
        ++accepted;
        result.objective_trace.push_back(f_z);
        if (f_z < best_f) {
            best_f = f_z;
            best_z = z;
        }
        if (change <= cfg.tolerance * std::max(1.0, std::abs(f_z))) {
            converged = true;
            break;
        }
    }

    result.z_hat = std::move(best_z);
    result.iterations_used = accepted;
    result.converged = converged;
    result.effective_rank = effective_rank(result.z_hat);
    return result;
}

}  // namespace quantmc
