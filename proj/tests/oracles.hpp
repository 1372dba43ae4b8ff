#pragma once

// Independent reference implementations the tests check the library
// against. Everything here is deliberately written from the mathematical
// definitions, by different algorithms than the library uses, and shares no
// code with src/.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "quantmc/likelihood.hpp"
#include "quantmc/quantizer.hpp"
#include "quantmc/responses.hpp"

namespace oracle {

/// Euclidean projection onto the l1 ball by bisection on the KKT
/// multiplier theta, solving sum_k max(|v_k| - theta, 0) = radius. The
/// library uses the sort-based method instead.
inline Eigen::VectorXd l1_projection(const Eigen::VectorXd& v,
                                     double radius) {
    const Eigen::VectorXd a = v.cwiseAbs();
    if (a.sum() <= radius) {
        return v;
    }
    const auto shrunk_sum = [&](double theta) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            s += std::max(a[i] - theta, 0.0);
        }
        return s;
    };
    double lo = 0.0;
    double hi = a.maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shrunk_sum(mid) > radius) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double theta = 0.5 * (lo + hi);
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::max(a[i] - theta, 0.0);
        out[i] = v[i] < 0.0 ? -mag : mag;
    }
    return out;
}

/// Central finite differences of nll, entry by entry.
inline Eigen::MatrixXd fd_gradient(const Eigen::MatrixXd& z,
                                   const quantmc::ObservedResponses& obs,
                                   const quantmc::QuantizerSpec& q,
                                   double h = 1e-5) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(z.rows(), z.cols());
    Eigen::MatrixXd work = z;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            work(i, j) = z(i, j) + h;
            const double f_plus = quantmc::nll(work, obs, q);
            work(i, j) = z(i, j) - h;
            const double f_minus = quantmc::nll(work, obs, q);
            work(i, j) = z(i, j);
            g(i, j) = (f_plus - f_minus) / (2.0 * h);
        }
    }
    return g;
}

/// AUC by exhaustive positive-negative pair counting; ties count 1/2.
inline double auc_pair_count(const std::vector<double>& scores,
                             const std::vector<bool>& positive) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        if (!positive[p]) {
            continue;
        }
        for (std::size_t n = 0; n < scores.size(); ++n) {
            if (positive[n]) {
                continue;
            }
            ++pairs;
            if (scores[p] > scores[n]) {
                wins += 1.0;
            } else if (scores[p] == scores[n]) {
                wins += 0.5;
            }
        }
    }
    return wins / static_cast<double>(pairs);
}

/// Tag knowledge by direct looping over tagged questions.
inline Eigen::MatrixXd tag_means(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& incidence) {
    Eigen::MatrixXd b(a.cols(), incidence.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index m = 0; m < incidence.cols(); ++m) {
            double sum = 0.0;
            int count = 0;
            for (Eigen::Index i = 0; i < a.rows(); ++i) {
                if (incidence(i, m) == 1.0) {
                    sum += a(i, j);
                    ++count;
                }
            }
            b(j, m) = sum / count;
        }
    }
    return b;
}

/// Minimizer of a scalar function over [lo, hi]: coarse grid, then
/// golden-section refinement around the best cell.
inline double minimize_1d(const std::function<double(double)>& f, double lo,
                          double hi, int grid = 2000) {
    double best_x = lo;
    double best_f = f(lo);
    for (int i = 1; i <= grid; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / grid;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    const double cell = (hi - lo) / grid;
    double a = std::max(lo, best_x - cell);
    double b = std::min(hi, best_x + cell);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace oracle
