#include "quantmc/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "quantmc/link.hpp"

namespace quantmc {

namespace {

void check_dims(const Eigen::MatrixXd& z, const ObservedResponses& obs) {
    if (z.rows() != obs.num_questions() || z.cols() != obs.num_learners()) {
        throw std::invalid_argument(
            "matrix is " + std::to_string(z.rows()) + "x" +
            std::to_string(z.cols()) + " but responses expect " +
            std::to_string(obs.num_questions()) + "x" +
            std::to_string(obs.num_learners()));
    }
}

}  // namespace

double label_likelihood(double z, int label, const QuantizerSpec& q) {
    if (label < 1 || label > q.num_labels()) {
        throw std::invalid_argument("label " + std::to_string(label) +
                                    " outside 1.." +
                                    std::to_string(q.num_labels()));
    }
    const double hi = inverse_logit(q.upper_edge(label) - z);
    const double lo = inverse_logit(q.lower_edge(label) - z);
    const double p = hi - lo;
    return p < 0.0 ? 0.0 : p;
}

double nll(const Eigen::MatrixXd& z, const ObservedResponses& obs,
           const QuantizerSpec& q) {
    check_dims(z, obs);
    double total = 0.0;
    for (const Response& e : obs.entries()) {
        const double p = label_likelihood(z(e.question, e.learner), e.label, q);
        total -= std::log(std::max(p, kProbFloor));
    }
    return total;
}

Eigen::MatrixXd nll_gradient(const Eigen::MatrixXd& z,
                             const ObservedResponses& obs,
                             const QuantizerSpec& q) {
    check_dims(z, obs);
    Eigen::MatrixXd g =
        Eigen::MatrixXd::Zero(obs.num_questions(), obs.num_learners());
    for (const Response& e : obs.entries()) {
        const double zij = z(e.question, e.learner);
        const double du = inverse_logit_deriv(q.upper_edge(e.label) - zij);
        const double dl = inverse_logit_deriv(q.lower_edge(e.label) - zij);
        const double p =
            std::max(label_likelihood(zij, e.label, q), kProbFloor);
        g(e.question, e.learner) = (du - dl) / p;
    }
    return g;
}

}  // namespace quantmc
