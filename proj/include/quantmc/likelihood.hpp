#pragma once

#include <Eigen/Core>

#include "quantmc/quantizer.hpp"
#include "quantmc/responses.hpp"

namespace quantmc {

/// Floor applied to per-entry bin probabilities inside nll and in the
/// gradient denominator. Interior-bin probabilities underflow for large |z|;
/// the floor keeps the objective and gradient finite.
inline constexpr double kProbFloor = 1e-12;

/// P(Y = label | z) under the quantized logistic model:
/// Phi(w_label - z) - Phi(w_{label-1} - z). The P values at a fixed z
/// telescope to 1. Throws std::invalid_argument for labels outside 1..P.
double label_likelihood(double z, int label, const QuantizerSpec& q);

/// Negative log-likelihood of the observed responses at Z, with each bin
/// probability floored at kProbFloor before the log. Zero on an empty
/// observation set. Throws std::invalid_argument on dimension mismatch.
double nll(const Eigen::MatrixXd& z, const ObservedResponses& obs,
           const QuantizerSpec& q);

/// Gradient of nll with respect to Z:
///   (Phi'(U-z) - Phi'(L-z)) / max(Phi(U-z) - Phi(L-z), kProbFloor)
/// on observed entries (U, L the upper/lower bin edges of the observed
/// label), zero elsewhere.
Eigen::MatrixXd nll_gradient(const Eigen::MatrixXd& z,
                             const ObservedResponses& obs,
                             const QuantizerSpec& q);

}  // namespace quantmc
