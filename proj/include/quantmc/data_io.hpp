#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quantmc/analytics.hpp"
#include "quantmc/errors.hpp"
#include "quantmc/responses.hpp"
#include "quantmc/solver.hpp"

namespace quantmc {

/// A loaded response set with the id maps tying matrix rows/columns back to
/// the external question and learner identifiers (index -> id, in order of
/// first appearance in the file).
struct Dataset {
    ObservedResponses responses{0, 0};
    QuantizerSpec quantizer;
    std::optional<TagMatrix> tags;
    std::vector<std::string> question_ids;
    std::vector<std::string> learner_ids;
};

/// Ground-truth instance from the synthetic generator.
struct SyntheticTruth {
    Eigen::MatrixXd z_true;
    int rank = 0;
    ObservedResponses responses{0, 0};
    double observed_fraction = 1.0;
};

enum class CVMetric { lik, cor };

struct CVReport {
    std::vector<double> lambda_grid;
    /// Validation means across folds, per grid point.
    std::vector<double> mean_lik;
    std::vector<double> mean_cor;
    double best_lambda = 0.0;
    int folds = 0;
    CVMetric metric = CVMetric::lik;
};

/// Reads a `learner_id,question_id,grade` CSV. Grades must lie in 1..P of
/// the quantizer; duplicate (learner, question) pairs and malformed rows
/// raise ParseError naming the line. Q and N are inferred from the distinct
/// ids present.
Dataset load_responses(const std::filesystem::path& path,
                       const QuantizerSpec& q);

/// Writes the responses CSV. Empty id vectors default to q1..qQ / l1..lN.
void save_responses(const std::filesystem::path& path,
                    const ObservedResponses& obs,
                    const std::vector<std::string>& question_ids = {},
                    const std::vector<std::string>& learner_ids = {});

/// Reads a `question_id,tag` association CSV against the given question-id
/// map. Tag columns are ordered by first appearance. Every question must
/// end up with at least one tag.
TagMatrix load_tags(const std::filesystem::path& path,
                    const std::vector<std::string>& question_ids);

/// Quantizer JSON: {"num_labels": P, "interior_boundaries": [w1..w_{P-1}]}.
/// The infinite endpoints are implicit.
QuantizerSpec load_quantizer(const std::filesystem::path& path);
void save_quantizer(const std::filesystem::path& path, const QuantizerSpec& q);

/// Dense matrix CSV, one row per line, values round-trip exactly.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const std::filesystem::path& path,
                     const Eigen::MatrixXd& m);

/// Draws a rank-K ground truth Z = scale * G_Q G_N^T / sqrt(K) with
/// standard-normal factors, then observes each entry independently with
/// probability observed_fraction as quantize(Z_ij + eps_ij) with
/// Logistic(0,1) noise. Fully deterministic given the seed.
SyntheticTruth synthesize(int num_questions, int num_learners, int rank,
                          const QuantizerSpec& q, double observed_fraction,
                          double scale, std::uint64_t seed);

/// Splits the entries into disjoint train/test parts with
/// |test| = round(fraction * |entries|), deterministically in the seed.
std::pair<ObservedResponses, ObservedResponses> holdout_split(
    const ObservedResponses& responses, double fraction, std::uint64_t seed);

/// Deterministic fold assignment: a seeded shuffle dealt round-robin, so
/// fold sizes differ by at most one. Returned vector maps entry index to
/// fold id in [0, folds).
std::vector<int> make_folds(std::size_t n, int folds, std::uint64_t seed);

/// Geometric grid of `points` radii spanning [0.1, 100] * sqrt(Q*N). The
/// anchor grows with the matrix size, matching how the nuclear norm scales.
std::vector<double> default_lambda_grid(int num_questions, int num_learners,
                                        int points = 10);

/// K-fold cross-validation over the lambda grid: for each lambda and fold,
/// fits on the complement and scores LIK and COR on the fold. best_lambda
/// maximizes the mean of `metric`, ties to the smaller lambda.
CVReport cross_validate_lambda(const ObservedResponses& responses,
                               const QuantizerSpec& q,
                               const std::vector<double>& lambda_grid,
                               int folds, std::uint64_t seed,
                               const SolverConfig& base = {},
                               CVMetric metric = CVMetric::lik);

}  // namespace quantmc
