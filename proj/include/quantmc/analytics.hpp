#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "quantmc/likelihood.hpp"

namespace quantmc {

/// Q x M binary question-tag incidence. Every question carries at least one
/// tag and every tag is attached to at least one question.
struct TagMatrix {
    Eigen::MatrixXd incidence;
    std::vector<std::string> tag_names;

    int num_questions() const { return static_cast<int>(incidence.rows()); }
    int num_tags() const { return static_cast<int>(incidence.cols()); }

    /// Throws std::invalid_argument on non-binary entries, a tag name count
    /// mismatch, an untagged question, or an all-zero tag column.
    void validate() const;
};

/// N x M learner tag knowledge: entry (j, m) is learner j's mean de-noised
/// grade over the questions carrying tag m, always in [0,1].
struct TagKnowledge {
    Eigen::MatrixXd knowledge;
    std::vector<std::string> tag_names;
    /// Column means of `knowledge`, length M.
    Eigen::VectorXd class_average;
};

struct PredictionMetrics {
    double cor = 0.0;
    double lik = 0.0;
    /// Present only for binary quantizers with both classes in the test set.
    std::optional<double> auc;
};

/// De-noised, completed grade matrix A = Phi(Z), entrywise.
Eigen::MatrixXd denoised_grades(const Eigen::MatrixXd& z);

/// B = A^T T, column-scaled by the tag counts, so B(j, m) is the mean of
/// column j of A over the questions tagged m. Requires A entries in [0,1].
TagKnowledge tag_knowledge(const Eigen::MatrixXd& a, const TagMatrix& tags);

/// Maximum-likelihood label at z; ties break toward the smaller label.
int predict_label(double z, const QuantizerSpec& q);

/// Fraction of test entries whose predicted label equals the observed one.
double accuracy(const Eigen::MatrixXd& z, const ObservedResponses& test,
                const QuantizerSpec& q);

/// Mean of label_likelihood over the test entries.
double mean_likelihood(const Eigen::MatrixXd& z, const ObservedResponses& test,
                       const QuantizerSpec& q);

/// Mann-Whitney AUC of the scores Phi(z) against the binary labels, with
/// label 2 as the positive class; tied scores contribute 1/2. Throws
/// std::invalid_argument unless P = 2 and both classes appear in the test
/// set.
double auc(const Eigen::MatrixXd& z, const ObservedResponses& test,
           const QuantizerSpec& q);

/// COR and LIK, plus AUC when it is defined for this test set.
PredictionMetrics prediction_metrics(const Eigen::MatrixXd& z,
                                     const ObservedResponses& test,
                                     const QuantizerSpec& q);

}  // namespace quantmc
