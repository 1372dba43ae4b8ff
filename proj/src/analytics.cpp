#include "quantmc/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "quantmc/likelihood.hpp"
#include "quantmc/link.hpp"

namespace quantmc {

void TagMatrix::validate() const {
    if (incidence.rows() < 1 || incidence.cols() < 1) {
        throw std::invalid_argument("tags: incidence matrix must be non-empty");
    }
    if (tag_names.size() != static_cast<std::size_t>(incidence.cols())) {
        throw std::invalid_argument(
            "tags: one name per column is required");
    }
    for (Eigen::Index i = 0; i < incidence.rows(); ++i) {
        for (Eigen::Index m = 0; m < incidence.cols(); ++m) {
            const double v = incidence(i, m);
            if (v != 0.0 && v != 1.0) {
                throw std::invalid_argument(
                    "tags: incidence entries must be 0 or 1");
            }
        }
    }
    for (Eigen::Index i = 0; i < incidence.rows(); ++i) {
        if (incidence.row(i).sum() < 1.0) {
            throw std::invalid_argument(
                "tags: every question needs at least one tag");
        }
    }
    for (Eigen::Index m = 0; m < incidence.cols(); ++m) {
        if (incidence.col(m).sum() < 1.0) {
            throw std::invalid_argument(
                "tags: every tag needs at least one question");
        }
    }
}

Eigen::MatrixXd denoised_grades(const Eigen::MatrixXd& z) {
    if (!z.allFinite()) {
        throw std::invalid_argument("denoised_grades: matrix must be finite");
    }
    return z.unaryExpr([](double v) { return inverse_logit(v); });
}

TagKnowledge tag_knowledge(const Eigen::MatrixXd& denoised,
                           const TagMatrix& tags) {
    tags.validate();
    if (denoised.rows() != tags.incidence.rows()) {
        throw std::invalid_argument(
            "tag_knowledge: question counts disagree");
    }
    if ((denoised.array() < 0.0).any() || (denoised.array() > 1.0).any()) {
        throw std::invalid_argument(
            "tag_knowledge: grades must lie in [0,1]");
    }
    // per-tag mean of the denoised grades over the questions carrying the tag
    Eigen::MatrixXd k = denoised.transpose() * tags.incidence;
    for (Eigen::Index m = 0; m < k.cols(); ++m) {
        k.col(m) /= tags.incidence.col(m).sum();
    }
    k = k.cwiseMax(0.0).cwiseMin(1.0);

    TagKnowledge out;
    out.knowledge = std::move(k);
    out.tag_names = tags.tag_names;
    out.class_average = out.knowledge.colwise().mean();
    return out;
}

int predict_label(double z, const QuantizerSpec& q) {
    int best = 1;
    double best_p = label_likelihood(z, 1, q);
    for (int p = 2; p <= q.num_labels(); ++p) {
        const double lp = label_likelihood(z, p, q);
        if (lp > best_p) {
            best_p = lp;
            best = p;
        }
    }
    return best;
}

double accuracy(const Eigen::MatrixXd& z, const ObservedResponses& test,
                const QuantizerSpec& q) {
    if (test.empty()) {
        throw std::invalid_argument("accuracy: empty test set");
    }
    if (z.rows() != test.num_questions() || z.cols() != test.num_learners()) {
        throw std::invalid_argument("accuracy: dimension mismatch");
    }
    std::int64_t hits = 0;
    for (const Response& r : test.entries()) {
        if (predict_label(z(r.question, r.learner), q) == r.label) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

double mean_likelihood(const Eigen::MatrixXd& z, const ObservedResponses& test,
                       const QuantizerSpec& q) {
    if (test.empty()) {
        throw std::invalid_argument("mean_likelihood: empty test set");
    }
    if (z.rows() != test.num_questions() || z.cols() != test.num_learners()) {
        throw std::invalid_argument("mean_likelihood: dimension mismatch");
    }
    double total = 0.0;
    for (const Response& r : test.entries()) {
        total += label_likelihood(z(r.question, r.learner), r.label, q);
    }
    return total / static_cast<double>(test.size());
}

double auc(const Eigen::MatrixXd& z, const ObservedResponses& test,
           const QuantizerSpec& q) {
    if (q.num_labels() != 2) {
        throw std::invalid_argument("auc: requires a binary quantizer");
    }
    if (test.empty()) {
        throw std::invalid_argument("auc: empty test set");
    }
    if (z.rows() != test.num_questions() || z.cols() != test.num_learners()) {
        throw std::invalid_argument("auc: dimension mismatch");
    }

    struct Scored {
        double score;
        bool positive;
    };
    std::vector<Scored> scored;
    scored.reserve(test.size());
    std::int64_t positives = 0;
    for (const Response& r : test.entries()) {
        const bool pos = r.label == 2;
        scored.push_back({z(r.question, r.learner), pos});
        positives += pos ? 1 : 0;
    }
    const std::int64_t negatives =
        static_cast<std::int64_t>(scored.size()) - positives;
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("auc: test set holds a single class");
    }

    // Mann-Whitney statistic from tie-averaged ranks of the scores
    std::sort(scored.begin(), scored.end(),
              [](const Scored& a, const Scored& b) { return a.score < b.score; });
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < scored.size()) {
        std::size_t j = i;
        while (j < scored.size() && scored[j].score == scored[i].score) {
            ++j;
        }
        const double avg_rank = (static_cast<double>(i + 1) +
                                 static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (scored[k].positive) {
                positive_rank_sum += avg_rank;
            }
        }
        i = j;
    }
    const double p = static_cast<double>(positives);
    const double n = static_cast<double>(negatives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

PredictionMetrics prediction_metrics(const Eigen::MatrixXd& z,
                                     const ObservedResponses& test,
                                     const QuantizerSpec& q) {
    PredictionMetrics m;
    m.cor = accuracy(z, test, q);
    m.lik = mean_likelihood(z, test, q);
    if (q.num_labels() == 2) {
        bool has1 = false;
        bool has2 = false;
        for (const Response& r : test.entries()) {
            has1 |= r.label == 1;
            has2 |= r.label == 2;
        }
        if (has1 && has2) {
            m.auc = auc(z, test, q);
        }
    }
    return m;
}

}  // namespace quantmc
