#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "quantmc/analytics.hpp"
#include "quantmc/link.hpp"
#include "quantmc/rng.hpp"
#include "oracles.hpp"

using namespace quantmc;

namespace {
QuantizerSpec four_label() {
    return QuantizerSpec::from_interior({-1.0, 0.0, 1.0});
}
}  // namespace

TEST_CASE("denoised grades apply the link entrywise") {
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 2);
    const Eigen::MatrixXd a = denoised_grades(zero);
    CHECK((a.array() == 0.5).all());

    Eigen::MatrixXd one(1, 1);
    one << 1.0;
    CHECK(denoised_grades(one)(0, 0) ==
          doctest::Approx(0.73105857863000488).epsilon(1e-15));

    Rng rng(8);
    Eigen::MatrixXd z(4, 4);
    for (int i = 0; i < 16; ++i) {
        z(i / 4, i % 4) = 10.0 * (2.0 * rng.uniform() - 1.0);
    }
    const Eigen::MatrixXd lo = denoised_grades(z);
    const Eigen::MatrixXd hi = denoised_grades((z.array() + 0.5).matrix());
    CHECK((hi.array() > lo.array()).all());
    CHECK((lo.array() > 0.0).all());
    CHECK((lo.array() < 1.0).all());
}

TEST_CASE("tag matrix validation") {
    TagMatrix t;
    t.incidence = Eigen::MatrixXd::Ones(2, 1);
    t.tag_names = {"algebra"};
    CHECK_NOTHROW(t.validate());

    t.tag_names = {};
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);

    t.tag_names = {"algebra"};
    t.incidence(0, 0) = 0.5;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);

    t.incidence = Eigen::MatrixXd::Zero(2, 2);
    t.incidence(0, 0) = 1.0;
    t.incidence(1, 0) = 1.0;
    t.tag_names = {"algebra", "geometry"};
    // geometry column is all zero
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);

    t.incidence = Eigen::MatrixXd::Zero(2, 2);
    t.incidence(0, 0) = 1.0;
    t.incidence(0, 1) = 1.0;
    // second question has no tags
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("tag knowledge on hand-checked instances") {
    TagMatrix ones_tag;
    ones_tag.incidence = Eigen::MatrixXd::Ones(3, 1);
    ones_tag.tag_names = {"all"};
    const TagKnowledge all =
        tag_knowledge(Eigen::MatrixXd::Ones(3, 2), ones_tag);
    CHECK((all.knowledge.array() == 1.0).all());

    Eigen::MatrixXd a(2, 2);
    a << 1.0, 0.5, 0.0, 0.5;
    TagMatrix t;
    t.incidence = Eigen::MatrixXd::Ones(2, 1);
    t.tag_names = {"only"};
    const TagKnowledge k = tag_knowledge(a, t);
    CHECK(k.knowledge.rows() == 2);
    CHECK(k.knowledge.cols() == 1);
    CHECK(k.knowledge(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(k.knowledge(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(k.class_average(0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("tag knowledge equals per-tag means on random inputs") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int q = 2 + static_cast<int>(rng.below(6));
        const int n = 1 + static_cast<int>(rng.below(5));
        const int m = 1 + static_cast<int>(rng.below(4));
        Eigen::MatrixXd a(q, n);
        for (int i = 0; i < q; ++i) {
            for (int j = 0; j < n; ++j) {
                a(i, j) = rng.uniform();
            }
        }
        TagMatrix t;
        t.incidence = Eigen::MatrixXd::Zero(q, m);
        t.tag_names.assign(static_cast<std::size_t>(m), "t");
        for (int i = 0; i < q; ++i) {
            t.incidence(i, static_cast<int>(rng.below(
                               static_cast<std::uint64_t>(m)))) = 1.0;
        }
        for (int c = 0; c < m; ++c) {
            if (t.incidence.col(c).sum() == 0.0) {
                t.incidence(static_cast<int>(rng.below(
                                static_cast<std::uint64_t>(q))),
                            c) = 1.0;
            }
        }
        const TagKnowledge k = tag_knowledge(a, t);
        const Eigen::MatrixXd want = oracle::tag_means(a, t.incidence);
        CHECK((k.knowledge - want).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((k.knowledge.array() >= 0.0).all());
        CHECK((k.knowledge.array() <= 1.0).all());
        CHECK((k.class_average.transpose() - k.knowledge.colwise().mean())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-15);
    }
}

TEST_CASE("tag knowledge rejects bad inputs") {
    TagMatrix t;
    t.incidence = Eigen::MatrixXd::Ones(2, 1);
    t.tag_names = {"x"};
    CHECK_THROWS_AS(tag_knowledge(Eigen::MatrixXd::Ones(3, 2), t),
                    std::invalid_argument);
    Eigen::MatrixXd out_of_range(2, 2);
    out_of_range << 0.5, 1.5, 0.5, 0.5;
    CHECK_THROWS_AS(tag_knowledge(out_of_range, t), std::invalid_argument);
}

TEST_CASE("label prediction picks the likeliest bin") {
    const QuantizerSpec b;
    CHECK(predict_label(2.0, b) == 2);
    CHECK(predict_label(0.0, b) == 1);
    CHECK(predict_label(-3.0, b) == 1);

    // at z = 0.5 the unbounded top bin (1, inf) holds more mass (~0.378)
    // than the containing bin (0, 1] (~0.245), so the likeliest label is 4,
    // not the bin z falls in
    const QuantizerSpec p4 = four_label();
    int argmax = 1;
    double best = label_likelihood(0.5, 1, p4);
    for (int p = 2; p <= 4; ++p) {
        if (label_likelihood(0.5, p, p4) > best) {
            best = label_likelihood(0.5, p, p4);
            argmax = p;
        }
    }
    CHECK(argmax == 4);
    CHECK(predict_label(0.5, p4) == argmax);
    // deep inside an interior bin the containing bin does win
    CHECK(predict_label(0.5, QuantizerSpec::from_interior({-3.0, 0.0, 3.0})) ==
          3);

    int prev = 1;
    for (int i = 0; i <= 200; ++i) {
        const int label = predict_label(-5.0 + 0.05 * i, p4);
        CHECK(label >= prev);
        prev = label;
    }
}

TEST_CASE("accuracy counts exact label matches") {
    const QuantizerSpec b;
    ObservedResponses test(2, 2);
    test.add(0, 0, 2);
    test.add(0, 1, 1);
    test.add(1, 0, 1);
    test.add(1, 1, 2);
    Eigen::MatrixXd z(2, 2);
    z << 2.0, -2.0, -2.0, 2.0;
    CHECK(accuracy(z, test, b) == 1.0);

    z << 2.0, 2.0, -2.0, -2.0;
    CHECK(accuracy(z, test, b) == 0.5);

    z << 2.0, -2.0, -2.0, -2.0;
    CHECK(accuracy(z, test, b) == 0.75);

    const ObservedResponses empty(2, 2);
    CHECK_THROWS_AS(accuracy(z, empty, b), std::invalid_argument);
}

TEST_CASE("mean likelihood averages per-entry probabilities") {
    const QuantizerSpec b;
    ObservedResponses test(1, 2);
    test.add(0, 0, 2);
    test.add(0, 1, 1);
    CHECK(mean_likelihood(Eigen::MatrixXd::Zero(1, 2), test, b) == 0.5);

    ObservedResponses single(1, 1);
    single.add(0, 0, 2);
    Eigen::MatrixXd z1(1, 1);
    z1 << 1.0;
    CHECK(mean_likelihood(z1, single, b) ==
          doctest::Approx(0.73105857863000488).epsilon(1e-15));

    Eigen::MatrixXd z(1, 2);
    z << 1.0, -0.3;
    const double a = label_likelihood(1.0, 2, b);
    const double c = label_likelihood(-0.3, 1, b);
    CHECK(mean_likelihood(z, test, b) ==
          doctest::Approx((a + c) / 2.0).epsilon(1e-15));
}

TEST_CASE("accuracy and likelihood ignore entry order") {
    const QuantizerSpec b;
    Rng rng(3);
    Eigen::MatrixXd z(3, 3);
    std::vector<Response> rows;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            z(i, j) = 4.0 * (2.0 * rng.uniform() - 1.0);
            rows.push_back({i, j, 1 + static_cast<int>(rng.below(2))});
        }
    }
    ObservedResponses forward(3, 3);
    for (const Response& r : rows) {
        forward.add(r.question, r.learner, r.label);
    }
    ObservedResponses backward(3, 3);
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        backward.add(it->question, it->learner, it->label);
    }
    CHECK(accuracy(z, forward, b) == accuracy(z, backward, b));
    CHECK(mean_likelihood(z, forward, b) ==
          doctest::Approx(mean_likelihood(z, backward, b)).epsilon(1e-15));
}

TEST_CASE("auc on hand-checked sets") {
    const QuantizerSpec b;

    ObservedResponses sep(1, 4);
    sep.add(0, 0, 2);
    sep.add(0, 1, 2);
    sep.add(0, 2, 1);
    sep.add(0, 3, 1);
    Eigen::MatrixXd z(1, 4);
    z << 3.0, 2.0, -1.0, -2.0;
    CHECK(auc(z, sep, b) == 1.0);

    z << 1.0, 1.0, 1.0, 1.0;
    CHECK(auc(z, sep, b) == 0.5);

    ObservedResponses three(1, 3);
    three.add(0, 0, 2);
    three.add(0, 1, 1);
    three.add(0, 2, 1);
    Eigen::MatrixXd s(1, 3);
    s << 0.9, 0.4, 0.6;
    CHECK(auc(s, three, b) == 1.0);
}

TEST_CASE("auc rejects unsupported inputs") {
    ObservedResponses test(1, 2);
    test.add(0, 0, 2);
    test.add(0, 1, 1);
    const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 2);
    CHECK_THROWS_AS(auc(z, test, four_label()), std::invalid_argument);

    ObservedResponses single_class(1, 2);
    single_class.add(0, 0, 2);
    single_class.add(0, 1, 2);
    CHECK_THROWS_AS(auc(z, single_class, QuantizerSpec::binary()),
                    std::invalid_argument);
}

TEST_CASE("auc is invariant under the link transform") {
    const QuantizerSpec b;
    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(6));
        ObservedResponses test(1, n);
        Eigen::MatrixXd z(1, n);
        bool has1 = false;
        bool has2 = false;
        for (int j = 0; j < n; ++j) {
            z(0, j) = 3.0 * (2.0 * rng.uniform() - 1.0);
            const int label = 1 + static_cast<int>(rng.below(2));
            has1 |= label == 1;
            has2 |= label == 2;
            test.add(0, j, label);
        }
        if (!has1 || !has2) {
            continue;
        }
        const double raw = auc(z, test, b);
        const double linked = auc(denoised_grades(z), test, b);
        CHECK(raw == doctest::Approx(linked).epsilon(1e-14));
    }
}

TEST_CASE("auc matches pair counting on random sets") {
    const QuantizerSpec b;
    Rng rng(66);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        ObservedResponses test(1, n);
        Eigen::MatrixXd z(1, n);
        std::vector<double> scores;
        std::vector<bool> positive;
        bool has1 = false;
        bool has2 = false;
        for (int j = 0; j < n; ++j) {
            // coarse scores so ties occur often
            z(0, j) = 0.5 * static_cast<double>(rng.below(5));
            const int label = 1 + static_cast<int>(rng.below(2));
            has1 |= label == 1;
            has2 |= label == 2;
            test.add(0, j, label);
            scores.push_back(z(0, j));
            positive.push_back(label == 2);
        }
        if (!has1 || !has2) {
            continue;
        }
        CHECK(auc(z, test, b) ==
              doctest::Approx(oracle::auc_pair_count(scores, positive))
                  .epsilon(1e-14));
    }
}

TEST_CASE("prediction metrics bundle") {
    const QuantizerSpec b;
    ObservedResponses test(1, 2);
    test.add(0, 0, 2);
    test.add(0, 1, 1);
    Eigen::MatrixXd z(1, 2);
    z << 1.0, -1.0;
    const PredictionMetrics m = prediction_metrics(z, test, b);
    CHECK(m.cor == 1.0);
    CHECK(m.lik == doctest::Approx(0.73105857863000488).epsilon(1e-14));
    REQUIRE(m.auc.has_value());
    CHECK(*m.auc == 1.0);

    ObservedResponses one_class(1, 2);
    one_class.add(0, 0, 2);
    one_class.add(0, 1, 2);
    CHECK_FALSE(prediction_metrics(z, one_class, b).auc.has_value());

    ObservedResponses ord(1, 2);
    ord.add(0, 0, 2);
    ord.add(0, 1, 4);
    CHECK_FALSE(prediction_metrics(z, ord, four_label()).auc.has_value());
}
