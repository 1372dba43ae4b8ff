#include "quantmc/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "quantmc/rng.hpp"

namespace quantmc {

namespace {

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line_no,
                             const std::string& what) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                     what);
}

long parse_long(const std::string& s, bool& ok) {
    ok = false;
    if (s.empty()) {
        return 0;
    }
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        return 0;
    }
    ok = pos == s.size();
    return v;
}

double parse_double(const std::string& s, bool& ok) {
    ok = false;
    if (s.empty()) {
        return 0.0;
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        return 0.0;
    }
    ok = pos == s.size();
    return v;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int index_of(std::unordered_map<std::string, int>& map,
             std::vector<std::string>& order, const std::string& id) {
    const auto [it, inserted] =
        map.emplace(id, static_cast<int>(order.size()));
    if (inserted) {
        order.push_back(id);
    }
    return it->second;
}

ObservedResponses rebuild(const ObservedResponses& source,
                          const std::vector<Response>& entries) {
    ObservedResponses out(source.num_questions(), source.num_learners());
    for (const Response& r : entries) {
        out.add(r.question, r.learner, r.label);
    }
    return out;
}

}  // namespace

Dataset load_responses(const std::filesystem::path& path,
                       const QuantizerSpec& q) {
    std::ifstream in = open_for_read(path);
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) {
        parse_fail(path, 1, "empty file");
    }
    ++line_no;
    strip_cr(line);
    if (line != "learner_id,question_id,grade") {
        parse_fail(path, line_no,
                   "expected header 'learner_id,question_id,grade'");
    }

    std::unordered_map<std::string, int> q_index;
    std::unordered_map<std::string, int> l_index;
    Dataset ds;
    ds.quantizer = q;
    struct Row {
        int question;
        int learner;
        int label;
        int line_no;
    };
    std::vector<Row> rows;

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 3) {
            parse_fail(path, line_no, "expected 3 fields, got " +
                                          std::to_string(fields.size()));
        }
        if (fields[0].empty() || fields[1].empty()) {
            parse_fail(path, line_no, "empty id field");
        }
        bool ok = false;
        const long grade = parse_long(fields[2], ok);
        if (!ok) {
            parse_fail(path, line_no, "grade '" + fields[2] +
                                          "' is not an integer");
        }
        if (grade < 1 || grade > q.num_labels()) {
            parse_fail(path, line_no,
                       "grade " + std::to_string(grade) +
                           " outside 1.." + std::to_string(q.num_labels()));
        }
        const int li = index_of(l_index, ds.learner_ids, fields[0]);
        const int qi = index_of(q_index, ds.question_ids, fields[1]);
        rows.push_back({qi, li, static_cast<int>(grade), line_no});
    }
    if (rows.empty()) {
        parse_fail(path, line_no, "no response rows");
    }

    ObservedResponses obs(static_cast<int>(ds.question_ids.size()),
                          static_cast<int>(ds.learner_ids.size()));
    for (const Row& r : rows) {
        if (obs.contains(r.question, r.learner)) {
            parse_fail(path, r.line_no,
                       "duplicate response for learner '" +
                           ds.learner_ids[r.learner] + "', question '" +
                           ds.question_ids[r.question] + "'");
        }
        obs.add(r.question, r.learner, r.label);
    }
    ds.responses = std::move(obs);
    return ds;
}

void save_responses(const std::filesystem::path& path,
                    const ObservedResponses& obs,
                    const std::vector<std::string>& question_ids,
                    const std::vector<std::string>& learner_ids) {
    std::vector<std::string> qids = question_ids;
    std::vector<std::string> lids = learner_ids;
    if (qids.empty()) {
        for (int i = 0; i < obs.num_questions(); ++i) {
            qids.push_back("q" + std::to_string(i + 1));
        }
    }
    if (lids.empty()) {
        for (int j = 0; j < obs.num_learners(); ++j) {
            lids.push_back("l" + std::to_string(j + 1));
        }
    }
    if (qids.size() != static_cast<std::size_t>(obs.num_questions()) ||
        lids.size() != static_cast<std::size_t>(obs.num_learners())) {
        throw std::invalid_argument("save_responses: id count mismatch");
    }
    std::ofstream out = open_for_write(path);
    out << "learner_id,question_id,grade\n";
    for (const Response& r : obs.entries()) {
        out << lids[r.learner] << ',' << qids[r.question] << ',' << r.label
            << '\n';
    }
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

TagMatrix load_tags(const std::filesystem::path& path,
                    const std::vector<std::string>& question_ids) {
    std::unordered_map<std::string, int> q_index;
    for (std::size_t i = 0; i < question_ids.size(); ++i) {
        q_index.emplace(question_ids[i], static_cast<int>(i));
    }

    std::ifstream in = open_for_read(path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) {
        parse_fail(path, 1, "empty file");
    }
    ++line_no;
    strip_cr(line);
    if (line != "question_id,tag") {
        parse_fail(path, line_no, "expected header 'question_id,tag'");
    }

    std::unordered_map<std::string, int> tag_index;
    std::vector<std::string> tag_names;
    std::vector<std::pair<int, int>> pairs;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 2) {
            parse_fail(path, line_no, "expected 2 fields, got " +
                                          std::to_string(fields.size()));
        }
        if (fields[0].empty() || fields[1].empty()) {
            parse_fail(path, line_no, "empty field");
        }
        const auto qi = q_index.find(fields[0]);
        if (qi == q_index.end()) {
            parse_fail(path, line_no,
                       "unknown question id '" + fields[0] + "'");
        }
        const int ti = index_of(tag_index, tag_names, fields[1]);
        pairs.emplace_back(qi->second, ti);
    }
    if (pairs.empty()) {
        parse_fail(path, line_no, "no tag rows");
    }

    TagMatrix tags;
    tags.incidence = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(question_ids.size()),
        static_cast<Eigen::Index>(tag_names.size()));
    for (const auto& [qi, ti] : pairs) {
        tags.incidence(qi, ti) = 1.0;
    }
    tags.tag_names = std::move(tag_names);
    tags.validate();
    return tags;
}

QuantizerSpec load_quantizer(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("num_labels") ||
        !j.contains("interior_boundaries")) {
        throw ParseError(path.string() +
                         ": expected keys num_labels and interior_boundaries");
    }
    int p = 0;
    std::vector<double> interior;
    try {
        p = j.at("num_labels").get<int>();
        interior = j.at("interior_boundaries").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (static_cast<std::size_t>(p) != interior.size() + 1) {
        throw ParseError(path.string() +
                         ": num_labels must equal interior count + 1");
    }
    try {
        return QuantizerSpec::from_interior(interior);
    } catch (const std::invalid_argument& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_quantizer(const std::filesystem::path& path,
                    const QuantizerSpec& q) {
    nlohmann::json j;
    j["num_labels"] = q.num_labels();
    j["interior_boundaries"] = q.interior_boundaries();
    std::ofstream out = open_for_write(path);
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    std::string line;
    std::vector<std::vector<double>> rows;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            bool ok = false;
            const double v = parse_double(f, ok);
            if (!ok) {
                parse_fail(path, line_no, "'" + f + "' is not a number");
            }
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            parse_fail(path, line_no, "ragged row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        parse_fail(path, 1, "empty matrix");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
        }
    }
    return m;
}

void save_matrix_csv(const std::filesystem::path& path,
                     const Eigen::MatrixXd& m) {
    std::ofstream out = open_for_write(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_value(m(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

SyntheticTruth synthesize(int num_questions, int num_learners, int rank,
                          const QuantizerSpec& q, double observed_fraction,
                          double scale, std::uint64_t seed) {
    if (num_questions < 1 || num_learners < 1) {
        throw std::invalid_argument("synthesize: dimensions must be positive");
    }
    if (rank < 1 || rank > std::min(num_questions, num_learners)) {
        throw std::invalid_argument(
            "synthesize: rank must lie in 1..min(Q,N)");
    }
    if (!(observed_fraction > 0.0) || observed_fraction > 1.0) {
        throw std::invalid_argument(
            "synthesize: observed_fraction must lie in (0,1]");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("synthesize: scale must be positive");
    }

    Rng rng(seed);
    Eigen::MatrixXd gq(num_questions, rank);
    for (int i = 0; i < num_questions; ++i) {
        for (int k = 0; k < rank; ++k) {
            gq(i, k) = rng.normal();
        }
    }
    Eigen::MatrixXd gn(num_learners, rank);
    for (int j = 0; j < num_learners; ++j) {
        for (int k = 0; k < rank; ++k) {
            gn(j, k) = rng.normal();
        }
    }

    SyntheticTruth truth;
    truth.z_true = (scale / std::sqrt(static_cast<double>(rank))) * gq *
                   gn.transpose();
    truth.rank = rank;
    truth.observed_fraction = observed_fraction;

    ObservedResponses obs(num_questions, num_learners);
    for (int i = 0; i < num_questions; ++i) {
        for (int j = 0; j < num_learners; ++j) {
            if (!rng.bernoulli(observed_fraction)) {
                continue;
            }
            const double noisy = truth.z_true(i, j) + rng.logistic();
            obs.add(i, j, q.quantize(noisy));
        }
    }
    truth.responses = std::move(obs);
    return truth;
}

std::pair<ObservedResponses, ObservedResponses> holdout_split(
    const ObservedResponses& responses, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument(
            "holdout_split: fraction must lie in (0,1)");
    }
    const std::size_t n = responses.size();
    const auto n_test = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(n)));
    if (n_test == 0 || n_test == n) {
        throw std::invalid_argument(
            "holdout_split: split leaves one side empty");
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<bool> in_test(n, false);
    for (std::size_t i = 0; i < n_test; ++i) {
        in_test[order[i]] = true;
    }
    std::vector<Response> train_rows;
    std::vector<Response> test_rows;
    const auto& entries = responses.entries();
    for (std::size_t i = 0; i < n; ++i) {
        (in_test[i] ? test_rows : train_rows).push_back(entries[i]);
    }
    return {rebuild(responses, train_rows), rebuild(responses, test_rows)};
}

std::vector<int> make_folds(std::size_t n, int folds, std::uint64_t seed) {
    if (folds < 2) {
        throw std::invalid_argument("make_folds: need at least 2 folds");
    }
    if (n < static_cast<std::size_t>(folds)) {
        throw std::invalid_argument("make_folds: fewer entries than folds");
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> fold_of(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return fold_of;
}

std::vector<double> default_lambda_grid(int num_questions, int num_learners,
                                        int points) {
    if (num_questions < 1 || num_learners < 1) {
        throw std::invalid_argument(
            "lambda_grid: dimensions must be positive");
    }
    if (points < 2) {
        throw std::invalid_argument("lambda_grid: need at least 2 points");
    }
    const double anchor = std::sqrt(static_cast<double>(num_questions) *
                                    static_cast<double>(num_learners));
    const double lo = 0.1 * anchor;
    const double hi = 100.0 * anchor;
    const double ratio = hi / lo;
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = lo * std::pow(ratio, static_cast<double>(i) /
                                           static_cast<double>(points - 1));
    }
    return grid;
}

CVReport cross_validate_lambda(const ObservedResponses& responses,
                               const QuantizerSpec& q,
                               const std::vector<double>& lambda_grid,
                               int folds, std::uint64_t seed,
                               const SolverConfig& base, CVMetric metric) {
    if (lambda_grid.empty()) {
        throw std::invalid_argument("cross_validate: empty lambda grid");
    }
    for (double l : lambda_grid) {
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw std::invalid_argument(
                "cross_validate: lambdas must be positive");
        }
    }

    const std::vector<int> fold_of =
        make_folds(responses.size(), folds, seed);
    const auto& entries = responses.entries();

    std::vector<ObservedResponses> train_parts;
    std::vector<ObservedResponses> val_parts;
    train_parts.reserve(static_cast<std::size_t>(folds));
    val_parts.reserve(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::vector<Response> train_rows;
        std::vector<Response> val_rows;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            (fold_of[i] == f ? val_rows : train_rows).push_back(entries[i]);
        }
        if (train_rows.empty() || val_rows.empty()) {
            throw std::invalid_argument("cross_validate: empty fold");
        }
        train_parts.push_back(rebuild(responses, train_rows));
        val_parts.push_back(rebuild(responses, val_rows));
    }

    CVReport report;
    report.lambda_grid = lambda_grid;
    report.folds = folds;
    report.metric = metric;
    report.mean_lik.resize(lambda_grid.size(), 0.0);
    report.mean_cor.resize(lambda_grid.size(), 0.0);

    for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
        double sum_lik = 0.0;
        double sum_cor = 0.0;
        for (int f = 0; f < folds; ++f) {
            SolverConfig cfg = base;
            cfg.lambda = lambda_grid[g];
            const FitResult fr = fit(train_parts[f], q, cfg);
            sum_lik += mean_likelihood(fr.z_hat, val_parts[f], q);
            sum_cor += accuracy(fr.z_hat, val_parts[f], q);
        }
        report.mean_lik[g] = sum_lik / folds;
        report.mean_cor[g] = sum_cor / folds;
    }

    const std::vector<double>& scores =
        metric == CVMetric::lik ? report.mean_lik : report.mean_cor;
    std::size_t best = 0;
    for (std::size_t g = 1; g < scores.size(); ++g) {
        if (scores[g] > scores[best] ||
            (scores[g] == scores[best] && lambda_grid[g] < lambda_grid[best])) {
            best = g;
        }
    }
    report.best_lambda = lambda_grid[best];
    return report;
}

}  // namespace quantmc
