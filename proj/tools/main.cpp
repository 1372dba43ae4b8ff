#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quantmc/analytics.hpp"
#include "quantmc/data_io.hpp"
#include "quantmc/errors.hpp"
#include "quantmc/manifest.hpp"
#include "quantmc/solver.hpp"
#include "quantmc/version.hpp"

namespace fs = std::filesystem;
using namespace quantmc;

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
    write_text(dir / "manifest.json", m.to_json());
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string());
    }
    return dir;
}

QuantizerSpec quantizer_from_flags(int labels,
                                   const std::vector<double>& boundaries) {
    if (!boundaries.empty()) {
        return QuantizerSpec::from_interior(boundaries);
    }
    if (labels < 2) {
        throw std::invalid_argument("--labels must be at least 2");
    }
    // evenly spaced integer boundaries centered on zero
    std::vector<double> interior;
    for (int p = 1; p < labels; ++p) {
        interior.push_back(static_cast<double>(p) -
                           static_cast<double>(labels) / 2.0);
    }
    return QuantizerSpec::from_interior(interior);
}

struct FitFlags {
    std::string responses_path;
    std::string quantizer_path;
    double lambda = 0.0;
    bool use_cv = false;
    int cv_folds = 5;
    int cv_points = 10;
    std::string cv_metric = "lik";
    std::uint64_t seed = 0;
    int max_iters = 1000;
    double tol = 1e-6;
    double initial_step = 4.0;
    double backtrack = 0.5;
    bool no_restart = false;
    std::string out = ".";
};

void add_solver_flags(CLI::App* cmd, FitFlags& f) {
    cmd->add_option("--responses", f.responses_path, "responses CSV")
        ->required();
    cmd->add_option("--quantizer", f.quantizer_path, "quantizer JSON")
        ->required();
    auto* lam = cmd->add_option("--lambda", f.lambda,
                                "nuclear-norm ball radius");
    auto* cv = cmd->add_flag("--cv", f.use_cv,
                             "choose lambda by cross-validation");
    lam->excludes(cv);
    cv->excludes(lam);
    cmd->add_option("--cv-folds", f.cv_folds, "cross-validation folds")
        ->default_val(5);
    cmd->add_option("--cv-points", f.cv_points, "lambda grid size")
        ->default_val(10);
    cmd->add_option("--cv-metric", f.cv_metric, "selection metric")
        ->check(CLI::IsMember({"lik", "cor"}))
        ->default_val("lik");
    cmd->add_option("--seed", f.seed, "random seed")->default_val(0);
    cmd->add_option("--max-iters", f.max_iters, "iteration cap")
        ->default_val(1000);
    cmd->add_option("--tol", f.tol, "relative objective tolerance")
        ->default_val(1e-6);
    cmd->add_option("--initial-step", f.initial_step, "first step size")
        ->default_val(4.0);
    cmd->add_option("--backtrack", f.backtrack, "line-search shrink factor")
        ->default_val(0.5);
    cmd->add_flag("--no-restart", f.no_restart,
                  "disable momentum restart on objective increase");
    cmd->add_option("--out", f.out, "output directory")->default_val(".");
}

SolverConfig solver_config(const FitFlags& f, double lambda) {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.max_iterations = f.max_iters;
    cfg.tolerance = f.tol;
    cfg.initial_step = f.initial_step;
    cfg.backtracking_factor = f.backtrack;
    cfg.restart_on_increase = !f.no_restart;
    cfg.validate();
    return cfg;
}

void require_lambda_choice(const FitFlags& f) {
    if (!f.use_cv && f.lambda == 0.0) {
        throw std::invalid_argument("pass either --lambda or --cv");
    }
    if (!f.use_cv && !(f.lambda > 0.0)) {
        throw std::invalid_argument("--lambda must be positive");
    }
}

std::map<std::string, std::string> solver_flag_map(const FitFlags& f) {
    return {
        {"lambda", f.use_cv ? std::string("cv") : fmt("%.17g", f.lambda)},
        {"cv_folds", std::to_string(f.cv_folds)},
        {"cv_points", std::to_string(f.cv_points)},
        {"cv_metric", f.cv_metric},
        {"max_iterations", std::to_string(f.max_iters)},
        {"tolerance", fmt("%.17g", f.tol)},
        {"initial_step", fmt("%.17g", f.initial_step)},
        {"backtracking_factor", fmt("%.17g", f.backtrack)},
        {"restart_on_increase", f.no_restart ? "false" : "true"},
    };
}

void write_cv_report(const fs::path& path, const CVReport& r) {
    std::string text = "lambda,mean_lik,mean_cor\n";
    for (std::size_t g = 0; g < r.lambda_grid.size(); ++g) {
        text += fmt("%.17g", r.lambda_grid[g]);
        text += ',' + fmt("%.17g", r.mean_lik[g]);
        text += ',' + fmt("%.17g", r.mean_cor[g]);
        text += '\n';
    }
    write_text(path, text);
}

int cmd_synth(int questions, int learners, int rank, int labels,
              const std::vector<double>& boundaries, double observed,
              double scale, std::uint64_t seed, const std::string& out) {
    const QuantizerSpec q = quantizer_from_flags(labels, boundaries);
    const SyntheticTruth truth =
        synthesize(questions, learners, rank, q, observed, scale, seed);
    const fs::path dir = ensure_out_dir(out);

    save_responses(dir / "responses.csv", truth.responses);
    save_quantizer(dir / "quantizer.json", q);
    save_matrix_csv(dir / "z_true.csv", truth.z_true);

    RunManifest m;
    m.command = "synth";
    m.seed = seed;
    m.version = kVersion;
    m.config = {
        {"questions", std::to_string(questions)},
        {"learners", std::to_string(learners)},
        {"rank", std::to_string(rank)},
        {"labels", std::to_string(q.num_labels())},
        {"observed", fmt("%.17g", observed)},
        {"scale", fmt("%.17g", scale)},
    };
    write_manifest(dir, m);

    std::cout << "wrote " << truth.responses.size() << " responses for "
              << questions << " questions x " << learners << " learners to "
              << dir.string() << "\n";
    return 0;
}

int cmd_fit(const FitFlags& f) {
    require_lambda_choice(f);
    const QuantizerSpec q = load_quantizer(f.quantizer_path);
    const Dataset ds = load_responses(f.responses_path, q);
    const fs::path dir = ensure_out_dir(f.out);

    double lambda = f.lambda;
    std::optional<CVReport> cv;
    if (f.use_cv) {
        const auto grid = default_lambda_grid(ds.responses.num_questions(),
                                              ds.responses.num_learners(),
                                              f.cv_points);
        const CVMetric metric =
            f.cv_metric == "cor" ? CVMetric::cor : CVMetric::lik;
        cv = cross_validate_lambda(ds.responses, q, grid, f.cv_folds, f.seed,
                                   {}, metric);
        lambda = cv->best_lambda;
        std::cout << "cross-validation picked lambda = "
                  << fmt("%.6g", lambda) << "\n";
    }

    const FitResult fr = fit(ds.responses, q, solver_config(f, lambda));

    save_matrix_csv(dir / "zhat.csv", fr.z_hat);
    std::string trace = "iteration,objective\n";
    for (std::size_t i = 0; i < fr.objective_trace.size(); ++i) {
        trace += std::to_string(i) + ',' +
                 fmt("%.17g", fr.objective_trace[i]) + '\n';
    }
    write_text(dir / "trace.csv", trace);
    if (cv) {
        write_cv_report(dir / "cv_report.csv", *cv);
    }

    RunManifest m;
    m.command = "fit";
    m.seed = f.seed;
    m.version = kVersion;
    m.config = solver_flag_map(f);
    m.config["lambda_used"] = fmt("%.17g", lambda);
    m.input_digests = {
        {"responses", sha256_file(f.responses_path)},
        {"quantizer", sha256_file(f.quantizer_path)},
    };
    write_manifest(dir, m);

    std::cout << "effective rank: " << fr.effective_rank << "\n"
              << "final objective: "
              << fmt("%.8g", fr.objective_trace.back()) << "\n"
              << (fr.converged ? "converged" : "iteration cap reached")
              << " after " << fr.iterations_used << " iterations\n";
    return 0;
}

int cmd_eval(const FitFlags& f, int trials, double test_fraction,
             bool want_auc) {
    require_lambda_choice(f);
    if (trials < 1) {
        throw std::invalid_argument("--trials must be at least 1");
    }
    const QuantizerSpec q = load_quantizer(f.quantizer_path);
    const Dataset ds = load_responses(f.responses_path, q);
    const bool binary = q.num_labels() == 2;
    if (want_auc && !binary) {
        throw std::invalid_argument(
            "--auc needs a binary quantizer; this dataset has " +
            std::to_string(q.num_labels()) + " labels");
    }
    const bool report_auc = binary;
    const fs::path dir = ensure_out_dir(f.out);

    double lambda = f.lambda;
    std::optional<CVReport> cv;

    double sum_cor = 0.0;
    double sum_lik = 0.0;
    double sum_auc = 0.0;
    int auc_trials = 0;
    double sum_base_cor = 0.0;
    double sum_base_lik = 0.0;

    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = f.seed + static_cast<std::uint64_t>(t);
        const auto [train, test] =
            holdout_split(ds.responses, test_fraction, trial_seed);

        if (f.use_cv && !cv) {
            // one CV pass on the first trial's training split; the grid
            // winner is reused for the remaining trials
            const auto grid = default_lambda_grid(train.num_questions(),
                                                  train.num_learners(),
                                                  f.cv_points);
            const CVMetric metric =
                f.cv_metric == "cor" ? CVMetric::cor : CVMetric::lik;
            cv = cross_validate_lambda(train, q, grid, f.cv_folds, trial_seed,
                                       {}, metric);
            lambda = cv->best_lambda;
            std::cout << "cross-validation picked lambda = "
                      << fmt("%.6g", lambda) << "\n";
        }

        const FitResult fr = fit(train, q, solver_config(f, lambda));
        const PredictionMetrics pm = prediction_metrics(fr.z_hat, test, q);
        sum_cor += pm.cor;
        sum_lik += pm.lik;
        if (pm.auc) {
            sum_auc += *pm.auc;
            ++auc_trials;
        }

        // baselines scored on the same split: majority training label as a
        // constant prediction, and its likelihood as a constant predictor
        std::vector<std::int64_t> counts(
            static_cast<std::size_t>(q.num_labels()) + 1, 0);
        for (const Response& r : train.entries()) {
            ++counts[static_cast<std::size_t>(r.label)];
        }
        int majority = 1;
        for (int p = 2; p <= q.num_labels(); ++p) {
            if (counts[static_cast<std::size_t>(p)] >
                counts[static_cast<std::size_t>(majority)]) {
                majority = p;
            }
        }
        std::int64_t base_hits = 0;
        double base_lik = 0.0;
        const double total_train = static_cast<double>(train.size());
        for (const Response& r : test.entries()) {
            if (r.label == majority) {
                ++base_hits;
            }
            base_lik += static_cast<double>(
                            counts[static_cast<std::size_t>(r.label)]) /
                        total_train;
        }
        sum_base_cor +=
            static_cast<double>(base_hits) / static_cast<double>(test.size());
        sum_base_lik += base_lik / static_cast<double>(test.size());
    }

    const double n = static_cast<double>(trials);
    const double mean_cor = sum_cor / n;
    const double mean_lik = sum_lik / n;
    const double mean_base_cor = sum_base_cor / n;
    const double mean_base_lik = sum_base_lik / n;

    std::string table = "metric,mean,baseline\n";
    table += "COR," + fmt("%.4f", mean_cor) + ',' +
             fmt("%.4f", mean_base_cor) + '\n';
    table += "LIK," + fmt("%.4f", mean_lik) + ',' +
             fmt("%.4f", mean_base_lik) + '\n';
    if (report_auc && auc_trials > 0) {
        table += "AUC," + fmt("%.4f", sum_auc / auc_trials) + ",0.5000\n";
    }
    std::cout << table;
    write_text(dir / "metrics.csv", table);

    RunManifest m;
    m.command = "eval";
    m.seed = f.seed;
    m.version = kVersion;
    m.config = solver_flag_map(f);
    m.config["trials"] = std::to_string(trials);
    m.config["test_fraction"] = fmt("%.17g", test_fraction);
    if (cv) {
        m.config["lambda_used"] = fmt("%.17g", lambda);
    }
    m.input_digests = {
        {"responses", sha256_file(f.responses_path)},
        {"quantizer", sha256_file(f.quantizer_path)},
    };
    write_manifest(dir, m);
    return 0;
}

int cmd_analytics(const std::string& responses_path,
                  const std::string& quantizer_path,
                  const std::string& zhat_path, const std::string& tags_path,
                  const std::string& out) {
    const QuantizerSpec q = load_quantizer(quantizer_path);
    const Dataset ds = load_responses(responses_path, q);
    const Eigen::MatrixXd z = load_matrix_csv(zhat_path);
    if (z.rows() != ds.responses.num_questions() ||
        z.cols() != ds.responses.num_learners()) {
        throw std::invalid_argument(
            "zhat dimensions disagree with the responses file");
    }
    const TagMatrix tags = load_tags(tags_path, ds.question_ids);
    const fs::path dir = ensure_out_dir(out);

    const Eigen::MatrixXd a = denoised_grades(z);
    const TagKnowledge tk = tag_knowledge(a, tags);

    // learners ranked by their overall denoised-grade mean
    const Eigen::VectorXd learner_mean = a.colwise().mean();
    Eigen::Index best = 0;
    Eigen::Index worst = 0;
    for (Eigen::Index j = 1; j < learner_mean.size(); ++j) {
        if (learner_mean[j] > learner_mean[best]) {
            best = j;
        }
        if (learner_mean[j] < learner_mean[worst]) {
            worst = j;
        }
    }
    const double class_mean = learner_mean.mean();
    Eigen::Index average = 0;
    for (Eigen::Index j = 1; j < learner_mean.size(); ++j) {
        if (std::abs(learner_mean[j] - class_mean) <
            std::abs(learner_mean[average] - class_mean)) {
            average = j;
        }
    }

    const auto pct = [](double v) {
        return std::to_string(std::llround(100.0 * v)) + "%";
    };
    const auto row = [&](const std::string& name,
                         const Eigen::RowVectorXd& vals) {
        std::string line = name;
        for (Eigen::Index m = 0; m < vals.size(); ++m) {
            line += ',' + pct(vals[m]);
        }
        return line + '\n';
    };

    std::string table = "learner";
    for (const std::string& t : tk.tag_names) {
        table += ',' + t;
    }
    table += '\n';
    table += row("Class average", tk.class_average.transpose());
    table += row("Best learner", tk.knowledge.row(best));
    table += row("Average learner", tk.knowledge.row(average));
    table += row("Worst learner", tk.knowledge.row(worst));
    std::cout << table;
    write_text(dir / "analytics_report.csv", table);
    save_matrix_csv(dir / "b_matrix.csv", tk.knowledge);

    RunManifest m;
    m.command = "analytics";
    m.version = kVersion;
    m.config = {
        {"best_learner", ds.learner_ids[static_cast<std::size_t>(best)]},
        {"average_learner", ds.learner_ids[static_cast<std::size_t>(average)]},
        {"worst_learner", ds.learner_ids[static_cast<std::size_t>(worst)]},
    };
    m.input_digests = {
        {"responses", sha256_file(responses_path)},
        {"quantizer", sha256_file(quantizer_path)},
        {"zhat", sha256_file(zhat_path)},
        {"tags", sha256_file(tags_path)},
    };
    write_manifest(dir, m);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "quantized matrix completion for graded-response analytics"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // synth
    int questions = 0;
    int learners = 0;
    int rank = 0;
    int labels = 2;
    std::vector<double> boundaries;
    double observed = 1.0;
    double scale = 1.0;
    std::uint64_t synth_seed = 0;
    std::string synth_out = ".";
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--questions", questions, "question count")->required();
    synth->add_option("--learners", learners, "learner count")->required();
    synth->add_option("--rank", rank, "ground-truth rank")->required();
    synth->add_option("--labels", labels, "ordinal label count")
        ->default_val(2);
    synth->add_option("--boundaries", boundaries,
                      "interior quantizer boundaries (overrides --labels)")
        ->delimiter(',');
    synth->add_option("--observed", observed, "observation probability")
        ->default_val(1.0);
    synth->add_option("--scale", scale, "ground-truth magnitude")
        ->default_val(1.0);
    synth->add_option("--seed", synth_seed, "random seed")->default_val(0);
    synth->add_option("--out", synth_out, "output directory")
        ->default_val(".");

    // fit
    FitFlags fit_flags;
    auto* fitcmd =
        app.add_subcommand("fit", "recover Z from observed responses");
    add_solver_flags(fitcmd, fit_flags);

    // eval
    FitFlags eval_flags;
    int trials = 25;
    double test_fraction = 0.2;
    bool want_auc = false;
    auto* evalcmd = app.add_subcommand(
        "eval", "hold-out prediction quality over repeated trials");
    add_solver_flags(evalcmd, eval_flags);
    evalcmd->add_option("--trials", trials, "Monte-Carlo repetitions")
        ->default_val(25);
    evalcmd
        ->add_option("--test-fraction", test_fraction,
                     "held-out fraction per trial")
        ->default_val(0.2);
    evalcmd->add_flag("--auc", want_auc,
                      "insist on the AUC column (binary data only)");

    // analytics
    std::string an_responses;
    std::string an_quantizer;
    std::string an_zhat;
    std::string an_tags;
    std::string an_out = ".";
    auto* ancmd =
        app.add_subcommand("analytics", "tag knowledge report from a fit");
    ancmd->add_option("--responses", an_responses, "responses CSV")
        ->required();
    ancmd->add_option("--quantizer", an_quantizer, "quantizer JSON")
        ->required();
    ancmd->add_option("--zhat", an_zhat, "recovered matrix CSV")->required();
    ancmd->add_option("--tags", an_tags, "question-tag CSV")->required();
    ancmd->add_option("--out", an_out, "output directory")->default_val(".");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) {
            return cmd_synth(questions, learners, rank, labels, boundaries,
                             observed, scale, synth_seed, synth_out);
        }
        if (fitcmd->parsed()) {
            return cmd_fit(fit_flags);
        }
        if (evalcmd->parsed()) {
            return cmd_eval(eval_flags, trials, test_fraction, want_auc);
        }
        if (ancmd->parsed()) {
            return cmd_analytics(an_responses, an_quantizer, an_zhat, an_tags,
                                 an_out);
        }
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
