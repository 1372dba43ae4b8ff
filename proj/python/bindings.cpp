#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "quantmc/analytics.hpp"
#include "quantmc/data_io.hpp"
#include "quantmc/errors.hpp"
#include "quantmc/likelihood.hpp"
#include "quantmc/link.hpp"
#include "quantmc/manifest.hpp"
#include "quantmc/solver.hpp"
#include "quantmc/version.hpp"

namespace py = pybind11;
using namespace quantmc;

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "quantized matrix completion for graded-response analytics";
    m.attr("__version__") = kVersion;

    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<NumericalError>(m, "NumericalError",
                                           PyExc_ArithmeticError);

    py::class_<QuantizerSpec>(m, "QuantizerSpec")
        .def(py::init<>())
        .def(py::init<std::vector<double>>(), py::arg("boundaries"))
        .def_static("from_interior", &QuantizerSpec::from_interior,
                    py::arg("interior"))
        .def_static("binary", &QuantizerSpec::binary,
                    py::arg("threshold") = 0.0)
        .def_property_readonly("num_labels", &QuantizerSpec::num_labels)
        .def_property_readonly("boundaries", &QuantizerSpec::boundaries)
        .def_property_readonly("interior_boundaries",
                               &QuantizerSpec::interior_boundaries)
        .def("lower_edge", &QuantizerSpec::lower_edge, py::arg("label"))
        .def("upper_edge", &QuantizerSpec::upper_edge, py::arg("label"))
        .def("quantize", &QuantizerSpec::quantize, py::arg("x"))
        .def(py::self == py::self);

    py::class_<Response>(m, "Response")
        .def(py::init([](int question, int learner, int label) {
                 return Response{question, learner, label};
             }),
             py::arg("question"), py::arg("learner"), py::arg("label"))
        .def_readonly("question", &Response::question)
        .def_readonly("learner", &Response::learner)
        .def_readonly("label", &Response::label);

    py::class_<ObservedResponses>(m, "ObservedResponses")
        .def(py::init<int, int>(), py::arg("num_questions"),
             py::arg("num_learners"))
        .def("add", &ObservedResponses::add, py::arg("question"),
             py::arg("learner"), py::arg("label"))
        .def_property_readonly("num_questions",
                               &ObservedResponses::num_questions)
        .def_property_readonly("num_learners",
                               &ObservedResponses::num_learners)
        .def("__len__", &ObservedResponses::size)
        .def_property_readonly("entries", &ObservedResponses::entries)
        .def("contains", &ObservedResponses::contains, py::arg("question"),
             py::arg("learner"))
        .def("max_label", &ObservedResponses::max_label)
        .def(py::self == py::self);

    m.def("inverse_logit", &inverse_logit, py::arg("x"));
    m.def("inverse_logit_deriv", &inverse_logit_deriv, py::arg("x"));
    m.def("label_likelihood", &label_likelihood, py::arg("z"),
          py::arg("label"), py::arg("quantizer"));
    m.def("nll", &nll, py::arg("z"), py::arg("responses"),
          py::arg("quantizer"));
    m.def("nll_gradient", &nll_gradient, py::arg("z"), py::arg("responses"),
          py::arg("quantizer"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("lambda_", &SolverConfig::lambda)
        .def_readwrite("max_iterations", &SolverConfig::max_iterations)
        .def_readwrite("tolerance", &SolverConfig::tolerance)
        .def_readwrite("initial_step", &SolverConfig::initial_step)
        .def_readwrite("backtracking_factor",
                       &SolverConfig::backtracking_factor)
        .def_readwrite("restart_on_increase",
                       &SolverConfig::restart_on_increase)
        .def("validate", &SolverConfig::validate);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("z_hat", &FitResult::z_hat)
        .def_readonly("objective_trace", &FitResult::objective_trace)
        .def_readonly("iterations_used", &FitResult::iterations_used)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("effective_rank", &FitResult::effective_rank);

    m.def("project_l1_ball", &project_l1_ball, py::arg("v"),
          py::arg("radius"));
    m.def("project_nuclear_ball", &project_nuclear_ball, py::arg("z"),
          py::arg("radius"));
    m.def("nuclear_norm", &nuclear_norm, py::arg("z"));
    m.def("effective_rank", &effective_rank, py::arg("z"));
    m.def(
        "fit",
        [](const ObservedResponses& obs, const QuantizerSpec& q,
           const SolverConfig& cfg) { return fit(obs, q, cfg); },
        py::arg("responses"), py::arg("quantizer"), py::arg("config"));
    m.def(
        "fit",
        [](const ObservedResponses& obs, const QuantizerSpec& q,
           const SolverConfig& cfg, const Eigen::MatrixXd& initial) {
            return fit(obs, q, cfg, initial);
        },
        py::arg("responses"), py::arg("quantizer"), py::arg("config"),
        py::arg("initial"));

    py::class_<TagMatrix>(m, "TagMatrix")
        .def(py::init([](Eigen::MatrixXd incidence,
                         std::vector<std::string> names) {
                 TagMatrix t{std::move(incidence), std::move(names)};
                 t.validate();
                 return t;
             }),
             py::arg("incidence"), py::arg("tag_names"))
        .def_readonly("incidence", &TagMatrix::incidence)
        .def_readonly("tag_names", &TagMatrix::tag_names)
        .def_property_readonly("num_questions", &TagMatrix::num_questions)
        .def_property_readonly("num_tags", &TagMatrix::num_tags);

    py::class_<TagKnowledge>(m, "TagKnowledge")
        .def_readonly("knowledge", &TagKnowledge::knowledge)
        .def_readonly("tag_names", &TagKnowledge::tag_names)
        .def_readonly("class_average", &TagKnowledge::class_average);

    py::class_<PredictionMetrics>(m, "PredictionMetrics")
        .def_readonly("cor", &PredictionMetrics::cor)
        .def_readonly("lik", &PredictionMetrics::lik)
        .def_readonly("auc", &PredictionMetrics::auc);

    m.def("denoised_grades", &denoised_grades, py::arg("z"));
    m.def("tag_knowledge", &tag_knowledge, py::arg("denoised"),
          py::arg("tags"));
    m.def("predict_label", &predict_label, py::arg("z"),
          py::arg("quantizer"));
    m.def("accuracy", &accuracy, py::arg("z"), py::arg("test"),
          py::arg("quantizer"));
    m.def("mean_likelihood", &mean_likelihood, py::arg("z"), py::arg("test"),
          py::arg("quantizer"));
    m.def("auc", &auc, py::arg("z"), py::arg("test"), py::arg("quantizer"));
    m.def("prediction_metrics", &prediction_metrics, py::arg("z"),
          py::arg("test"), py::arg("quantizer"));

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("responses", &Dataset::responses)
        .def_readonly("quantizer", &Dataset::quantizer)
        .def_readonly("question_ids", &Dataset::question_ids)
        .def_readonly("learner_ids", &Dataset::learner_ids);

    py::class_<SyntheticTruth>(m, "SyntheticTruth")
        .def_readonly("z_true", &SyntheticTruth::z_true)
        .def_readonly("rank", &SyntheticTruth::rank)
        .def_readonly("responses", &SyntheticTruth::responses)
        .def_readonly("observed_fraction", &SyntheticTruth::observed_fraction);

    py::enum_<CVMetric>(m, "CVMetric")
        .value("lik", CVMetric::lik)
        .value("cor", CVMetric::cor);

    py::class_<CVReport>(m, "CVReport")
        .def_readonly("lambda_grid", &CVReport::lambda_grid)
        .def_readonly("mean_lik", &CVReport::mean_lik)
        .def_readonly("mean_cor", &CVReport::mean_cor)
        .def_readonly("best_lambda", &CVReport::best_lambda)
        .def_readonly("folds", &CVReport::folds)
        .def_readonly("metric", &CVReport::metric);

    m.def("load_responses", &load_responses, py::arg("path"),
          py::arg("quantizer"));
    m.def("save_responses", &save_responses, py::arg("path"),
          py::arg("responses"),
          py::arg("question_ids") = std::vector<std::string>{},
          py::arg("learner_ids") = std::vector<std::string>{});
    m.def("load_tags", &load_tags, py::arg("path"), py::arg("question_ids"));
    m.def("load_quantizer", &load_quantizer, py::arg("path"));
    m.def("save_quantizer", &save_quantizer, py::arg("path"),
          py::arg("quantizer"));
    m.def("load_matrix_csv", &load_matrix_csv, py::arg("path"));
    m.def("save_matrix_csv", &save_matrix_csv, py::arg("path"),
          py::arg("matrix"));
    m.def("synthesize", &synthesize, py::arg("num_questions"),
          py::arg("num_learners"), py::arg("rank"), py::arg("quantizer"),
          py::arg("observed_fraction"), py::arg("scale"), py::arg("seed"));
    m.def("holdout_split", &holdout_split, py::arg("responses"),
          py::arg("fraction"), py::arg("seed"));
    m.def("make_folds", &make_folds, py::arg("n"), py::arg("folds"),
          py::arg("seed"));
    m.def("default_lambda_grid", &default_lambda_grid,
          py::arg("num_questions"), py::arg("num_learners"),
          py::arg("points") = 10);
    m.def("cross_validate_lambda", &cross_validate_lambda,
          py::arg("responses"), py::arg("quantizer"), py::arg("lambda_grid"),
          py::arg("folds"), py::arg("seed"),
          py::arg("base") = SolverConfig{},
          py::arg("metric") = CVMetric::lik);

    m.def("sha256_file", &sha256_file, py::arg("path"));
}
