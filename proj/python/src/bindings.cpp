#include "karnet/baseline_gd.hpp"
#include "karnet/data.hpp"
#include "karnet/errors.hpp"
#include "karnet/experiment.hpp"
#include "karnet/kar_trainer.hpp"
#include "karnet/linalg.hpp"
#include "karnet/metrics.hpp"
#include "karnet/network.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace karnet;

namespace {

NetworkSpec make_spec(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t output_dim,
                      std::uint64_t seed, bool fan_in_init, double clamp_epsilon) {
    NetworkSpec spec;
    spec.input_dim = input_dim;
    spec.hidden = std::move(hidden);
    spec.output_dim = output_dim;
    spec.seed = seed;
    spec.clamp_epsilon = clamp_epsilon;
    if (fan_in_init)
        spec.init = WeightInit::fan_in();
    spec.validate();
    return spec;
}

py::dict report_dict(const TrainReport& r) {
    py::module_ json = py::module_::import("json");
    return json.attr("loads")(to_json(r).dump());
}

} // namespace

PYBIND11_MODULE(_karnet, m) {
    m.doc() = "Gradient-free training of feedforward networks by pseudoinverse solves";

    auto base = py::register_exception<Error>(m, "KarnetError", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError", numerical.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());

    m.def(
        "pinv",
        [](const Matrix& a, std::optional<double> rcond) {
            PinvResult r = pinv(a, rcond);
            return py::make_tuple(r.pinv, r.rank, r.tolerance);
        },
        py::arg("a"), py::arg("rcond") = py::none(),
        "Moore-Penrose pseudoinverse; returns (pinv, rank, cutoff).");
    m.def("solve_least_squares", &solve_least_squares, py::arg("a"), py::arg("b"),
          py::arg("rcond") = py::none());

    m.def("logit", [](const Matrix& x, double eps) { return ActivationPair::logit_sigmoid(eps).apply_f(x); },
          py::arg("x"), py::arg("eps") = ActivationPair::default_epsilon);
    m.def("sigmoid", [](const Matrix& y, double eps) { return ActivationPair::logit_sigmoid(eps).apply_phi(y); },
          py::arg("y"), py::arg("eps") = ActivationPair::default_epsilon);

    py::class_<Network>(m, "Network")
        .def("forward", &Network::forward, py::arg("x"))
        .def("forward_layers", &Network::forward_layers, py::arg("x"))
        .def_property_readonly("weights", &Network::weights)
        .def_property_readonly("hidden", [](const Network& n) { return n.spec().hidden; })
        .def_property_readonly("input_dim", [](const Network& n) { return n.spec().input_dim; })
        .def_property_readonly("output_dim", [](const Network& n) { return n.spec().output_dim; })
        .def_property_readonly("seed", [](const Network& n) { return n.spec().seed; })
        .def("parameter_count", &Network::parameter_count)
        .def("to_json", [](const Network& n) { return to_json(n).dump(); })
        .def_static("from_json", [](const std::string& s) { return network_from_json(nlohmann::json::parse(s)); });

    m.def(
        "random_network",
        [](std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t output_dim, std::uint64_t seed,
           bool fan_in_init) { return random_init(make_spec(input_dim, std::move(hidden), output_dim, seed, fan_in_init,
                                                            ActivationPair::default_epsilon)); },
        py::arg("input_dim"), py::arg("hidden"), py::arg("output_dim"), py::arg("seed") = 0,
        py::arg("fan_in_init") = false);

    m.def(
        "train_kar",
        [](const Matrix& x, const Matrix& y, std::vector<std::size_t> hidden, std::uint64_t seed,
           const std::string& hidden_weights, bool fan_in_init, std::optional<double> rcond) {
            KarConfig cfg;
            cfg.spec = make_spec(static_cast<std::size_t>(x.cols()), std::move(hidden),
                                 static_cast<std::size_t>(y.cols()), seed, fan_in_init,
                                 ActivationPair::default_epsilon);
            cfg.hidden = hidden_weights_from_string(hidden_weights);
            cfg.rcond = rcond;
            TrainResult r = train_kar(x, y, cfg);
            return py::make_tuple(r.network, report_dict(r.report));
        },
        py::arg("x"), py::arg("y"), py::arg("hidden"), py::arg("seed") = 0, py::arg("hidden_weights") = "solve",
        py::arg("fan_in_init") = false, py::arg("rcond") = py::none(),
        "Trains a network in one analytic pass; returns (network, report).");

    m.def(
        "train_gd",
        [](const Matrix& x, const Matrix& y, std::vector<std::size_t> hidden, std::uint64_t seed,
           double learning_rate, std::size_t max_iters, std::optional<double> gradient_clip) {
            GdConfig cfg;
            cfg.spec = make_spec(static_cast<std::size_t>(x.cols()), std::move(hidden),
                                 static_cast<std::size_t>(y.cols()), seed, false, ActivationPair::default_epsilon);
            cfg.learning_rate = learning_rate;
            cfg.max_iters = max_iters;
            cfg.gradient_clip = gradient_clip;
            GdResult r = train_gd(x, y, cfg);
            return py::make_tuple(r.network, report_dict(r.report), r.sse_history);
        },
        py::arg("x"), py::arg("y"), py::arg("hidden"), py::arg("seed") = 0, py::arg("learning_rate") = 1e-3,
        py::arg("max_iters") = 500, py::arg("gradient_clip") = 10.0,
        "Gradient-descent baseline; returns (network, report, sse_history).");

    m.def("sse_gradient", &sse_gradient, py::arg("network"), py::arg("x"), py::arg("y"));
    m.def("check_gradient", &check_gradient, py::arg("network"), py::arg("x"), py::arg("y"),
          py::arg("step") = 1e-5);
    m.def("classification_errors", &classification_errors, py::arg("outputs"), py::arg("targets"));

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("x", &Dataset::x)
        .def_readonly("y", &Dataset::y)
        .def_readonly("labels", &Dataset::labels)
        .def_readonly("class_names", &Dataset::class_names)
        .def_readonly("header", &Dataset::header)
        .def_property_readonly("rows", &Dataset::rows);

    m.def("load_csv", &load_csv, py::arg("path"), py::arg("label_col") = -1, py::arg("header") = true);
    m.def("iris", &iris_dataset);
    m.def("xor", &make_xor, py::arg("perturbed") = true);
    m.def("scale_minmax", &scale_minmax, py::arg("dataset"), py::arg("epsilon") = 0.05);
    m.def(
        "stratified_folds",
        [](const std::vector<std::size_t>& labels, std::size_t k, std::uint64_t seed) {
            return stratified_folds(labels, k, seed).assignment;
        },
        py::arg("labels"), py::arg("k"), py::arg("seed"), "Fold index for every sample.");
}
