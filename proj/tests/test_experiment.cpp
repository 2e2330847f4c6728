#include "karnet/errors.hpp"
#include "karnet/experiment.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using karnet::ExperimentConfig;
using karnet::Matrix;

namespace {

ExperimentConfig small_cv(karnet::TrainerKind trainer) {
    ExperimentConfig cfg;
    cfg.trainer = trainer;
    cfg.layers = {5};
    cfg.folds = 5;
    cfg.trials = 2;
    cfg.seed = 11;
    cfg.gd_iters = 20;
    return cfg;
}

// Two tight, far-apart clusters: every hidden size classifies them perfectly.
karnet::Dataset clusters() {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 0.01);
    karnet::Dataset ds;
    ds.x.resize(40, 2);
    for (Eigen::Index i = 0; i < 40; ++i) {
        const double c = i < 20 ? 0.0 : 10.0;
        ds.x(i, 0) = c + n(rng);
        ds.x(i, 1) = c + n(rng);
        ds.labels.push_back(i < 20 ? 0 : 1);
    }
    ds.class_names = {"a", "b"};
    ds.y = karnet::encode_one_vs_all(ds.labels, 2);
    return ds;
}

} // namespace

TEST(Parsing, Layers) {
    EXPECT_EQ(karnet::parse_layers("90"), (std::vector<std::size_t>{90}));
    EXPECT_EQ(karnet::parse_layers("3,3, 3,3"), (std::vector<std::size_t>{3, 3, 3, 3}));
    EXPECT_EQ(karnet::parse_layers("exp:10"), (std::vector<std::size_t>{40, 20, 10}));
    EXPECT_THROW(karnet::parse_layers("3,x"), karnet::ConfigError);
    EXPECT_THROW(karnet::parse_layers("0"), karnet::ConfigError);
    EXPECT_THROW(karnet::parse_layers("-4"), karnet::ConfigError);
}

TEST(Parsing, CountsAndRanges) {
    EXPECT_EQ(karnet::parse_counts("79-81,90"), (std::vector<std::size_t>{79, 80, 81, 90}));
    EXPECT_EQ(karnet::parse_counts("1,2,3"), (std::vector<std::size_t>{1, 2, 3}));
    EXPECT_THROW(karnet::parse_counts("9-3"), karnet::ConfigError);
    EXPECT_EQ(karnet::default_hidden_grid().size(), 12u);
    EXPECT_EQ(karnet::default_hidden_grid().back(), 500u);
}

TEST(Parsing, EnumNames) {
    EXPECT_EQ(karnet::trainer_kind_from_string("gd"), karnet::TrainerKind::gd);
    EXPECT_THROW(karnet::trainer_kind_from_string("lm"), karnet::ConfigError);
    EXPECT_EQ(karnet::arch_pattern_from_string("exp"), karnet::ArchPattern::exponential);
    EXPECT_EQ(karnet::hidden_layers_for(karnet::ArchPattern::exponential, 3), (std::vector<std::size_t>{12, 6, 3}));
}

TEST(Seeds, DerivedStreamsAreStableAndDistinct) {
    EXPECT_EQ(karnet::derive_seed(1, 2, 3), karnet::derive_seed(1, 2, 3));
    EXPECT_NE(karnet::derive_seed(1, 2, 3), karnet::derive_seed(1, 3, 2));
    EXPECT_NE(karnet::derive_seed(1, 0), karnet::derive_seed(2, 0));
}

TEST(Config, Validation) {
    ExperimentConfig cfg;
    cfg.trials = 0;
    EXPECT_THROW(cfg.validate(), karnet::ConfigError);
    cfg = ExperimentConfig{};
    cfg.folds = 1;
    EXPECT_THROW(cfg.validate(), karnet::ConfigError);
    cfg = ExperimentConfig{};
    cfg.activation = "relu";
    EXPECT_THROW(cfg.validate(), karnet::ConfigError);
}

TEST(CrossValidation, KarAndGdSeeIdenticalFolds) {
    const auto kar = karnet::run_cv(small_cv(karnet::TrainerKind::kar));
    const auto gd = karnet::run_cv(small_cv(karnet::TrainerKind::gd));
    EXPECT_EQ(kar.fold_assignments, gd.fold_assignments);
    EXPECT_EQ(kar.trial_seeds, gd.trial_seeds);
    ASSERT_EQ(kar.folds.size(), 10u);
    for (std::size_t i = 0; i < kar.folds.size(); ++i)
        EXPECT_EQ(kar.folds[i].seed, gd.folds[i].seed);
}

TEST(CrossValidation, AggregatesMatchFoldRows) {
    const auto r = karnet::run_cv(small_cv(karnet::TrainerKind::kar));
    const auto j = nlohmann::json::parse(karnet::to_json(r).dump());
    double acc = 0.0;
    double err = 0.0;
    double time = 0.0;
    for (const auto& f : j.at("folds")) {
        acc += f.at("accuracy").get<double>();
        err += f.at("error_rate").get<double>();
        time += f.at("train_time_s").get<double>();
        EXPECT_GE(f.at("accuracy").get<double>(), 0.0);
        EXPECT_LE(f.at("accuracy").get<double>(), 1.0);
    }
    const double n = static_cast<double>(j.at("folds").size());
    EXPECT_NEAR(j.at("aggregate").at("mean_accuracy").get<double>(), acc / n, 1e-12);
    EXPECT_NEAR(j.at("aggregate").at("mean_error_rate").get<double>(), err / n, 1e-12);
    EXPECT_NEAR(j.at("aggregate").at("total_train_time_s").get<double>(), time, 1e-12);
    EXPECT_GT(r.mean_accuracy, 0.8);
}

TEST(CrossValidation, DeterministicApartFromTiming) {
    const auto a = karnet::to_json(karnet::run_cv(small_cv(karnet::TrainerKind::kar)));
    const auto b = karnet::to_json(karnet::run_cv(small_cv(karnet::TrainerKind::kar)));
    EXPECT_EQ(karnet::strip_timing(a).dump(), karnet::strip_timing(b).dump());
    EXPECT_EQ(karnet::strip_timing(a).dump().find("_time_s"), std::string::npos);
}

TEST(CrossValidation, MajorityClassBaselineOnIris) {
    const auto ds = karnet::iris_dataset();
    const auto plan = karnet::stratified_folds(ds.labels, 10, 1);
    double total = 0.0;
    for (std::size_t f = 0; f < 10; ++f)
        total += karnet::majority_accuracy(karnet::subset(ds, plan.train_indices(f)),
                                           karnet::subset(ds, plan.test_indices(f)));
    EXPECT_NEAR(total / 10.0, 1.0 / 3.0, 1e-12);
}

TEST(CrossValidation, InnerSelectionBreaksTiesTowardSmallerSize) {
    ExperimentConfig cfg;
    cfg.grid = {20, 3, 8};
    cfg.folds = 4;
    cfg.inner_folds = 3;
    cfg.data = "clusters";
    const auto r = karnet::run_cv(clusters(), cfg);
    for (const auto& f : r.folds) {
        EXPECT_EQ(f.hidden, (std::vector<std::size_t>{3}));
        EXPECT_EQ(f.accuracy, 1.0);
    }
}

TEST(CrossValidation, TooManyFoldsIsAConfigError) {
    ExperimentConfig cfg;
    cfg.layers = {2};
    cfg.folds = 5;
    EXPECT_THROW(karnet::run_cv(karnet::make_xor(true), cfg), karnet::ConfigError);
    cfg.layers.clear();
    EXPECT_THROW(karnet::run_cv(clusters(), cfg), karnet::ConfigError);
}

TEST(XorDemo, OutputsAndSurface) {
    ExperimentConfig cfg;
    const auto r = karnet::run_xor_demo(cfg);
    const Matrix expected = (Matrix(4, 1) << 0, 0, 1, 1).finished();
    EXPECT_LE((r.two_layer_outputs - expected).cwiseAbs().maxCoeff(), 1e-3);
    EXPECT_LE((r.five_layer_outputs - expected).cwiseAbs().maxCoeff(), 1e-3);

    std::ostringstream out;
    karnet::write_surface_csv(r, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x1,x2,two_layer,five_layer");
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, 10201u);
}

TEST(Sweep, RowsCsvAndSummary) {
    ExperimentConfig cfg;
    cfg.grid = {10, 95};
    cfg.trials = 2;
    cfg.hidden = karnet::HiddenWeights::random_fixed;
    cfg.init = karnet::WeightInit::fan_in();
    const auto r = karnet::run_iris_sweep(cfg);
    EXPECT_EQ(r.train_count, 90u);
    EXPECT_EQ(r.test_count, 60u);
    ASSERT_EQ(r.rows.size(), 4u);
    EXPECT_GT(r.rows[0].sse, 1e-3);
    EXPECT_LE(r.rows[2].sse, 1e-6);

    std::ostringstream csv;
    karnet::write_sweep_csv(r, csv);
    const std::string text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "h,trial,seed,sse,transformed_sse,train_err,test_err");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);

    const auto j = karnet::to_json(r, false);
    ASSERT_EQ(j.at("summary").size(), 2u);
    EXPECT_NEAR(j.at("summary")[0].at("mean_sse").get<double>(), (r.rows[0].sse + r.rows[1].sse) / 2, 1e-12);
    EXPECT_EQ(karnet::strip_timing(karnet::to_json(r)).dump(), j.dump());
}

TEST(GradientCheckCommand, ReportsPerNetworkErrors) {
    ExperimentConfig cfg;
    cfg.trials = 5;
    const auto r = karnet::run_gradient_check(cfg);
    ASSERT_EQ(r.max_relative_errors.size(), 5u);
    EXPECT_LE(r.worst, 1e-4);
    EXPECT_EQ(karnet::to_json(r).at("worst").get<double>(), r.worst);
}
