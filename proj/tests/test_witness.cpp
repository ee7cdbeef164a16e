// Copyright 2026 The entwit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "entwit/witness.hpp"

#include <cmath>

#include "entwit/errors.hpp"
#include "gtest/gtest.h"

using namespace entwit;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v)
        out(k++) = x;
    return out;
}

// Scores every input 0.5.
MlpModel constant_model() {
    MlpModel m = model_new(Architecture::linear_code(3), 1);
    for (auto &w : m.weights)
        w.setZero();
    return m;
}

}  // namespace

TEST(evaluate_scores, counts_and_rates) {
    const auto scores = vec({0.1, 0.6, 0.7, 0.4, 0.9, 0.5});
    const auto labels = vec({0, 0, 1, 1, 1, 1});
    const WitnessReport r = evaluate_scores(scores, labels, 0.5);
    EXPECT_EQ(r.true_separable_correct, 1);
    EXPECT_EQ(r.false_positive, 1);
    EXPECT_EQ(r.false_negative, 1);
    EXPECT_EQ(r.true_entangled_correct, 3);  // the 0.5 tie counts as entangled
    EXPECT_EQ(r.total(), 6);
    EXPECT_DOUBLE_EQ(r.accuracy, 4.0 / 6.0);
    EXPECT_DOUBLE_EQ(r.precision, 3.0 / 4.0);
    EXPECT_DOUBLE_EQ(r.recall, 3.0 / 4.0);
    EXPECT_EQ(r.threshold, 0.5);
}

TEST(evaluate_scores, nothing_flagged_has_precision_one) {
    const WitnessReport r = evaluate_scores(vec({0.1, 0.2}), vec({0, 1}), 0.9);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 0.0);
}

TEST(evaluate, degenerate_classifier) {
    const Dataset ds = generate(500, Symmetry::none, 3);
    const WitnessReport r = evaluate(constant_model(), ds, 0.4);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_DOUBLE_EQ(r.precision, 1.0 - ds.manifest.separable_fraction);
    EXPECT_EQ(r.true_separable_correct + r.false_negative, 0);
    EXPECT_EQ(r.total(), 500);
}

TEST(evaluate, rejects_bad_input) {
    const Dataset ds = generate(10, Symmetry::none, 3);
    EXPECT_THROW(evaluate(constant_model(), ds, 0.0), std::invalid_argument);
    EXPECT_THROW(evaluate(constant_model(), ds, 1.0), std::invalid_argument);
    EXPECT_THROW(evaluate(constant_model(), Dataset{}, 0.5), std::invalid_argument);
}

TEST(evaluate, raising_threshold_is_monotone) {
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd scores(400), labels(400);
    for (int k = 0; k < 400; ++k) {
        labels(k) = u(rng) < 0.6 ? 1.0 : 0.0;
        scores(k) = std::clamp(0.35 * labels(k) + 0.65 * u(rng), 0.0, 1.0);
    }
    WitnessReport prev = evaluate_scores(scores, labels, 0.01);
    for (double t = 0.02; t < 1.0; t += 0.01) {
        const WitnessReport r = evaluate_scores(scores, labels, t);
        EXPECT_LE(r.false_positive, prev.false_positive);
        EXPECT_LE(r.recall, prev.recall);
        EXPECT_EQ(r.total(), 400);
        prev = r;
    }
}

TEST(calibrate_threshold_scores, four_point_case) {
    const auto scores = vec({0.1, 0.2, 0.3, 0.9});
    const auto labels = vec({0, 0, 1, 1});
    const double t = calibrate_threshold_scores(scores, labels);
    EXPECT_GT(t, 0.2);
    EXPECT_LE(t, 0.3);
    const WitnessReport r = evaluate_scores(scores, labels, t);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
}

TEST(calibrate_threshold_scores, identical_scores_are_degenerate) {
    EXPECT_THROW(calibrate_threshold_scores(vec({0.4, 0.4, 0.4}), vec({0, 1, 1})), CalibrationDegenerateError);
    EXPECT_THROW(calibrate_threshold(constant_model(), generate(200, Symmetry::none, 1)), CalibrationDegenerateError);
}

TEST(calibrate_threshold_scores, only_separable_samples) {
    EXPECT_DOUBLE_EQ(calibrate_threshold_scores(vec({0.3, 0.7}), vec({0, 0})), 0.7 + 1e-9);
    EXPECT_THROW(calibrate_threshold_scores(vec({0.3, 1.0 - 1e-10}), vec({0, 0})), CalibrationDegenerateError);
    EXPECT_THROW(calibrate_threshold_scores(vec({0.3}), vec({1})), std::invalid_argument);
}

TEST(calibrate_threshold_scores, adjacent_doubles_still_separate) {
    const double a = 0.6;
    const double b = std::nextafter(a, 1.0);
    const double t = calibrate_threshold_scores(vec({a, b}), vec({0, 1}));
    EXPECT_GT(t, a);
    EXPECT_EQ(evaluate_scores(vec({a, b}), vec({0, 1}), t).false_positive, 0);
}

TEST(calibrate_threshold_scores, zero_false_positives_by_construction) {
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd scores(300), labels(300);
        for (int k = 0; k < 300; ++k) {
            labels(k) = u(rng) < 0.7 ? 1.0 : 0.0;
            scores(k) = 0.8 * u(rng) + 0.2 * labels(k);
        }
        double t = 0.0;
        try {
            t = calibrate_threshold_scores(scores, labels);
        } catch (const CalibrationDegenerateError &) {
            continue;
        }
        const WitnessReport r = evaluate_scores(scores, labels, t);
        EXPECT_EQ(r.false_positive, 0);
        EXPECT_EQ(r.precision, 1.0);
    }
}

TEST(report_json, fields) {
    const auto j = to_json(evaluate_scores(vec({0.2, 0.8}), vec({0, 1}), 0.5));
    EXPECT_EQ(j["counts"]["true_entangled_correct"], 1);
    EXPECT_EQ(j["counts"]["true_separable_correct"], 1);
    EXPECT_EQ(j["rates"]["accuracy"], 1.0);
    EXPECT_EQ(j["threshold"], 0.5);
}

TEST(sweep_measurements, one_row_per_cell_and_csv) {
    SweepConfig cfg;
    cfg.m_values = {1, 3};
    cfg.seeds = {1, 2};
    cfg.count = 2000;
    cfg.hidden = {8};
    cfg.train.max_epochs = 2;
    int callbacks = 0;
    cfg.on_row = [&](const SweepRow &) { ++callbacks; };
    const SweepResult r = sweep_measurements(cfg);
    ASSERT_EQ(r.rows.size(), 4u);
    EXPECT_EQ(callbacks, 4);
    EXPECT_EQ(r.rows[0].m, 1);
    EXPECT_EQ(r.rows[1].m, 3);
    EXPECT_EQ(r.rows[2].seed, 2u);
    for (const auto &row : r.rows) {
        EXPECT_GT(row.accuracy, 0.0);
        EXPECT_LE(row.accuracy, 1.0);
        EXPECT_EQ(row.symmetry, Symmetry::none);
    }
    const std::string csv = to_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,symmetry,seed,accuracy,recall_p1");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_EQ(to_json(r)["rows"].size(), 4u);

    cfg.workers = 2;
    cfg.on_row = nullptr;
    const SweepResult parallel = sweep_measurements(cfg);
    EXPECT_EQ(to_csv(parallel), csv);
}

TEST(sweep_measurements, rejects_bad_m) {
    SweepConfig cfg;
    cfg.m_values = {0};
    EXPECT_THROW(sweep_measurements(cfg), std::invalid_argument);
    cfg.m_values = {16};
    EXPECT_THROW(sweep_measurements(cfg), std::invalid_argument);
}

TEST(run_cell, calibration_split_has_no_false_positives) {
    SweepConfig cfg;
    cfg.count = 4000;
    cfg.train.max_epochs = 5;
    const SplitDatasets data = sweep_data(cfg, 3);
    const CellOutcome out = run_cell(data, 3, 3, cfg);
    ASSERT_TRUE(out.row.calibrated);
    EXPECT_EQ(out.calibration_at_threshold->false_positive, 0);
    EXPECT_EQ(out.test_at_half.total(), static_cast<std::int64_t>(data.test.size()));
    EXPECT_EQ(code_weights(out.model).rows(), 3);
}
