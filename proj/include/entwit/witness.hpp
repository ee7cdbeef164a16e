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

#ifndef ENTWIT_WITNESS_HPP
#define ENTWIT_WITNESS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "entwit/dataset.hpp"
#include "entwit/nnet.hpp"

namespace entwit {

/// Confusion counts with "entangled" as the positive class.
struct WitnessReport {
    std::int64_t true_separable_correct = 0;
    std::int64_t false_positive = 0;  // separable flagged entangled
    std::int64_t false_negative = 0;  // entangled missed
    std::int64_t true_entangled_correct = 0;
    double accuracy = 0.0;
    double precision = 1.0;  // 1 when nothing is flagged
    double recall = 0.0;     // 0 when there is nothing to find
    double threshold = 0.5;

    std::int64_t total() const {
        return true_separable_correct + false_positive + false_negative + true_entangled_correct;
    }
};

/// A score >= threshold means entangled. labels hold 0/1.
WitnessReport evaluate_scores(const Eigen::VectorXd &scores, const Eigen::VectorXd &labels, double threshold);

/// Requires 0 < threshold < 1 and a non-empty dataset.
WitnessReport evaluate(const MlpModel &model, const Dataset &ds, double threshold);

/// Smallest convenient threshold strictly above every separable score:
/// the midpoint between the largest separable score and the next larger
/// entangled score, or that maximum plus 1e-9 when the set holds no
/// entangled samples. Throws CalibrationDegenerateError when entangled
/// samples exist but none scores above the largest separable score, or
/// when the result would reach 1.
double calibrate_threshold_scores(const Eigen::VectorXd &scores, const Eigen::VectorXd &labels);

double calibrate_threshold(const MlpModel &model, const Dataset &calibration_ds);

nlohmann::json to_json(const WitnessReport &r);

struct SweepRow {
    int m = 0;
    Symmetry symmetry = Symmetry::none;
    std::uint64_t seed = 0;
    double accuracy = 0.0;                 // test split, threshold 0.5
    double recall_at_precision_one = 0.0;  // test split, calibrated threshold
    double precision_at_calibrated = 1.0;  // test split, calibrated threshold
    double threshold = 0.0;                // 0 when calibration was degenerate
    bool calibrated = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

struct SweepConfig {
    std::vector<int> m_values{1, 3, 5, 9, 15};
    Symmetry symmetry = Symmetry::none;
    std::vector<std::uint64_t> seeds{1};
    std::int64_t count = 250000;
    SplitFractions fractions{0.8, 0.1, 0.1};
    int rank = 4;
    std::vector<int> hidden{64, 64};
    TrainConfig train;
    int workers = 1;
    /// Called after each finished cell; may be invoked from worker threads
    /// but never concurrently.
    std::function<void(const SweepRow &)> on_row;
};

/// Everything one (m, seed) cell produces.
struct CellOutcome {
    SweepRow row;
    MlpModel model;
    TrainHistory history;
    WitnessReport test_at_half;
    std::optional<WitnessReport> calibration_at_threshold;  // validation split
    std::optional<WitnessReport> test_at_threshold;
};

/// Trains linear_code(m) on `data.train`, calibrates on `data.validation`
/// and reports on `data.test`. The init seed is derived from (seed, m).
CellOutcome run_cell(const SplitDatasets &data, int m, std::uint64_t seed, const SweepConfig &config);

/// Same as run_cell, for any architecture.
CellOutcome run_cell(const SplitDatasets &data, const Architecture &arch, std::uint64_t seed,
                     const TrainConfig &train_config);

/// Data for one sweep seed: generate(count, symmetry, seed, rank) split
/// with the same seed.
SplitDatasets sweep_data(const SweepConfig &config, std::uint64_t seed);

/// One row per (m, seed); rows ordered by seed, then m, as requested.
SweepResult sweep_measurements(const SweepConfig &config);

nlohmann::json to_json(const SweepResult &r);
/// Header `m,symmetry,seed,accuracy,recall_p1`.
std::string to_csv(const SweepResult &r);

}  // namespace entwit

#endif
