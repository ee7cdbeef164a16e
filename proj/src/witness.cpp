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

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "entwit/errors.hpp"
#include "entwit/io.hpp"

namespace entwit {

using nlohmann::json;

WitnessReport evaluate_scores(const Eigen::VectorXd &scores, const Eigen::VectorXd &labels, double threshold) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    if (scores.size() == 0)
        throw std::invalid_argument("cannot evaluate an empty dataset");
    WitnessReport r;
    r.threshold = threshold;
    for (Eigen::Index k = 0; k < scores.size(); ++k) {
        const bool predicted = scores(k) >= threshold;
        const bool actual = labels(k) > 0.5;
        if (actual)
            ++(predicted ? r.true_entangled_correct : r.false_negative);
        else
            ++(predicted ? r.false_positive : r.true_separable_correct);
    }
    const auto tp = static_cast<double>(r.true_entangled_correct);
    const auto fp = static_cast<double>(r.false_positive);
    const auto fn = static_cast<double>(r.false_negative);
    r.accuracy = static_cast<double>(r.true_entangled_correct + r.true_separable_correct) /
                 static_cast<double>(scores.size());
    r.precision = tp + fp == 0.0 ? 1.0 : tp / (tp + fp);
    r.recall = tp + fn == 0.0 ? 0.0 : tp / (tp + fn);
    return r;
}

WitnessReport evaluate(const MlpModel &model, const Dataset &ds, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("threshold must lie in (0, 1)");
    if (ds.empty())
        throw std::invalid_argument("cannot evaluate an empty dataset");
    return evaluate_scores(forward(model, ds.feature_matrix()), ds.label_vector(), threshold);
}

double calibrate_threshold_scores(const Eigen::VectorXd &scores, const Eigen::VectorXd &labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    double max_sep = -std::numeric_limits<double>::infinity();
    bool any_sep = false, any_ent = false;
    for (Eigen::Index k = 0; k < scores.size(); ++k) {
        if (labels(k) > 0.5) {
            any_ent = true;
        } else {
            any_sep = true;
            max_sep = std::max(max_sep, scores(k));
        }
    }
    if (!any_sep)
        throw std::invalid_argument("calibration set has no separable sample");

    double next = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < scores.size(); ++k)
        if (labels(k) > 0.5 && scores(k) > max_sep)
            next = std::min(next, scores(k));

    double threshold;
    if (std::isfinite(next)) {
        threshold = max_sep + 0.5 * (next - max_sep);
        if (!(threshold > max_sep))
            threshold = next;
    } else if (any_ent) {
        throw CalibrationDegenerateError("no entangled score lies above the largest separable score");
    } else {
        threshold = max_sep + 1e-9;
    }
    if (threshold >= 1.0)
        throw CalibrationDegenerateError("calibrated threshold would reach 1");
    return threshold;
}

double calibrate_threshold(const MlpModel &model, const Dataset &calibration_ds) {
    return calibrate_threshold_scores(forward(model, calibration_ds.feature_matrix()), calibration_ds.label_vector());
}

json to_json(const WitnessReport &r) {
    return {{"counts",
             {{"true_separable_correct", r.true_separable_correct},
              {"false_positive", r.false_positive},
              {"false_negative", r.false_negative},
              {"true_entangled_correct", r.true_entangled_correct}}},
            {"rates", {{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall}}},
            {"threshold", r.threshold}};
}

CellOutcome run_cell(const SplitDatasets &data, const Architecture &arch, std::uint64_t seed,
                     const TrainConfig &train_config) {
    const std::uint64_t init_seed = derive_seed(seed, "cell", static_cast<std::uint64_t>(arch.m));
    TrainResult trained = train(model_new(arch, init_seed), data.train, data.validation, train_config);

    CellOutcome out{.row = {},
                    .model = std::move(trained.model),
                    .history = std::move(trained.history),
                    .test_at_half = {},
                    .calibration_at_threshold = std::nullopt,
                    .test_at_threshold = std::nullopt};
    out.test_at_half = evaluate(out.model, data.test, 0.5);
    out.row.m = arch.m;
    out.row.symmetry = data.train.manifest.symmetry;
    out.row.seed = seed;
    out.row.accuracy = out.test_at_half.accuracy;
    try {
        const double t = calibrate_threshold(out.model, data.validation);
        out.calibration_at_threshold = evaluate(out.model, data.validation, t);
        out.test_at_threshold = evaluate(out.model, data.test, t);
        out.row.threshold = t;
        out.row.calibrated = true;
        out.row.recall_at_precision_one = out.test_at_threshold->recall;
        out.row.precision_at_calibrated = out.test_at_threshold->precision;
    } catch (const CalibrationDegenerateError &) {
        out.row.recall_at_precision_one = 0.0;
    }
    return out;
}

CellOutcome run_cell(const SplitDatasets &data, int m, std::uint64_t seed, const SweepConfig &config) {
    if (m < 1 || m > static_cast<int>(kNumFeatures))
        throw std::invalid_argument("m must lie in 1..15, got " + std::to_string(m));
    TrainConfig tc = config.train;
    tc.seed = derive_seed(seed, "train", static_cast<std::uint64_t>(m));
    return run_cell(data, Architecture::linear_code(m, config.hidden), seed, tc);
}

SplitDatasets sweep_data(const SweepConfig &config, std::uint64_t seed) {
    return split(generate(config.count, config.symmetry, seed, config.rank), config.fractions, seed);
}

SweepResult sweep_measurements(const SweepConfig &config) {
    for (int m : config.m_values)
        if (m < 1 || m > static_cast<int>(kNumFeatures))
            throw std::invalid_argument("m must lie in 1..15, got " + std::to_string(m));
    config.train.validate();

    SweepResult result;
    result.rows.resize(config.m_values.size() * config.seeds.size());
    std::mutex report_mutex;

    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
        const std::uint64_t seed = config.seeds[s];
        const SplitDatasets data = sweep_data(config, seed);

        const std::size_t cells = config.m_values.size();
        const auto nworkers = static_cast<std::size_t>(std::clamp(config.workers, 1, static_cast<int>(cells)));
        std::vector<std::exception_ptr> errors(nworkers);
        auto work = [&](std::size_t w) {
            try {
                for (std::size_t c = w; c < cells; c += nworkers) {
                    SweepRow row = run_cell(data, config.m_values[c], seed, config).row;
                    result.rows[s * cells + c] = row;
                    if (config.on_row) {
                        std::lock_guard lock(report_mutex);
                        config.on_row(row);
                    }
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        };
        if (nworkers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < nworkers; ++w)
                pool.emplace_back(work, w);
            for (auto &t : pool)
                t.join();
        }
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    return result;
}

json to_json(const SweepResult &r) {
    json rows = json::array();
    for (const auto &row : r.rows)
        rows.push_back({{"m", row.m},
                        {"symmetry", std::string(to_string(row.symmetry))},
                        {"seed", row.seed},
                        {"accuracy", row.accuracy},
                        {"recall_p1", row.recall_at_precision_one},
                        {"precision_at_threshold", row.precision_at_calibrated},
                        {"threshold", row.threshold},
                        {"calibrated", row.calibrated}});
    return {{"rows", rows}};
}

std::string to_csv(const SweepResult &r) {
    std::string out = "m,symmetry,seed,accuracy,recall_p1\n";
    for (const auto &row : r.rows) {
        out += std::to_string(row.m) + "," + std::string(to_string(row.symmetry)) + "," +
               std::to_string(row.seed) + "," + io::format_double(row.accuracy) + "," +
               io::format_double(row.recall_at_precision_one) + "\n";
    }
    return out;
}

}  // namespace entwit
