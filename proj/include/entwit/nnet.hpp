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

#ifndef ENTWIT_NNET_HPP
#define ENTWIT_NNET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "entwit/dataset.hpp"

namespace entwit {

enum class Activation { linear, relu, sigmoid };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

struct LayerSpec {
    int width = 1;
    Activation activation = Activation::linear;
    bool has_bias = true;

    friend bool operator==(const LayerSpec &, const LayerSpec &) = default;
};

enum class ArchitectureKind { nonlinear_full, linear_code };

/// Which of the two classifier shapes to build.
///
/// nonlinear_full: 15 -> hidden... -> 1. Every hidden layer is relu except
/// the narrowest one, the code, which is linear. Default hidden widths are
/// {64, 32, 8, 32, 64}.
///
/// linear_code(m): 15 -> m (linear, no bias) -> hidden... -> 1, relu hidden
/// layers. Default hidden widths are {64, 64}. The m code values are linear
/// functionals of the Pauli expectations, i.e. measurements.
///
/// Both end in a single sigmoid unit.
struct Architecture {
    ArchitectureKind kind = ArchitectureKind::nonlinear_full;
    int m = 0;
    std::vector<int> hidden;

    static Architecture nonlinear_full(std::vector<int> hidden = {64, 32, 8, 32, 64});
    static Architecture linear_code(int m, std::vector<int> hidden = {64, 64});

    friend bool operator==(const Architecture &, const Architecture &) = default;
};

std::string_view to_string(ArchitectureKind k);
ArchitectureKind parse_architecture_kind(std::string_view name);

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    friend bool operator==(const OptimizerConfig &, const OptimizerConfig &) = default;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 256;
    int max_epochs = 200;
    int patience = 10;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    /// Multiply the learning rate by lr_decay after this many epochs
    /// without validation improvement; 0 disables the schedule.
    int lr_plateau = 0;
    double lr_decay = 0.5;
    double min_learning_rate = 1e-6;
    /// Decoupled L2 shrinkage applied to weights (not biases) each step.
    double weight_decay = 0.0;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;

    friend bool operator==(const TrainConfig &, const TrainConfig &) = default;
};

struct EpochRecord {
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double validation_accuracy = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;  // index into epochs
};

/// Fully connected feedforward network. weights[l] is fan_out x fan_in;
/// biases[l] is empty when layers[l].has_bias is false.
struct MlpModel {
    Architecture architecture;
    int input_width = static_cast<int>(kNumFeatures);
    std::vector<LayerSpec> layers;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    std::optional<TrainConfig> training_config;
    std::optional<int> best_epoch;

    /// Throws std::invalid_argument if shapes do not chain or the output
    /// layer is not a single sigmoid unit.
    void validate() const;
    std::size_t parameter_count() const;
};

/// Builds a model with fan-in scaled Gaussian weights (std sqrt(2/fan_in)
/// ahead of relu, sqrt(1/fan_in) otherwise) and zero biases.
MlpModel model_new(const Architecture &arch, std::uint64_t seed);

/// Entanglement scores in (0, 1) for each row of `batch` (rows x 15).
Eigen::VectorXd forward(const MlpModel &model, const Eigen::MatrixXd &batch);

/// Layer-1 outputs (rows x m) of a linear_code model.
Eigen::MatrixXd code_values(const MlpModel &model, const Eigen::MatrixXd &batch);

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

struct LossAndGradients {
    double loss = 0.0;
    Gradients grads;
};

inline constexpr double kScoreClamp = 1e-12;

/// Mean binary cross-entropy with scores clamped to [1e-12, 1 - 1e-12].
double loss(const MlpModel &model, const Eigen::MatrixXd &batch, const Eigen::VectorXd &labels);

LossAndGradients loss_and_gradients(const MlpModel &model, const Eigen::MatrixXd &batch,
                                    const Eigen::VectorXd &labels);

struct TrainResult {
    MlpModel model;
    TrainHistory history;
};

/// Mini-batch training with per-epoch shuffling keyed to config.seed and
/// early stopping on validation loss. Returns the best-epoch weights.
/// Throws TrainingDivergedError on a non-finite loss.
TrainResult train(MlpModel model, const Dataset &train_ds, const Dataset &validation_ds, const TrainConfig &config);

/// The m x 15 measurement matrix of a linear_code model.
Eigen::MatrixXd code_weights(const MlpModel &model);

nlohmann::json to_json(const TrainConfig &config);
TrainConfig train_config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const MlpModel &model);
MlpModel model_from_json(const nlohmann::json &j);

void save_model(const MlpModel &model, const std::filesystem::path &path);
MlpModel load_model(const std::filesystem::path &path);

}  // namespace entwit

#endif
