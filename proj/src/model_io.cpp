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

#include <stdexcept>
#include <string>

#include "entwit/errors.hpp"
#include "entwit/io.hpp"
#include "entwit/nnet.hpp"

namespace entwit {

using nlohmann::json;

json to_json(const TrainConfig &c) {
    json j{{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"max_epochs", c.max_epochs},
           {"patience", c.patience},           {"seed", c.seed},
           {"lr_plateau", c.lr_plateau},       {"lr_decay", c.lr_decay},
           {"min_learning_rate", c.min_learning_rate}, {"weight_decay", c.weight_decay}};
    if (c.optimizer.kind == OptimizerKind::sgd)
        j["optimizer"] = {{"kind", "sgd"}};
    else
        j["optimizer"] = {{"kind", "adam"},
                          {"beta1", c.optimizer.beta1},
                          {"beta2", c.optimizer.beta2},
                          {"epsilon", c.optimizer.epsilon}};
    return j;
}

TrainConfig train_config_from_json(const json &j) {
    TrainConfig c;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.max_epochs = j.at("max_epochs").get<int>();
    c.patience = j.at("patience").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.lr_plateau = j.value("lr_plateau", 0);
    c.lr_decay = j.value("lr_decay", 0.5);
    c.min_learning_rate = j.value("min_learning_rate", 1e-6);
    c.weight_decay = j.value("weight_decay", 0.0);
    const auto &o = j.at("optimizer");
    const auto kind = o.at("kind").get<std::string>();
    if (kind == "sgd") {
        c.optimizer.kind = OptimizerKind::sgd;
    } else if (kind == "adam") {
        c.optimizer = {OptimizerKind::adam, o.at("beta1").get<double>(), o.at("beta2").get<double>(),
                       o.at("epsilon").get<double>()};
    } else {
        throw std::invalid_argument("unknown optimizer '" + kind + "'");
    }
    return c;
}

json to_json(const MlpModel &model) {
    json j;
    j["architecture"] = std::string(to_string(model.architecture.kind));
    j["m"] = model.architecture.m;
    j["hidden"] = model.architecture.hidden;
    j["input_width"] = model.input_width;
    j["layer_specs"] = json::array();
    for (const auto &s : model.layers)
        j["layer_specs"].push_back(
            {{"width", s.width}, {"activation", std::string(to_string(s.activation))}, {"has_bias", s.has_bias}});
    j["weights"] = json::array();
    j["biases"] = json::array();
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto &w = model.weights[l];
        json rows = json::array();
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                row.push_back(w(r, c));
            rows.push_back(std::move(row));
        }
        j["weights"].push_back(std::move(rows));
        if (model.layers[l].has_bias)
            j["biases"].push_back(std::vector<double>(model.biases[l].data(),
                                                      model.biases[l].data() + model.biases[l].size()));
        else
            j["biases"].push_back(nullptr);
    }
    j["training_config"] = model.training_config ? to_json(*model.training_config) : json(nullptr);
    j["best_epoch"] = model.best_epoch ? json(*model.best_epoch) : json(nullptr);
    return j;
}

MlpModel model_from_json(const json &j) {
    MlpModel model;
    model.architecture.kind = parse_architecture_kind(j.at("architecture").get<std::string>());
    model.architecture.m = j.at("m").get<int>();
    model.architecture.hidden = j.at("hidden").get<std::vector<int>>();
    model.input_width = j.at("input_width").get<int>();
    for (const auto &s : j.at("layer_specs"))
        model.layers.push_back({s.at("width").get<int>(), parse_activation(s.at("activation").get<std::string>()),
                                s.at("has_bias").get<bool>()});
    const auto &weights = j.at("weights");
    const auto &biases = j.at("biases");
    if (weights.size() != model.layers.size() || biases.size() != model.layers.size())
        throw std::invalid_argument("weights/biases count does not match layer_specs");
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto &rows = weights[l];
        const auto n_rows = static_cast<Eigen::Index>(rows.size());
        const auto n_cols = n_rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows[0].size());
        Eigen::MatrixXd w(n_rows, n_cols);
        for (Eigen::Index r = 0; r < n_rows; ++r) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n_cols)
                throw std::invalid_argument("ragged weight matrix in layer " + std::to_string(l));
            for (Eigen::Index c = 0; c < n_cols; ++c)
                w(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
        model.weights.push_back(std::move(w));
        if (biases[l].is_null()) {
            model.biases.emplace_back();
        } else {
            const auto v = biases[l].get<std::vector<double>>();
            model.biases.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
    }
    if (j.contains("training_config") && !j.at("training_config").is_null())
        model.training_config = train_config_from_json(j.at("training_config"));
    if (j.contains("best_epoch") && !j.at("best_epoch").is_null())
        model.best_epoch = j.at("best_epoch").get<int>();
    model.validate();
    return model;
}

void save_model(const MlpModel &model, const std::filesystem::path &path) {
    io::write_file_atomic(path, to_json(model).dump(1) + "\n");
}

MlpModel load_model(const std::filesystem::path &path) {
    try {
        return model_from_json(json::parse(io::read_file(path)));
    } catch (const json::exception &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace entwit
