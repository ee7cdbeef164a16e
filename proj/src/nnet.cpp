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

#include "entwit/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "entwit/errors.hpp"

namespace entwit {

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::linear:
        return "linear";
    case Activation::relu:
        return "relu";
    case Activation::sigmoid:
        return "sigmoid";
    }
    return "linear";
}

Activation parse_activation(std::string_view name) {
    if (name == "linear")
        return Activation::linear;
    if (name == "relu")
        return Activation::relu;
    if (name == "sigmoid")
        return Activation::sigmoid;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(ArchitectureKind k) {
    return k == ArchitectureKind::nonlinear_full ? "nonlinear_full" : "linear_code";
}

ArchitectureKind parse_architecture_kind(std::string_view name) {
    if (name == "nonlinear_full")
        return ArchitectureKind::nonlinear_full;
    if (name == "linear_code")
        return ArchitectureKind::linear_code;
    throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

Architecture Architecture::nonlinear_full(std::vector<int> hidden) {
    return {ArchitectureKind::nonlinear_full, 0, std::move(hidden)};
}

Architecture Architecture::linear_code(int m, std::vector<int> hidden) {
    return {ArchitectureKind::linear_code, m, std::move(hidden)};
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw std::invalid_argument("learning_rate must be positive");
    if (batch_size < 1)
        throw std::invalid_argument("batch_size must be at least 1");
    if (max_epochs < 1)
        throw std::invalid_argument("max_epochs must be at least 1");
    if (patience < 1)
        throw std::invalid_argument("patience must be at least 1");
    if (!(weight_decay >= 0.0))
        throw std::invalid_argument("weight_decay must be non-negative");
    if (lr_plateau < 0)
        throw std::invalid_argument("lr_plateau must be non-negative");
    if (lr_plateau > 0 && !(lr_decay > 0.0 && lr_decay < 1.0))
        throw std::invalid_argument("lr_decay must lie in (0, 1)");
    if (optimizer.kind == OptimizerKind::adam &&
        !(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0 && optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0 &&
          optimizer.epsilon > 0.0))
        throw std::invalid_argument("adam parameters out of range");
}

void MlpModel::validate() const {
    if (layers.empty())
        throw std::invalid_argument("model has no layers");
    if (weights.size() != layers.size() || biases.size() != layers.size())
        throw std::invalid_argument("model parameter lists do not match its layers");
    Eigen::Index fan_in = input_width;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto &spec = layers[l];
        if (spec.width < 1)
            throw std::invalid_argument("layer " + std::to_string(l) + " has width < 1");
        if (weights[l].rows() != spec.width || weights[l].cols() != fan_in)
            throw std::invalid_argument("layer " + std::to_string(l) + " weight shape does not chain");
        if (spec.has_bias ? biases[l].size() != spec.width : biases[l].size() != 0)
            throw std::invalid_argument("layer " + std::to_string(l) + " bias shape mismatch");
        fan_in = spec.width;
    }
    if (layers.back().width != 1 || layers.back().activation != Activation::sigmoid)
        throw std::invalid_argument("output layer must be a single sigmoid unit");
    if (architecture.kind == ArchitectureKind::linear_code &&
        (layers.front().activation != Activation::linear || layers.front().has_bias))
        throw std::invalid_argument("linear_code layer 1 must be linear without bias");
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layers.size(); ++l)
        n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

MlpModel model_new(const Architecture &arch, std::uint64_t seed) {
    MlpModel model;
    model.architecture = arch;
    if (arch.kind == ArchitectureKind::linear_code) {
        if (arch.m < 1 || arch.m > static_cast<int>(kNumFeatures))
            throw std::invalid_argument("linear_code m must lie in 1..15, got " + std::to_string(arch.m));
        model.layers.push_back({arch.m, Activation::linear, false});
        for (int w : arch.hidden)
            model.layers.push_back({w, Activation::relu, true});
    } else {
        if (arch.hidden.empty())
            throw std::invalid_argument("nonlinear_full needs at least one hidden layer");
        const auto code = std::min_element(arch.hidden.begin(), arch.hidden.end()) - arch.hidden.begin();
        for (std::size_t k = 0; k < arch.hidden.size(); ++k)
            model.layers.push_back({arch.hidden[k],
                                    static_cast<std::ptrdiff_t>(k) == code ? Activation::linear : Activation::relu,
                                    true});
    }
    model.layers.push_back({1, Activation::sigmoid, true});
    for (const auto &spec : model.layers)
        if (spec.width < 1)
            throw std::invalid_argument("layer widths must be at least 1");

    Rng rng = make_rng(seed, "init");
    std::normal_distribution<double> normal(0.0, 1.0);
    int fan_in = model.input_width;
    for (const auto &spec : model.layers) {
        const double gain = spec.activation == Activation::relu ? 2.0 : 1.0;
        const double scale = std::sqrt(gain / fan_in);
        Eigen::MatrixXd w(spec.width, fan_in);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                w(r, c) = scale * normal(rng);
        model.weights.push_back(std::move(w));
        model.biases.push_back(spec.has_bias ? Eigen::VectorXd::Zero(spec.width) : Eigen::VectorXd());
        fan_in = spec.width;
    }
    model.validate();
    return model;
}

namespace {

// Column-per-sample activations of one forward pass. post[0] is the input.
struct ForwardTrace {
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> post;
};

// Kept strictly inside (0, 1) even where the exact value rounds to 0 or 1.
double sigmoid(double z) {
    constexpr double lo = std::numeric_limits<double>::denorm_min();
    const double hi = std::nextafter(1.0, 0.0);
    if (z >= 0.0)
        return std::min(1.0 / (1.0 + std::exp(-z)), hi);
    const double e = std::exp(z);
    return std::max(e / (1.0 + e), lo);
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd &z) {
    switch (a) {
    case Activation::relu:
        return z.cwiseMax(0.0);
    case Activation::sigmoid:
        return z.unaryExpr([](double v) { return sigmoid(v); });
    case Activation::linear:
        break;
    }
    return z;
}

ForwardTrace run_forward(const MlpModel &model, const Eigen::MatrixXd &input, std::size_t n_layers) {
    ForwardTrace t;
    t.post.push_back(input);
    for (std::size_t l = 0; l < n_layers; ++l) {
        Eigen::MatrixXd z = model.weights[l] * t.post.back();
        if (model.layers[l].has_bias)
            z.colwise() += model.biases[l];
        t.post.push_back(activate(model.layers[l].activation, z));
        t.pre.push_back(std::move(z));
    }
    return t;
}

void check_batch(const MlpModel &model, const Eigen::MatrixXd &batch) {
    if (batch.cols() != model.input_width)
        throw std::invalid_argument("batch has " + std::to_string(batch.cols()) + " columns, model expects " +
                                    std::to_string(model.input_width));
}

void check_labels(const Eigen::MatrixXd &batch, const Eigen::VectorXd &labels) {
    if (labels.size() != batch.rows())
        throw std::invalid_argument("label count does not match batch rows");
    if (batch.rows() == 0)
        throw std::invalid_argument("empty batch");
}

double bce(const Eigen::RowVectorXd &scores, const Eigen::RowVectorXd &labels) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < scores.size(); ++k) {
        const double s = std::clamp(scores(k), kScoreClamp, 1.0 - kScoreClamp);
        total -= labels(k) * std::log(s) + (1.0 - labels(k)) * std::log(1.0 - s);
    }
    return total / static_cast<double>(scores.size());
}

// Inputs are feature-major: one column per sample.
LossAndGradients loss_grad_columns(const MlpModel &model, const Eigen::MatrixXd &x, const Eigen::RowVectorXd &y) {
    const std::size_t n_layers = model.layers.size();
    const ForwardTrace t = run_forward(model, x, n_layers);
    const Eigen::RowVectorXd scores = t.post.back().row(0);

    LossAndGradients out;
    out.loss = bce(scores, y);
    out.grads.weights.resize(n_layers);
    out.grads.biases.resize(n_layers);

    // d(loss)/d(pre-sigmoid). This is the exact derivative wherever the
    // clamp is inactive and keeps saturated mistakes trainable.
    Eigen::MatrixXd delta = (scores - y) / static_cast<double>(x.cols());
    for (std::size_t l = n_layers; l-- > 0;) {
        out.grads.weights[l] = delta * t.post[l].transpose();
        out.grads.biases[l] =
            model.layers[l].has_bias ? Eigen::VectorXd(delta.rowwise().sum()) : Eigen::VectorXd();
        if (l == 0)
            break;
        delta = model.weights[l].transpose() * delta;
        const auto &z = t.pre[l - 1];
        switch (model.layers[l - 1].activation) {
        case Activation::relu:
            delta.array() *= (z.array() > 0.0).cast<double>();
            break;
        case Activation::sigmoid:
            delta.array() *= t.post[l].array() * (1.0 - t.post[l].array());
            break;
        case Activation::linear:
            break;
        }
    }
    return out;
}

double accuracy_at_half(const Eigen::RowVectorXd &scores, const Eigen::RowVectorXd &labels) {
    Eigen::Index correct = 0;
    for (Eigen::Index k = 0; k < scores.size(); ++k)
        correct += ((scores(k) >= 0.5) == (labels(k) > 0.5)) ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

}  // namespace

Eigen::VectorXd forward(const MlpModel &model, const Eigen::MatrixXd &batch) {
    check_batch(model, batch);
    const ForwardTrace t = run_forward(model, batch.transpose(), model.layers.size());
    return t.post.back().row(0).transpose();
}

Eigen::MatrixXd code_values(const MlpModel &model, const Eigen::MatrixXd &batch) {
    if (model.architecture.kind != ArchitectureKind::linear_code)
        throw std::invalid_argument("code_values requires a linear_code model");
    check_batch(model, batch);
    const ForwardTrace t = run_forward(model, batch.transpose(), 1);
    return t.post.back().transpose();
}

double loss(const MlpModel &model, const Eigen::MatrixXd &batch, const Eigen::VectorXd &labels) {
    check_batch(model, batch);
    check_labels(batch, labels);
    const ForwardTrace t = run_forward(model, batch.transpose(), model.layers.size());
    return bce(t.post.back().row(0), labels.transpose());
}

LossAndGradients loss_and_gradients(const MlpModel &model, const Eigen::MatrixXd &batch,
                                    const Eigen::VectorXd &labels) {
    check_batch(model, batch);
    check_labels(batch, labels);
    for (Eigen::Index k = 0; k < labels.size(); ++k)
        if (labels(k) != 0.0 && labels(k) != 1.0)
            throw std::invalid_argument("labels must be 0 or 1");
    return loss_grad_columns(model, batch.transpose(), labels.transpose());
}

namespace {

class Optimizer {
  public:
    Optimizer(const MlpModel &model, const TrainConfig &config) : config_(config), lr_(config.learning_rate) {
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            m_w_.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
            v_w_.push_back(m_w_.back());
            m_b_.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
            v_b_.push_back(m_b_.back());
        }
    }

    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }

    void step(MlpModel &model, const Gradients &g) {
        ++t_;
        const double lr = lr_;
        if (config_.weight_decay > 0.0)
            for (auto &w : model.weights)
                w *= 1.0 - lr * config_.weight_decay;
        if (config_.optimizer.kind == OptimizerKind::sgd) {
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                model.weights[l] -= lr * g.weights[l];
                if (model.layers[l].has_bias)
                    model.biases[l] -= lr * g.biases[l];
            }
            return;
        }
        const auto &o = config_.optimizer;
        const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(t_));
        auto update = [&](auto &param, auto &m, auto &v, const auto &grad) {
            m = o.beta1 * m + (1.0 - o.beta1) * grad;
            v = o.beta2 * v + (1.0 - o.beta2) * grad.cwiseProduct(grad);
            param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + o.epsilon);
        };
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            update(model.weights[l], m_w_[l], v_w_[l], g.weights[l]);
            if (model.layers[l].has_bias)
                update(model.biases[l], m_b_[l], v_b_[l], g.biases[l]);
        }
    }

  private:
    TrainConfig config_;
    double lr_;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> m_w_, v_w_;
    std::vector<Eigen::VectorXd> m_b_, v_b_;
};

}  // namespace

TrainResult train(MlpModel model, const Dataset &train_ds, const Dataset &validation_ds, const TrainConfig &config) {
    config.validate();
    model.validate();
    if (train_ds.empty() || validation_ds.empty())
        throw std::invalid_argument("training and validation datasets must be non-empty");

    const Eigen::MatrixXd x_train = train_ds.feature_matrix().transpose();
    const Eigen::RowVectorXd y_train = train_ds.label_vector().transpose();
    const Eigen::MatrixXd x_val = validation_ds.feature_matrix().transpose();
    const Eigen::RowVectorXd y_val = validation_ds.label_vector().transpose();
    const auto n = static_cast<Eigen::Index>(train_ds.size());
    const Eigen::Index batch = std::min<Eigen::Index>(config.batch_size, n);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng = make_rng(config.seed, "shuffle");
    Optimizer opt(model, config);

    TrainHistory history;
    MlpModel best = model;
    double best_loss = std::numeric_limits<double>::infinity();
    int stale = 0;
    int plateau = 0;

    Eigen::MatrixXd xb(x_train.rows(), batch);
    Eigen::RowVectorXd yb(batch);
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index b = std::min(batch, n - start);
            xb.resize(x_train.rows(), b);
            yb.resize(b);
            for (Eigen::Index k = 0; k < b; ++k) {
                const auto src = order[static_cast<std::size_t>(start + k)];
                xb.col(k) = x_train.col(src);
                yb(k) = y_train(src);
            }
            const LossAndGradients lg = loss_grad_columns(model, xb, yb);
            if (!std::isfinite(lg.loss))
                throw TrainingDivergedError(epoch, "training diverged: non-finite loss in epoch " +
                                                       std::to_string(epoch));
            total += lg.loss * static_cast<double>(b);
            opt.step(model, lg.grads);
        }

        const ForwardTrace t = run_forward(model, x_val, model.layers.size());
        const Eigen::RowVectorXd scores = t.post.back().row(0);
        EpochRecord rec{total / static_cast<double>(n), bce(scores, y_val), accuracy_at_half(scores, y_val)};
        if (!std::isfinite(rec.validation_loss) || !std::isfinite(rec.train_loss))
            throw TrainingDivergedError(epoch, "training diverged: non-finite loss in epoch " +
                                                   std::to_string(epoch));
        history.epochs.push_back(rec);

        if (rec.validation_loss < best_loss) {
            best_loss = rec.validation_loss;
            best = model;
            history.best_epoch = epoch;
            stale = 0;
            plateau = 0;
            continue;
        }
        if (++stale >= config.patience)
            break;
        if (config.lr_plateau > 0 && ++plateau >= config.lr_plateau) {
            opt.set_learning_rate(std::max(config.min_learning_rate, opt.learning_rate() * config.lr_decay));
            plateau = 0;
        }
    }

    best.training_config = config;
    best.best_epoch = history.best_epoch;
    return {std::move(best), std::move(history)};
}

Eigen::MatrixXd code_weights(const MlpModel &model) {
    if (model.architecture.kind != ArchitectureKind::linear_code)
        throw std::invalid_argument("code weights exist only for linear_code models");
    return model.weights.front();
}

}  // namespace entwit
