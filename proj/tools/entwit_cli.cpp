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

// entwit: generate labeled two-qubit datasets, train witness networks,
// sweep the number of measurements and export the learned measurements.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "entwit/dataset.hpp"
#include "entwit/errors.hpp"
#include "entwit/io.hpp"
#include "entwit/nnet.hpp"
#include "entwit/witness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace entwit;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
std::vector<T> parse_list(const std::string &text, const char *flag) {
    std::vector<T> out;
    for (auto part : io::split(text, ',')) {
        if (part.empty())
            throw UsageError(std::string(flag) + ": empty list element");
        const auto value = io::parse_double(part);
        if (!value)
            throw UsageError(std::string(flag) + ": '" + std::string(part) + "' is not a number");
        out.push_back(static_cast<T>(*value));
        if (static_cast<double>(out.back()) != *value)
            throw UsageError(std::string(flag) + ": '" + std::string(part) + "' is not an integer");
    }
    return out;
}

SplitFractions parse_split(const std::string &text) {
    const auto v = parse_list<double>(text, "--split");
    if (v.size() != 3)
        throw UsageError("--split needs three fractions train,validation,test");
    const SplitFractions f{v[0], v[1], v[2]};
    if (!(f.train > 0 && f.validation > 0 && f.test > 0) || std::abs(f.train + f.validation + f.test - 1.0) > 1e-9)
        throw UsageError("--split fractions must be positive and sum to 1");
    return f;
}

Symmetry parse_symmetry_flag(const std::string &s) {
    try {
        return parse_symmetry(s);
    } catch (const std::invalid_argument &e) {
        throw UsageError(std::string("--symmetry: ") + e.what());
    }
}

fs::path sibling(const fs::path &out, const std::string &suffix) {
    fs::path p = out;
    p.replace_extension(suffix);
    return p;
}

void write_json(const fs::path &path, const json &j) { io::write_file_atomic(path, j.dump(2) + "\n"); }

// Flags shared by `train` and `sweep`.
struct TrainFlags {
    std::string hidden;
    int epochs = 200;
    int batch = 256;
    double lr = 1e-3;
    int patience = 10;
    int lr_plateau = 0;
    double weight_decay = 0.0;

    void add_to(CLI::App &cmd) {
        cmd.add_option("--hidden", hidden, "Comma-separated hidden widths (default depends on --arch)");
        cmd.add_option("--epochs", epochs, "Maximum epochs")->capture_default_str();
        cmd.add_option("--batch", batch, "Mini-batch size")->capture_default_str();
        cmd.add_option("--lr", lr, "Adam learning rate")->capture_default_str();
        cmd.add_option("--patience", patience, "Early-stopping patience in epochs")->capture_default_str();
        cmd.add_option("--lr-plateau", lr_plateau, "Halve the learning rate after this many stale epochs (0 = off)")
            ->capture_default_str();
        cmd.add_option("--weight-decay", weight_decay, "Decoupled weight decay")->capture_default_str();
    }

    TrainConfig config(std::uint64_t seed) const {
        TrainConfig c;
        c.learning_rate = lr;
        c.batch_size = batch;
        c.max_epochs = epochs;
        c.patience = patience;
        c.lr_plateau = lr_plateau;
        c.weight_decay = weight_decay;
        c.seed = seed;
        try {
            c.validate();
        } catch (const std::invalid_argument &e) {
            throw UsageError(e.what());
        }
        return c;
    }
};

struct GenFlags {
    std::int64_t n = 1000;
    std::uint64_t seed = 0;
    std::string symmetry = "none";
    int rank = 4;
    int workers = 1;
    bool balance = false;
    std::string out;
};

int cmd_gen(const GenFlags &f) {
    if (f.n < 1)
        throw UsageError("--n must be at least 1");
    if (f.rank < 1 || f.rank > 4)
        throw UsageError("--rank must lie in 1..4");
    const Symmetry symmetry = parse_symmetry_flag(f.symmetry);
    Dataset ds = generate(f.n, symmetry, f.seed, f.rank, f.workers);
    if (f.balance)
        ds = balance_classes(ds, f.seed);
    const fs::path out = f.out;
    save(ds, out);
    write_json(sibling(out, ".config.json"), {{"command", "gen"},
                                             {"n", f.n},
                                             {"seed", f.seed},
                                             {"symmetry", f.symmetry},
                                             {"rank", f.rank},
                                             {"balance", f.balance},
                                             {"out", f.out}});
    const Dataset check = load(out);
    if (check != ds)
        throw IntegrityError("written dataset does not read back identically");

    const auto separable = static_cast<std::int64_t>(std::llround(ds.manifest.separable_fraction * ds.manifest.count));
    std::printf("wrote %s: %lld samples, %lld separable (%.4f), %lld entangled\n", f.out.c_str(),
                static_cast<long long>(ds.manifest.count), static_cast<long long>(separable),
                ds.manifest.separable_fraction, static_cast<long long>(ds.manifest.count - separable));
    return 0;
}

struct TrainCmdFlags {
    std::string data;
    std::string arch = "full";
    int m = 3;
    std::uint64_t seed = 0;
    std::string split = "0.8,0.1,0.1";
    std::string out = "model.json";
    TrainFlags train;
};

Architecture architecture_from_flags(const std::string &arch, int m, const std::string &hidden) {
    std::vector<int> widths;
    if (!hidden.empty()) {
        widths = parse_list<int>(hidden, "--hidden");
        for (int w : widths)
            if (w < 1)
                throw UsageError("--hidden widths must be positive");
    }
    if (arch == "full")
        return widths.empty() ? Architecture::nonlinear_full() : Architecture::nonlinear_full(widths);
    if (arch == "linear") {
        if (m < 1 || m > static_cast<int>(kNumFeatures))
            throw UsageError("--m must lie in 1..15");
        return widths.empty() ? Architecture::linear_code(m) : Architecture::linear_code(m, widths);
    }
    throw UsageError("--arch must be 'full' or 'linear'");
}

int cmd_train(const TrainCmdFlags &f) {
    const Architecture arch = architecture_from_flags(f.arch, f.m, f.train.hidden);
    const SplitFractions fractions = parse_split(f.split);
    const TrainConfig config = f.train.config(derive_seed(f.seed, "shuffle"));

    const Dataset ds = load(f.data);
    const SplitDatasets parts = split(ds, fractions, derive_seed(f.seed, "split"));
    const TrainResult result = train(model_new(arch, derive_seed(f.seed, "init")), parts.train, parts.validation, config);

    const fs::path out = f.out;
    save_model(result.model, out);

    std::string history = "epoch,train_loss,validation_loss,validation_accuracy\n";
    for (std::size_t e = 0; e < result.history.epochs.size(); ++e) {
        const auto &r = result.history.epochs[e];
        history += std::to_string(e) + "," + io::format_double(r.train_loss) + "," +
                   io::format_double(r.validation_loss) + "," + io::format_double(r.validation_accuracy) + "\n";
    }
    io::write_file_atomic(sibling(out, ".history.csv"), history);

    const WitnessReport at_half = evaluate(result.model, parts.test, 0.5);
    json report = to_json(at_half);
    report["split"] = "test";
    report["best_epoch"] = result.history.best_epoch;
    try {
        const double t = calibrate_threshold(result.model, parts.validation);
        report["precision_one"] = {{"calibration", to_json(evaluate(result.model, parts.validation, t))},
                                   {"test", to_json(evaluate(result.model, parts.test, t))}};
    } catch (const CalibrationDegenerateError &e) {
        report["precision_one"] = {{"error", e.what()}};
    }
    write_json(sibling(out, ".report.json"), report);

    write_json(sibling(out, ".config.json"), {{"command", "train"},
                                             {"data", f.data},
                                             {"arch", f.arch},
                                             {"m", arch.m},
                                             {"hidden", arch.hidden},
                                             {"seed", f.seed},
                                             {"split", f.split},
                                             {"training_config", to_json(config)},
                                             {"out", f.out}});

    const MlpModel check = load_model(out);
    const Eigen::MatrixXd x = parts.test.feature_matrix();
    if (forward(check, x) != forward(result.model, x))
        throw IntegrityError("written model does not reproduce its scores");

    std::printf("trained %s (%zu parameters), best epoch %d; test accuracy %.4f precision %.4f recall %.4f\n",
                std::string(to_string(arch.kind)).c_str(), result.model.parameter_count(), result.history.best_epoch,
                at_half.accuracy, at_half.precision, at_half.recall);
    return 0;
}

struct SweepFlags {
    std::string m_values = "1,3,5,9,15";
    std::string seeds;
    std::uint64_t seed = 0;
    std::int64_t n = 250000;
    std::string symmetry = "none";
    int rank = 4;
    std::string split = "0.8,0.1,0.1";
    int workers = 1;
    std::string out = "sweep.csv";
    TrainFlags train;
};

int cmd_sweep(const SweepFlags &f) {
    SweepConfig cfg;
    cfg.m_values = parse_list<int>(f.m_values, "--m");
    for (int m : cfg.m_values)
        if (m < 1 || m > static_cast<int>(kNumFeatures))
            throw UsageError("--m values must lie in 1..15");
    cfg.seeds = f.seeds.empty() ? std::vector<std::uint64_t>{f.seed} : parse_list<std::uint64_t>(f.seeds, "--seeds");
    if (f.n < 10)
        throw UsageError("--n must be at least 10");
    cfg.count = f.n;
    cfg.symmetry = parse_symmetry_flag(f.symmetry);
    if (f.rank < 1 || f.rank > 4)
        throw UsageError("--rank must lie in 1..4");
    cfg.rank = f.rank;
    cfg.fractions = parse_split(f.split);
    cfg.workers = f.workers;
    if (!f.train.hidden.empty())
        cfg.hidden = architecture_from_flags("linear", 1, f.train.hidden).hidden;
    cfg.train = f.train.config(0);
    cfg.on_row = [](const SweepRow &row) {
        std::printf("m=%d seed=%llu accuracy=%.4f recall_p1=%.4f\n", row.m,
                    static_cast<unsigned long long>(row.seed), row.accuracy, row.recall_at_precision_one);
        std::fflush(stdout);
    };

    const SweepResult result = sweep_measurements(cfg);
    const fs::path out = f.out;
    io::write_file_atomic(out, to_csv(result));
    write_json(sibling(out, ".json"), to_json(result));
    write_json(sibling(out, ".config.json"), {{"command", "sweep"},
                                             {"m", cfg.m_values},
                                             {"seeds", cfg.seeds},
                                             {"n", f.n},
                                             {"symmetry", f.symmetry},
                                             {"rank", f.rank},
                                             {"split", f.split},
                                             {"hidden", cfg.hidden},
                                             {"training_config", to_json(cfg.train)},
                                             {"out", f.out}});
    return 0;
}

struct WeightsFlags {
    std::string model;
    std::string out;
};

int cmd_weights(const WeightsFlags &f) {
    const MlpModel model = load_model(f.model);
    if (model.architecture.kind != ArchitectureKind::linear_code)
        throw UsageError("--model must be a linear-code model (trained with --arch linear)");
    const Eigen::MatrixXd w = code_weights(model);
    std::string csv = std::string(kDatasetHeader).substr(0, std::string(kDatasetHeader).find(",label")) + "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            if (c)
                csv += ',';
            csv += io::format_double(w(r, c));
        }
        csv += '\n';
    }
    if (f.out.empty()) {
        std::cout << csv;
    } else {
        io::write_file_atomic(f.out, csv);
        write_json(sibling(f.out, ".config.json"), {{"command", "weights"}, {"model", f.model}, {"out", f.out}});
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Few-measurement entanglement witnesses for two-qubit states"};
    app.require_subcommand(1);

    GenFlags gen;
    auto *gen_cmd = app.add_subcommand("gen", "Generate a labeled dataset");
    gen_cmd->add_option("--n", gen.n, "Number of states")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Root seed")->capture_default_str();
    gen_cmd->add_option("--symmetry", gen.symmetry, "none | cylindrical")->capture_default_str();
    gen_cmd->add_option("--rank", gen.rank, "Ginibre rank 1..4")->capture_default_str();
    gen_cmd->add_option("--workers", gen.workers, "Generation threads")->capture_default_str();
    gen_cmd->add_flag("--balance", gen.balance, "Subsample the majority class");
    gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

    TrainCmdFlags tr;
    auto *train_cmd = app.add_subcommand("train", "Train a classifier on a dataset file");
    train_cmd->add_option("--data", tr.data, "Dataset CSV")->required();
    train_cmd->add_option("--arch", tr.arch, "full | linear")->capture_default_str();
    train_cmd->add_option("--m", tr.m, "Number of linear measurements (linear only)")->capture_default_str();
    train_cmd->add_option("--seed", tr.seed, "Root seed")->capture_default_str();
    train_cmd->add_option("--split", tr.split, "train,validation,test fractions")->capture_default_str();
    train_cmd->add_option("--out", tr.out, "Model JSON path")->capture_default_str();
    tr.train.add_to(*train_cmd);

    SweepFlags sw;
    auto *sweep_cmd = app.add_subcommand("sweep", "Train linear-code models over a list of m");
    sweep_cmd->add_option("--m", sw.m_values, "Comma-separated m values")->capture_default_str();
    sweep_cmd->add_option("--seeds", sw.seeds, "Comma-separated seeds (overrides --seed)");
    sweep_cmd->add_option("--seed", sw.seed, "Root seed")->capture_default_str();
    sweep_cmd->add_option("--n", sw.n, "States generated per seed")->capture_default_str();
    sweep_cmd->add_option("--symmetry", sw.symmetry, "none | cylindrical")->capture_default_str();
    sweep_cmd->add_option("--rank", sw.rank, "Ginibre rank 1..4")->capture_default_str();
    sweep_cmd->add_option("--split", sw.split, "train,validation,test fractions")->capture_default_str();
    sweep_cmd->add_option("--workers", sw.workers, "Cells trained concurrently")->capture_default_str();
    sweep_cmd->add_option("--out", sw.out, "Output CSV path")->capture_default_str();
    sw.train.add_to(*sweep_cmd);

    WeightsFlags wt;
    auto *weights_cmd = app.add_subcommand("weights", "Export the code-layer measurement matrix");
    weights_cmd->add_option("--model", wt.model, "Linear-code model JSON")->required();
    weights_cmd->add_option("--out", wt.out, "Output CSV path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen_cmd)
            return cmd_gen(gen);
        if (*train_cmd)
            return cmd_train(tr);
        if (*sweep_cmd)
            return cmd_sweep(sw);
        if (*weights_cmd)
            return cmd_weights(wt);
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
