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

#ifndef ENTWIT_DATASET_HPP
#define ENTWIT_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "entwit/quantum.hpp"

namespace entwit {

enum class Symmetry { none, cylindrical };
enum class Ensemble { ginibre_rank4, ginibre_rank_k };

std::string_view to_string(Symmetry s);
std::string_view to_string(Ensemble e);
/// Throws std::invalid_argument on unknown names.
Symmetry parse_symmetry(std::string_view name);
Ensemble parse_ensemble(std::string_view name);

struct LabeledSample {
    FeatureVector features;
    bool label = false;  // true = entangled
    double det_pt = 0.0;

    friend bool operator==(const LabeledSample &, const LabeledSample &) = default;
};

struct Manifest {
    std::uint64_t seed = 0;
    Ensemble ensemble = Ensemble::ginibre_rank4;
    int rank = 4;
    Symmetry symmetry = Symmetry::none;
    std::int64_t count = 0;
    double separable_fraction = 0.0;
    bool balanced = false;
    // Set on the parts produced by split().
    std::optional<std::string> role;
    std::optional<std::uint64_t> split_seed;

    friend bool operator==(const Manifest &, const Manifest &) = default;
};

struct Dataset {
    std::vector<LabeledSample> samples;
    Manifest manifest;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }

    /// Feature rows (size x 15) ready for the network.
    Eigen::MatrixXd feature_matrix() const;
    Eigen::VectorXd label_vector() const;

    friend bool operator==(const Dataset &, const Dataset &) = default;
};

/// Samples generated per independent RNG stream. Streams are keyed by
/// (seed, block index), so the output does not depend on `workers`.
inline constexpr std::size_t kGenerationBlock = 4096;

/// Draws `count` random states, optionally twirls them, and labels them
/// by the sign of the partial-transpose determinant (after twirling).
Dataset generate(std::int64_t count, Symmetry symmetry, std::uint64_t seed, int rank = 4, int workers = 1);

struct SplitFractions {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

struct SplitDatasets {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Deterministic shuffled partition. Train and validation sizes are the
/// rounded fractions of the total; test takes the remainder.
SplitDatasets split(const Dataset &ds, const SplitFractions &fractions, std::uint64_t seed);

/// Subsamples the majority class down to the minority count, keeping the
/// original relative order of the retained samples.
Dataset balance_classes(const Dataset &ds, std::uint64_t seed);

/// Recomputes count and separable_fraction from the samples.
void refresh_manifest(Dataset &ds);

std::filesystem::path manifest_path(const std::filesystem::path &csv_path);

/// Writes `<path>` (CSV) and `<path>.manifest.json`, each atomically.
void save(const Dataset &ds, const std::filesystem::path &path);

/// Throws ParseError on malformed content and IntegrityError when rows
/// disagree with the manifest, are truncated, or carry a label that
/// contradicts det_pt.
Dataset load(const std::filesystem::path &path);

extern const char *const kDatasetHeader;

}  // namespace entwit

#endif
