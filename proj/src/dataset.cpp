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

#include "entwit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "entwit/errors.hpp"
#include "entwit/io.hpp"

namespace entwit {

using nlohmann::json;

const char *const kDatasetHeader = "g01,g02,g03,g10,g11,g12,g13,g20,g21,g22,g23,g30,g31,g32,g33,label,det_pt";

std::string_view to_string(Symmetry s) { return s == Symmetry::none ? "none" : "cylindrical"; }

std::string_view to_string(Ensemble e) { return e == Ensemble::ginibre_rank4 ? "ginibre_rank4" : "ginibre_rank_k"; }

Symmetry parse_symmetry(std::string_view name) {
    if (name == "none")
        return Symmetry::none;
    if (name == "cylindrical")
        return Symmetry::cylindrical;
    throw std::invalid_argument("unknown symmetry '" + std::string(name) + "'");
}

Ensemble parse_ensemble(std::string_view name) {
    if (name == "ginibre_rank4")
        return Ensemble::ginibre_rank4;
    if (name == "ginibre_rank_k")
        return Ensemble::ginibre_rank_k;
    throw std::invalid_argument("unknown ensemble '" + std::string(name) + "'");
}

Eigen::MatrixXd Dataset::feature_matrix() const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(kNumFeatures));
    for (std::size_t r = 0; r < samples.size(); ++r)
        for (std::size_t c = 0; c < kNumFeatures; ++c)
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = samples[r].features.gamma[c];
    return x;
}

Eigen::VectorXd Dataset::label_vector() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t r = 0; r < samples.size(); ++r)
        y(static_cast<Eigen::Index>(r)) = samples[r].label ? 1.0 : 0.0;
    return y;
}

void refresh_manifest(Dataset &ds) {
    const auto n = static_cast<std::int64_t>(ds.samples.size());
    const auto separable = std::count_if(ds.samples.begin(), ds.samples.end(),
                                         [](const LabeledSample &s) { return !s.label; });
    ds.manifest.count = n;
    ds.manifest.separable_fraction = n == 0 ? 0.0 : static_cast<double>(separable) / static_cast<double>(n);
}

namespace {

LabeledSample make_sample(Rng &rng, Symmetry symmetry, int rank) {
    DensityMatrix rho = random_density_matrix(rng, rank);
    if (symmetry == Symmetry::cylindrical)
        rho = twirl_cylindrical(rho);
    const auto label = is_entangled(rho);
    return {features_from_state(rho), label.entangled, label.det_pt};
}

}  // namespace

Dataset generate(std::int64_t count, Symmetry symmetry, std::uint64_t seed, int rank, int workers) {
    if (count < 1)
        throw std::invalid_argument("dataset count must be at least 1");
    if (rank < 1 || rank > 4)
        throw std::invalid_argument("rank must lie in 1..4");
    const auto n = static_cast<std::size_t>(count);
    const std::size_t blocks = (n + kGenerationBlock - 1) / kGenerationBlock;

    Dataset ds;
    ds.samples.resize(n);
    auto fill_block = [&](std::size_t b) {
        Rng rng = make_rng(seed, "data", b);
        const std::size_t end = std::min(n, (b + 1) * kGenerationBlock);
        for (std::size_t k = b * kGenerationBlock; k < end; ++k)
            ds.samples[k] = make_sample(rng, symmetry, rank);
    };

    const auto nworkers = static_cast<std::size_t>(std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, blocks));
    if (nworkers == 1) {
        for (std::size_t b = 0; b < blocks; ++b)
            fill_block(b);
    } else {
        std::vector<std::exception_ptr> errors(nworkers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < nworkers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t b = w; b < blocks; b += nworkers)
                        fill_block(b);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto &t : pool)
            t.join();
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    ds.manifest.seed = seed;
    ds.manifest.ensemble = rank == 4 ? Ensemble::ginibre_rank4 : Ensemble::ginibre_rank_k;
    ds.manifest.rank = rank;
    ds.manifest.symmetry = symmetry;
    refresh_manifest(ds);
    return ds;
}

SplitDatasets split(const Dataset &ds, const SplitFractions &f, std::uint64_t seed) {
    if (!(f.train > 0.0 && f.validation > 0.0 && f.test > 0.0))
        throw std::invalid_argument("split fractions must be positive");
    if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must sum to 1");
    const std::size_t n = ds.samples.size();
    const auto n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::llround(f.validation * static_cast<double>(n)));
    if (n_train + n_val > n)
        throw std::invalid_argument("split fractions leave no room for a test part");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(seed, "split");
    std::shuffle(order.begin(), order.end(), rng);

    auto part = [&](std::size_t begin, std::size_t end, const char *role) {
        Dataset out;
        out.samples.reserve(end - begin);
        for (std::size_t k = begin; k < end; ++k)
            out.samples.push_back(ds.samples[order[k]]);
        out.manifest = ds.manifest;
        out.manifest.role = role;
        out.manifest.split_seed = seed;
        refresh_manifest(out);
        return out;
    };
    return {part(0, n_train, "train"), part(n_train, n_train + n_val, "validation"),
            part(n_train + n_val, n, "test")};
}

Dataset balance_classes(const Dataset &ds, std::uint64_t seed) {
    std::vector<std::size_t> entangled, separable;
    for (std::size_t k = 0; k < ds.samples.size(); ++k)
        (ds.samples[k].label ? entangled : separable).push_back(k);
    auto &major = entangled.size() >= separable.size() ? entangled : separable;
    const std::size_t keep = std::min(entangled.size(), separable.size());
    Rng rng = make_rng(seed, "balance");
    std::shuffle(major.begin(), major.end(), rng);
    major.resize(keep);

    std::vector<std::size_t> kept(entangled);
    kept.insert(kept.end(), separable.begin(), separable.end());
    std::sort(kept.begin(), kept.end());

    Dataset out;
    out.manifest = ds.manifest;
    out.manifest.balanced = true;
    out.samples.reserve(kept.size());
    for (auto k : kept)
        out.samples.push_back(ds.samples[k]);
    refresh_manifest(out);
    return out;
}

std::filesystem::path manifest_path(const std::filesystem::path &csv_path) {
    std::filesystem::path p = csv_path;
    p += ".manifest.json";
    return p;
}

namespace {

json manifest_to_json(const Manifest &m) {
    json j;
    j["seed"] = m.seed;
    j["ensemble"] = std::string(to_string(m.ensemble));
    j["rank"] = m.rank;
    j["symmetry"] = std::string(to_string(m.symmetry));
    j["count"] = m.count;
    j["separable_fraction"] = m.separable_fraction;
    j["balanced"] = m.balanced;
    if (m.role)
        j["role"] = *m.role;
    if (m.split_seed)
        j["split_seed"] = *m.split_seed;
    return j;
}

Manifest manifest_from_json(const json &j) {
    Manifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.ensemble = parse_ensemble(j.at("ensemble").get<std::string>());
    m.rank = j.value("rank", 4);
    m.symmetry = parse_symmetry(j.at("symmetry").get<std::string>());
    m.count = j.at("count").get<std::int64_t>();
    m.separable_fraction = j.at("separable_fraction").get<double>();
    m.balanced = j.value("balanced", false);
    if (j.contains("role"))
        m.role = j.at("role").get<std::string>();
    if (j.contains("split_seed"))
        m.split_seed = j.at("split_seed").get<std::uint64_t>();
    return m;
}

}  // namespace

void save(const Dataset &ds, const std::filesystem::path &path) {
    if (static_cast<std::int64_t>(ds.samples.size()) != ds.manifest.count)
        throw IntegrityError("manifest count does not match the number of samples");
    std::string out;
    out.reserve(ds.samples.size() * 17 * 24 + 128);
    out += kDatasetHeader;
    out += '\n';
    for (const auto &s : ds.samples) {
        if (s.label != (s.det_pt < 0.0))
            throw IntegrityError("sample label contradicts det_pt sign");
        for (double g : s.features.gamma) {
            out += io::format_double(g);
            out += ',';
        }
        out += s.label ? '1' : '0';
        out += ',';
        out += io::format_double(s.det_pt);
        out += '\n';
    }
    io::write_file_atomic(path, out);
    io::write_file_atomic(manifest_path(path), manifest_to_json(ds.manifest).dump(2) + "\n");
}

Dataset load(const std::filesystem::path &path) {
    Dataset ds;
    try {
        ds.manifest = manifest_from_json(json::parse(io::read_file(manifest_path(path))));
    } catch (const json::exception &e) {
        throw ParseError(manifest_path(path).string() + ": " + e.what());
    }

    const std::string text = io::read_file(path);
    if (!text.empty() && text.back() != '\n')
        throw IntegrityError(path.string() + ": final record is truncated (no trailing newline)");
    auto lines = io::split(text, '\n');
    if (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty() || lines.front() != kDatasetHeader)
        throw ParseError(path.string() + ": line 1: missing or wrong header");

    ds.samples.reserve(lines.size() - 1);
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto where = path.string() + ": line " + std::to_string(ln + 1);
        const auto fields = io::split(lines[ln], ',');
        if (fields.size() != kNumFeatures + 2)
            throw ParseError(where + ": expected " + std::to_string(kNumFeatures + 2) + " fields, got " +
                             std::to_string(fields.size()));
        LabeledSample s;
        for (std::size_t c = 0; c < kNumFeatures; ++c) {
            const auto v = io::parse_double(fields[c]);
            if (!v)
                throw ParseError(where + ": bad number in column " + std::to_string(c + 1));
            s.features.gamma[c] = *v;
        }
        const auto label = fields[kNumFeatures];
        if (label != "0" && label != "1")
            throw ParseError(where + ": label must be 0 or 1");
        s.label = label == "1";
        const auto det = io::parse_double(fields[kNumFeatures + 1]);
        if (!det)
            throw ParseError(where + ": bad det_pt");
        s.det_pt = *det;
        if (s.label != (s.det_pt < 0.0))
            throw IntegrityError(where + ": label contradicts the sign of det_pt");
        ds.samples.push_back(s);
    }

    if (static_cast<std::int64_t>(ds.samples.size()) != ds.manifest.count)
        throw IntegrityError(path.string() + ": manifest declares " + std::to_string(ds.manifest.count) +
                             " samples but file holds " + std::to_string(ds.samples.size()));
    const double declared = ds.manifest.separable_fraction;
    refresh_manifest(ds);
    if (ds.manifest.separable_fraction != declared)
        throw IntegrityError(path.string() + ": separable_fraction disagrees with the labels");
    return ds;
}

}  // namespace entwit
