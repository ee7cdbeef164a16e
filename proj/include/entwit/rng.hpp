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

#ifndef ENTWIT_RNG_HPP
#define ENTWIT_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace entwit {

using Rng = std::mt19937_64;

/// Derives an independent 64-bit seed from a root seed, a stream label
/// ("data", "init", "shuffle", ...) and an index. Labels keep streams
/// decoupled so one component can be re-seeded without disturbing others.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t root, std::string_view label, std::uint64_t index = 0) {
    return Rng(derive_seed(root, label, index));
}

}  // namespace entwit

#endif
