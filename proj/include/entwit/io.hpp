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

#ifndef ENTWIT_IO_HPP
#define ENTWIT_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace entwit::io {

/// Writes to a sibling temp file and renames it over `path`, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

std::string read_file(const std::filesystem::path &path);

/// Renders `v` with 17 significant digits, which reads
/// back bit-exactly through parse_double.
std::string format_double(double v);

/// Parses the whole of `text` or returns nullopt.
std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace entwit::io

#endif
