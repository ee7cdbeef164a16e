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

#ifndef ENTWIT_ERRORS_HPP
#define ENTWIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace entwit {

/// A numerical result violated a structural property it must have
/// (e.g. a trace that should be real carried an imaginary residue).
class NumericIntegrityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A file could not be parsed. The message names the first bad record.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A file parsed but its contents contradict themselves or their manifest.
class IntegrityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class TrainingDivergedError : public std::runtime_error {
  public:
    TrainingDivergedError(int epoch, const std::string &what)
        : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

  private:
    int epoch_;
};

/// No threshold below 1 separates every separable calibration sample from
/// the entangled ones.
class CalibrationDegenerateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace entwit

#endif
