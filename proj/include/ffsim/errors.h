// Copyright 2026 The ffsim Authors
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

#ifndef FFSIM_ERRORS_H
#define FFSIM_ERRORS_H

#include <stdexcept>
#include <string>

namespace ffsim {

/// A parameter lies outside its physical or structural domain.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A truncated photon-number window discards more tail mass than allowed.
struct TruncationError : std::runtime_error {
    TruncationError(const std::string &what, std::size_t required_n_max)
        : std::runtime_error(what), required_n_max(required_n_max) {}
    std::size_t required_n_max;
};

/// A statistic is undefined for the given input, e.g. g2 of a zero-mean state.
struct UndefinedStatisticError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Conditioning removed every event (zero total probability mass or no heralds).
struct EmptyEnsembleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Measured inputs contradict each other under the assumed model.
struct InconsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An experiment configuration cannot be run as given.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ffsim

#endif
