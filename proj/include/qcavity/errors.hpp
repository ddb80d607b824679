// Copyright 2026 The qcavity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qcavity {

// Invalid arguments to a builder or operation (bad labels, dimension
// mismatch, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Scenario configuration rejected. `path` is the dotted key path, e.g.
// "initial.photons".
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string path, const std::string& reason)
        : std::runtime_error(path + ": " + reason), path_(std::move(path))
    {
    }
    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

// Integration aborted: trace/norm drift beyond tolerance or non-finite state.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string& what, double time)
        : std::runtime_error(what), time_(time)
    {
    }
    double time() const noexcept { return time_; }

  private:
    double time_;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qcavity
