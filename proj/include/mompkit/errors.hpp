// SPDX-License-Identifier: Apache-2.0
//
// mompkit - multidimensional sparse recovery, mmWave channel estimation and
// single-anchor indoor localization
// Copyright (C) 2026 mompkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MOMPKIT_ERRORS_HPP
#define MOMPKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mompkit
{

// Shape or index mismatch; messages name the offending axis.
struct shape_error : std::invalid_argument
{
    explicit shape_error(const std::string &msg) : std::invalid_argument(msg) {}
};

// A requested materialization would exceed a configured memory cap.
struct resource_error : std::runtime_error
{
    explicit resource_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Every candidate of a selection step was skipped (e.g. all-zero columns).
struct degenerate_problem_error : std::runtime_error
{
    explicit degenerate_problem_error(const std::string &msg) : std::runtime_error(msg) {}
};

// A matrix factorization failed (e.g. Cholesky on a non-PD Gram matrix).
struct decomposition_error : std::runtime_error
{
    explicit decomposition_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent experiment configuration.
struct config_error : std::runtime_error
{
    explicit config_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace mompkit

#endif
