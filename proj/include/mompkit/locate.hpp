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

#ifndef MOMPKIT_LOCATE_HPP
#define MOMPKIT_LOCATE_HPP

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mompkit/paths.hpp"

namespace mompkit
{

// Acceptance bands of the direction-based path classifier. `elevation` bounds
// |sin| of elevation sums/differences, `azimuth` bounds the deviation of
// cos(azimuth difference) from -1 (opposite azimuths).
struct ClassifierThresholds
{
    double azimuth = 0.1;
    double elevation = 0.05;
};

// Classifies one path from the relation between its arrival and departure
// directions. Opposite azimuths with mirrored elevations mean line of sight
// or a horizontal bounce (equal-sign elevations); mirrored elevations alone
// mean a vertical bounce; anything else is spurious. Invalid estimates are
// always spurious.
PathClass classify_path(const PathEstimate &path, const ClassifierThresholds &thresholds);

struct ClockOffsetEstimate
{
    double clock_offset_s = 0.0;
    Eigen::Index rows_used = 0;
    bool dropped_degenerate = false; // some rows had a near-zero slope and were skipped
};

// Scalar least-squares estimate of the clock offset from the geometric
// consistency of secondary paths with the line-of-sight path, which must sit
// at index 0. Wall bounces preserve the vertical direction component scaled
// by total delay; floor/ceiling bounces preserve the horizontal one.
// Spurious or line-of-sight-classified secondaries are ignored. Returns
// nullopt when no usable row remains.
std::optional<ClockOffsetEstimate> estimate_clock_offset(const std::vector<PathEstimate> &paths,
                                                         const std::vector<PathClass> &classes);

// User position from the line-of-sight ray: anchor + c*(relative delay +
// clock offset)*doa. Returns nullopt when the absolute delay is negative.
std::optional<Eigen::Vector3d> locate_user(const Eigen::Vector3d &anchor, const PathEstimate &line_of_sight,
                                           double clock_offset_s);

enum class FixStatus
{
    located,
    no_detection
};

struct LocationFix
{
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double clock_offset_s = 0.0;
    FixStatus status = FixStatus::no_detection;
    Eigen::Index n_wall = 0;
    Eigen::Index n_floor_ceiling = 0;
    Eigen::Index n_spurious = 0;
    bool dropped_degenerate_rows = false;
};

// Full single-anchor fix: sorts paths by gain, requires the strongest one to
// classify as line of sight (fail closed otherwise), estimates the clock
// offset from the classified secondaries and intersects the line-of-sight
// ray. Classification counts are reported even when no fix is produced.
LocationFix localize(std::vector<PathEstimate> paths, const Eigen::Vector3d &anchor,
                     const ClassifierThresholds &thresholds);

} // namespace mompkit

#endif
