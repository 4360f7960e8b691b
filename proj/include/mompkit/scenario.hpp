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

#ifndef MOMPKIT_SCENARIO_HPP
#define MOMPKIT_SCENARIO_HPP

#include <vector>

#include <Eigen/Dense>

#include "mompkit/paths.hpp"

namespace mompkit
{

// Axis-aligned rectangular room spanning [0,lx] x [0,ly] x [0,lz].
struct Room
{
    double lx = 6.0;
    double ly = 8.0;
    double lz = 3.0;
};

// Receiver (anchor) and transmitter (user) positions, strictly inside the room.
struct Placement
{
    Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
    Eigen::Vector3d user = Eigen::Vector3d::Zero();
};

struct TraceOptions
{
    double reflection_loss_db = 6.0;    // amplitude loss per bounce
    double wavelength_m = speed_of_light / 60e9;
    bool second_order = false;          // add double-bounce paths
};

// Image-method multipath for the room: the direct path followed by the six
// first-order reflections in fixed order (wall x=0, x=lx, y=0, y=ly, floor,
// ceiling), optionally followed by the visible second-order paths. Gains are
// free-space amplitude times per-bounce loss with propagation phase. The
// direction of arrival points from the anchor towards the incoming ray, the
// direction of departure from the user along the outgoing ray.
std::vector<PathParams> trace_paths(const Room &room, const Placement &placement, const TraceOptions &options = {});

// True class labels for a trace_paths result, by construction of its fixed
// path order: direct, then four wall bounces, then floor and ceiling, then
// (if present) second-order paths which count as spurious.
std::vector<PathClass> ground_truth_classes(const std::vector<PathParams> &paths);

} // namespace mompkit

#endif
