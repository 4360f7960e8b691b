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

#ifndef MOMPKIT_PATHS_HPP
#define MOMPKIT_PATHS_HPP

#include <complex>

#include <Eigen/Dense>

namespace mompkit
{

// Propagation speed used throughout (m/s).
inline constexpr double speed_of_light = 299792458.0;

// One true propagation path. Directions are unit vectors of direction
// cosines: `doa` points from the receiver towards the incoming ray, `dod`
// points from the transmitter along the outgoing ray. `delay_s` is the
// absolute propagation delay.
struct PathParams
{
    std::complex<double> gain{0.0, 0.0};
    Eigen::Vector3d doa = Eigen::Vector3d::Zero();
    Eigen::Vector3d dod = Eigen::Vector3d::Zero();
    double delay_s = 0.0;
};

// One recovered path. The z components of `doa` and `dod` carry the positive
// root of the unit-norm completion; `relative_delay_s` is measured from the
// start of the receive window. `valid` is false when the recovered horizontal
// components leave the unit circle, making the completion impossible.
struct PathEstimate
{
    Eigen::Vector3d doa = Eigen::Vector3d::Zero();
    Eigen::Vector3d dod = Eigen::Vector3d::Zero();
    double relative_delay_s = 0.0;
    double gain_mag = 0.0;
    std::complex<double> coefficient{0.0, 0.0};
    bool valid = true;
};

// Geometric family of a path, decided from its arrival/departure directions.
enum class PathClass
{
    line_of_sight,
    wall,          // single bounce off a vertical surface
    floor_ceiling, // single bounce off a horizontal surface
    spurious
};

} // namespace mompkit

#endif
