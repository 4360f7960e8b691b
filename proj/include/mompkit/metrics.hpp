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

#ifndef MOMPKIT_METRICS_HPP
#define MOMPKIT_METRICS_HPP

#include <vector>

#include <Eigen/Dense>

namespace mompkit
{

// Angle in radians between two unit direction vectors, clamped against
// rounding at 0 and pi.
double metric_doa_error(const Eigen::Vector3d &truth, const Eigen::Vector3d &estimate);

// Normalized mean squared error over all delay taps, in dB, floored at
// -300 dB. An all-zero truth is rejected. An all-zero estimate gives 0 dB.
double metric_nmse_db(const std::vector<Eigen::MatrixXcd> &truth, const std::vector<Eigen::MatrixXcd> &estimate);

// Absolute error of the best-matching estimated delay against the true
// secondary delay, after anchoring the estimated relative delays to the true
// main-path delay: the clock offset is taken as true_tau1 minus the first
// estimated relative delay. The minimum runs over the whole estimate list,
// so a main-path-only recovery scores |tau2 - tau1|; +inf for an empty list.
double metric_secondary_delay_error(double true_tau2_s, double true_tau1_s,
                                    const std::vector<double> &estimated_relative_delays_s);

// Percentile in [0, 100] with linear interpolation between closest ranks.
double percentile(std::vector<double> values, double p);

} // namespace mompkit

#endif
