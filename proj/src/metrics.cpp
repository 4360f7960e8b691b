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

#include "mompkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mompkit/errors.hpp"

namespace mompkit
{

double metric_doa_error(const Eigen::Vector3d &truth, const Eigen::Vector3d &estimate)
{
    return std::acos(std::clamp(truth.dot(estimate), -1.0, 1.0));
}

double metric_nmse_db(const std::vector<Eigen::MatrixXcd> &truth, const std::vector<Eigen::MatrixXcd> &estimate)
{
    if (truth.size() != estimate.size())
        throw shape_error("got " + std::to_string(estimate.size()) + " estimated taps for " +
                          std::to_string(truth.size()) + " true taps");
    double err = 0.0, ref = 0.0;
    for (std::size_t d = 0; d < truth.size(); ++d)
    {
        if (truth[d].rows() != estimate[d].rows() || truth[d].cols() != estimate[d].cols())
            throw shape_error("tap " + std::to_string(d) + " size mismatch");
        err += (estimate[d] - truth[d]).squaredNorm();
        ref += truth[d].squaredNorm();
    }
    if (ref == 0.0)
        throw std::invalid_argument("true channel is identically zero");
    return std::max(-300.0, 10.0 * std::log10(err / ref));
}

double metric_secondary_delay_error(double true_tau2_s, double true_tau1_s,
                                    const std::vector<double> &estimated_relative_delays_s)
{
    if (estimated_relative_delays_s.empty())
        return std::numeric_limits<double>::infinity();
    // The main path anchors the clock; the nearest estimate overall scores,
    // so a main-path-only recovery degrades to |tau2 - tau1|.
    const double offset = true_tau1_s - estimated_relative_delays_s[0];
    double best = std::numeric_limits<double>::infinity();
    for (const double rel : estimated_relative_delays_s)
        best = std::min(best, std::abs(true_tau2_s - (rel + offset)));
    return best;
}

double percentile(std::vector<double> values, double p)
{
    if (values.empty())
        throw std::invalid_argument("percentile of an empty sample");
    if (std::isnan(p) || p < 0.0 || p > 100.0)
        throw std::invalid_argument("percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    if (lo + 1 >= values.size())
        return values.back();
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

} // namespace mompkit
