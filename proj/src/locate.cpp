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

#include "mompkit/locate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mompkit/errors.hpp"

namespace mompkit
{

// Slopes below this are numerically meaningless for the scalar ranging fit.
static constexpr double degenerate_slope = 1e-9;

PathClass classify_path(const PathEstimate &path, const ClassifierThresholds &thresholds)
{
    if (!path.valid)
        return PathClass::spurious;

    const double doa_az = std::atan2(path.doa.y(), path.doa.x());
    const double dod_az = std::atan2(path.dod.y(), path.dod.x());
    const double doa_el = std::asin(std::clamp(path.doa.z(), -1.0, 1.0));
    const double dod_el = std::asin(std::clamp(path.dod.z(), -1.0, 1.0));

    const bool mirrored = std::abs(std::sin(doa_el + dod_el)) < thresholds.elevation;
    const bool equal_sign = std::abs(std::sin(doa_el - dod_el)) < thresholds.elevation;
    const bool opposite_az = std::cos(doa_az - dod_az) < thresholds.azimuth - 1.0;

    if (mirrored && opposite_az)
        return PathClass::line_of_sight;
    if (equal_sign && opposite_az)
        return PathClass::floor_ceiling;
    if (mirrored)
        return PathClass::wall;
    return PathClass::spurious;
}

std::optional<ClockOffsetEstimate> estimate_clock_offset(const std::vector<PathEstimate> &paths,
                                                         const std::vector<PathClass> &classes)
{
    if (paths.size() != classes.size())
        throw shape_error("got " + std::to_string(classes.size()) + " classes for " +
                          std::to_string(paths.size()) + " paths");
    if (paths.size() < 2)
        return std::nullopt;

    const PathEstimate &los = paths[0];
    const double los_z = los.doa.z();
    const double los_h = std::hypot(los.doa.x(), los.doa.y());

    // Each usable secondary contributes one row a*tau0 = b of the scalar
    // least-squares ranging system.
    ClockOffsetEstimate est;
    double ata = 0.0, atb = 0.0;
    for (std::size_t l = 1; l < paths.size(); ++l)
    {
        const PathEstimate &p = paths[l];
        double a, b;
        if (classes[l] == PathClass::wall)
        {
            a = p.doa.z() - los_z;
            b = los_z * los.relative_delay_s - p.doa.z() * p.relative_delay_s;
        }
        else if (classes[l] == PathClass::floor_ceiling)
        {
            const double h = std::hypot(p.doa.x(), p.doa.y());
            a = h - los_h;
            b = los_h * los.relative_delay_s - h * p.relative_delay_s;
        }
        else
            continue;
        if (std::abs(a) <= degenerate_slope)
        {
            est.dropped_degenerate = true;
            continue;
        }
        ata += a * a;
        atb += a * b;
        ++est.rows_used;
    }
    if (est.rows_used == 0)
        return std::nullopt;
    est.clock_offset_s = atb / ata;
    return est;
}

std::optional<Eigen::Vector3d> locate_user(const Eigen::Vector3d &anchor, const PathEstimate &line_of_sight,
                                           double clock_offset_s)
{
    const double total_delay = line_of_sight.relative_delay_s + clock_offset_s;
    if (total_delay < 0.0)
        return std::nullopt;
    return anchor + speed_of_light * total_delay * line_of_sight.doa;
}

LocationFix localize(std::vector<PathEstimate> paths, const Eigen::Vector3d &anchor,
                     const ClassifierThresholds &thresholds)
{
    LocationFix fix;
    std::stable_sort(paths.begin(), paths.end(),
                     [](const PathEstimate &a, const PathEstimate &b) { return a.gain_mag > b.gain_mag; });

    std::vector<PathClass> classes(paths.size(), PathClass::spurious);
    for (std::size_t l = 1; l < paths.size(); ++l)
    {
        classes[l] = classify_path(paths[l], thresholds);
        if (classes[l] == PathClass::wall)
            ++fix.n_wall;
        else if (classes[l] == PathClass::floor_ceiling)
            ++fix.n_floor_ceiling;
        else
            ++fix.n_spurious;
    }
    if (paths.empty())
        return fix;

    // The strongest path must itself look like line of sight; fail closed.
    classes[0] = classify_path(paths[0], thresholds);
    if (classes[0] != PathClass::line_of_sight)
        return fix;

    const std::optional<ClockOffsetEstimate> offset = estimate_clock_offset(paths, classes);
    if (!offset)
        return fix;
    fix.clock_offset_s = offset->clock_offset_s;
    fix.dropped_degenerate_rows = offset->dropped_degenerate;

    const std::optional<Eigen::Vector3d> position = locate_user(anchor, paths[0], offset->clock_offset_s);
    if (!position)
        return fix;
    fix.position = *position;
    fix.status = FixStatus::located;
    return fix;
}

} // namespace mompkit
