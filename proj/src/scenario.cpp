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

#include "mompkit/scenario.hpp"

#include <cmath>

#include "mompkit/errors.hpp"

namespace mompkit
{

static constexpr double pi = 3.141592653589793238462643383279502884;

namespace
{

struct Plane
{
    int axis;     // 0, 1 or 2
    double coord; // plane position along that axis
};

Eigen::Vector3d mirror(const Eigen::Vector3d &p, const Plane &plane)
{
    Eigen::Vector3d out = p;
    out[plane.axis] = 2.0 * plane.coord - p[plane.axis];
    return out;
}

// Intersection of segment from->to with the plane, restricted to the room
// face. Returns false for parallel segments, hits outside the open segment
// or outside the face rectangle.
bool face_hit(const Eigen::Vector3d &from, const Eigen::Vector3d &to, const Plane &plane, const Room &room,
              Eigen::Vector3d &hit)
{
    const double denom = from[plane.axis] - to[plane.axis];
    if (denom == 0.0)
        return false;
    const double t = (from[plane.axis] - plane.coord) / denom;
    if (t <= 0.0 || t >= 1.0)
        return false;
    hit = from + t * (to - from);
    const double lims[3] = {room.lx, room.ly, room.lz};
    for (int ax = 0; ax < 3; ++ax)
    {
        if (ax == plane.axis)
            continue;
        if (hit[ax] < 0.0 || hit[ax] > lims[ax])
            return false;
    }
    return true;
}

std::complex<double> path_gain(double distance, int bounces, const TraceOptions &options)
{
    const double loss = std::pow(10.0, -static_cast<double>(bounces) * options.reflection_loss_db / 20.0);
    const double amp = options.wavelength_m / (4.0 * pi * distance) * loss;
    const double phase = -2.0 * pi * distance / options.wavelength_m;
    return std::polar(amp, phase);
}

} // namespace

std::vector<PathParams> trace_paths(const Room &room, const Placement &placement, const TraceOptions &options)
{
    const double lims[3] = {room.lx, room.ly, room.lz};
    for (int ax = 0; ax < 3; ++ax)
    {
        if (!(lims[ax] > 0.0))
            throw config_error("room extents must be positive");
        if (placement.anchor[ax] <= 0.0 || placement.anchor[ax] >= lims[ax] || placement.user[ax] <= 0.0 ||
            placement.user[ax] >= lims[ax])
            throw config_error("anchor and user must lie strictly inside the room");
    }
    if (!(options.wavelength_m > 0.0) || options.reflection_loss_db < 0.0)
        throw config_error("wavelength must be positive and reflection loss non-negative");

    const Eigen::Vector3d &a = placement.anchor;
    const Eigen::Vector3d &u = placement.user;
    const Plane planes[6] = {{0, 0.0}, {0, room.lx}, {1, 0.0}, {1, room.ly}, {2, 0.0}, {2, room.lz}};

    std::vector<PathParams> paths;
    paths.reserve(options.second_order ? 37 : 7);

    {
        PathParams p;
        const double d = (u - a).norm();
        if (d == 0.0)
            throw config_error("anchor and user coincide");
        p.doa = (u - a) / d;
        p.dod = (a - u) / d;
        p.delay_s = d / speed_of_light;
        p.gain = path_gain(d, 0, options);
        paths.push_back(p);
    }

    for (const Plane &plane : planes)
    {
        PathParams p;
        const Eigen::Vector3d ui = mirror(u, plane);
        const Eigen::Vector3d ai = mirror(a, plane);
        const double d = (ui - a).norm();
        p.doa = (ui - a) / d;
        p.dod = (ai - u) / d;
        p.delay_s = d / speed_of_light;
        p.gain = path_gain(d, 1, options);
        paths.push_back(p);
    }

    if (options.second_order)
    {
        std::vector<Eigen::Vector3d> seen;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
            {
                if (i == j)
                    continue;
                // Ray order: user -> plane i -> plane j -> anchor.
                const Eigen::Vector3d image = mirror(mirror(u, planes[i]), planes[j]);
                Eigen::Vector3d hit_j, hit_i;
                if (!face_hit(a, image, planes[j], room, hit_j))
                    continue;
                const Eigen::Vector3d inner = mirror(image, planes[j]); // = mirror(u, plane i)
                if (!face_hit(hit_j, inner, planes[i], room, hit_i))
                    continue;

                bool duplicate = false;
                for (const Eigen::Vector3d &s : seen)
                    if ((s - image).norm() < 1e-9)
                        duplicate = true;
                if (duplicate)
                    continue;
                seen.push_back(image);

                PathParams p;
                const double d = (image - a).norm();
                p.doa = (image - a) / d;
                p.dod = (hit_i - u).normalized();
                p.delay_s = d / speed_of_light;
                p.gain = path_gain(d, 2, options);
                paths.push_back(p);
            }
    }
    return paths;
}

std::vector<PathClass> ground_truth_classes(const std::vector<PathParams> &paths)
{
    if (paths.size() < 7)
        throw shape_error("expected a full traced path list (direct plus six reflections)");
    std::vector<PathClass> classes(paths.size(), PathClass::spurious);
    classes[0] = PathClass::line_of_sight;
    for (std::size_t l = 1; l <= 4; ++l)
        classes[l] = PathClass::wall;
    classes[5] = PathClass::floor_ceiling;
    classes[6] = PathClass::floor_ceiling;
    return classes;
}

} // namespace mompkit
