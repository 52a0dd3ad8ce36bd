// SPDX-License-Identifier: Apache-2.0
//
// rbloc - resonant beam multi-target localization simulator
// Copyright (C) 2026 The rbloc authors
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
#pragma once

#include <cstddef>
#include <utility>

#include "rbloc/types.hpp"

namespace rbloc
{
    // A uniform planar array.
    // Element (ix, iy), with ix in [0, cols) along the local x axis and iy in [0, rows) along
    // the local y axis, is stored at column index iy * cols + ix of `positions` (x runs fastest).
    struct ArrayGeometry
    {
        std::size_t rows = 0;
        std::size_t cols = 0;
        double spacing = 0.0;        // m
        Eigen::Matrix3Xd positions;  // m, one column per element
        Vec3 boresight{0, 0, 1};     // unit normal of the array plane
        Vec3 center{0, 0, 0};        // centroid of the elements, m
        Vec3 x_axis{1, 0, 0};        // lattice direction of increasing ix
        Vec3 y_axis{0, 1, 0};        // lattice direction of increasing iy

        std::size_t size() const { return static_cast<std::size_t>(positions.cols()); }
        Vec3 position(std::size_t n) const { return positions.col(static_cast<Eigen::Index>(n)); }
    };

    // Placement of one mobile target relative to the BS (BS at the origin, boresight +z).
    struct MtPlacement
    {
        double range = 3.0;             // L, m
        double elevation = 0.0;         // theta, rad, measured from +z
        double azimuth = 0.0;           // phi, rad, measured from +x in the xy-plane
        std::size_t rows = 40;
        std::size_t cols = 40;
        double reflection_ratio = 0.004; // beta, power fraction

        // Throws std::invalid_argument on a violated invariant.
        // beta = 0 is accepted: it is the degenerate "no return path" case.
        void validate() const;
    };

    // Unit vector for polar angle theta (from +z) and azimuth phi (from +x).
    Vec3 direction_vector(double theta, double phi);

    // Inverse of direction_vector for a nonzero vector; theta in [0, pi], phi in (-pi, pi].
    std::pair<double, double> direction_angles(const Vec3 &v);

    // Rotation taking local +z onto `boresight`. The antiparallel case rotates by pi about +x.
    Eigen::Matrix3d boresight_rotation(const Vec3 &boresight);

    // Element (ix, iy) sits at origin + R * (ix * spacing, iy * spacing, 0), R = boresight_rotation.
    // `origin` is therefore the position of the first element, not the centroid.
    ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing,
                            const Vec3 &origin = Vec3::Zero(), const Vec3 &boresight = Vec3::UnitZ());

    // MT array with its centroid at L * direction_vector(theta, phi), parallel to the BS plane,
    // facing the BS (boresight -z).
    ArrayGeometry place_mt(const MtPlacement &placement, double spacing);
}
