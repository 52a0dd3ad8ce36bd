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
#include "rbloc/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rbloc
{
    void MtPlacement::validate() const
    {
        if (!(range > 0.0) || !std::isfinite(range))
            throw std::invalid_argument("MtPlacement: range must be positive, got " + std::to_string(range));
        if (!(std::abs(elevation) < pi / 2.0))
            throw std::invalid_argument("MtPlacement: |elevation| must be below 90 deg");
        if (!std::isfinite(azimuth))
            throw std::invalid_argument("MtPlacement: azimuth must be finite");
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("MtPlacement: rows and cols must be at least 1");
        if (!(reflection_ratio >= 0.0 && reflection_ratio <= 1.0))
            throw std::invalid_argument("MtPlacement: reflection_ratio must lie in [0, 1]");
    }

    Vec3 direction_vector(double theta, double phi)
    {
        return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
    }

    std::pair<double, double> direction_angles(const Vec3 &v)
    {
        const double rho = std::hypot(v.x(), v.y());
        return {std::atan2(rho, v.z()), std::atan2(v.y(), v.x())};
    }

    Eigen::Matrix3d boresight_rotation(const Vec3 &boresight)
    {
        const double n = boresight.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw std::invalid_argument("boresight must be a finite nonzero vector");
        const Vec3 b = boresight / n;
        const Vec3 z = Vec3::UnitZ();

        const double c = z.dot(b);
        if (c > 1.0 - 1e-15)
            return Eigen::Matrix3d::Identity();
        if (c < -1.0 + 1e-15)
            return Eigen::AngleAxisd(pi, Vec3::UnitX()).toRotationMatrix();

        const Vec3 axis = z.cross(b).normalized();
        return Eigen::AngleAxisd(std::acos(c), axis).toRotationMatrix();
    }

    ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing, const Vec3 &origin, const Vec3 &boresight)
    {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("build_upa: rows and cols must be at least 1");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw std::invalid_argument("build_upa: spacing must be positive");

        const Eigen::Matrix3d R = boresight_rotation(boresight);

        ArrayGeometry g;
        g.rows = rows;
        g.cols = cols;
        g.spacing = spacing;
        g.boresight = R.col(2);
        g.x_axis = R.col(0);
        g.y_axis = R.col(1);
        g.positions.resize(3, static_cast<Eigen::Index>(rows * cols));

        for (std::size_t iy = 0; iy < rows; ++iy)
            for (std::size_t ix = 0; ix < cols; ++ix)
            {
                const Vec3 local(double(ix) * spacing, double(iy) * spacing, 0.0);
                g.positions.col(static_cast<Eigen::Index>(iy * cols + ix)) = origin + R * local;
            }

        g.center = g.positions.rowwise().mean();
        return g;
    }

    ArrayGeometry place_mt(const MtPlacement &placement, double spacing)
    {
        placement.validate();
        const Vec3 boresight = -Vec3::UnitZ();
        const Eigen::Matrix3d R = boresight_rotation(boresight);

        const Vec3 center = placement.range * direction_vector(placement.elevation, placement.azimuth);
        const Vec3 half_span(0.5 * double(placement.cols - 1) * spacing, 0.5 * double(placement.rows - 1) * spacing, 0.0);
        ArrayGeometry g = build_upa(placement.rows, placement.cols, spacing, center - R * half_span, boresight);
        g.center = center; // exact, avoids the rounding of the element mean
        return g;
    }
}
