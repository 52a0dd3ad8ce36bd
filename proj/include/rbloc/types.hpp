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

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rbloc
{
    using cplx = std::complex<double>;
    using Vec3 = Eigen::Vector3d;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RMatrix = Eigen::MatrixXd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0; // m/s

    inline constexpr double deg2rad(double deg) { return deg * pi / 180.0; }
    inline constexpr double rad2deg(double rad) { return rad * 180.0 / pi; }

    // Array placement that breaks a physical-model precondition (overlap, far-field guard).
    class GeometryError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Efficiency requested on a trace whose final transmit power is zero.
    class UndefinedEfficiencyError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Normalization of an all-zero field grid.
    class DegenerateGridError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Total power of a complex excitation vector (sum of |x_n|^2).
    inline double total_power(const CVector &x) { return x.squaredNorm(); }
}
