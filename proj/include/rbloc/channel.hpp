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
#include <optional>
#include <vector>

#include "rbloc/geometry.hpp"
#include "rbloc/rng.hpp"
#include "rbloc/types.hpp"

namespace rbloc
{
    enum class ElementPattern
    {
        cosine,   // G_max * cos(angle), zero behind the array
        isotropic // G_max in every direction
    };

    struct RfConstants
    {
        double frequency = 30e9;      // Hz
        double wavelength = 0.0;      // m
        double wavenumber = 0.0;      // rad/m
        double wave_impedance = 376.730313668; // Ohm (free space)
        double max_gain = 3.1405;     // linear
        ElementPattern pattern = ElementPattern::cosine;

        // Derives wavelength and wavenumber from the carrier; max_gain given in dBi.
        static RfConstants from_frequency(double frequency_hz, double max_gain_dbi = 4.97,
                                          ElementPattern pattern = ElementPattern::cosine);
    };

    // Per-element gain at `angle` radians off boresight.
    double element_gain(double angle, const RfConstants &rf);

    // Gain of an element with unit boresight `n` towards the unit direction `u` (cosine = n.u).
    double element_gain_cos(double cos_angle, const RfConstants &rf);

    // Complex amplitude transfer from the elements of one array to those of another.
    // entries(n, m): from element m of `from` to element n of `to`.
    struct ChannelMatrix
    {
        CMatrix entries;

        Eigen::Index rows() const { return entries.rows(); }
        Eigen::Index cols() const { return entries.cols(); }
        ChannelMatrix transposed() const { return {entries.transpose()}; }
    };

    // Transfer coefficient for an element pair separated by diff = p_to - p_from, with element
    // boresights n_from and n_to. Throws GeometryError inside the 10-wavelength far-field guard.
    cplx link_coefficient(double dx, double dy, double dz, const Vec3 &n_from, const Vec3 &n_to, const RfConstants &rf);

    // h_nm = sqrt(G_from(m->n) G_to(n->m)) * lambda / (4 pi l_nm) * exp(j k l_nm).
    // Throws GeometryError if any element pair is closer than 10 wavelengths.
    ChannelMatrix transfer_matrix(const ArrayGeometry &from, const ArrayGeometry &to, const RfConstants &rf);

    // One flat segment of a single-sideband phase-noise PSD.
    struct PsdSegment
    {
        double f_lo = 0.0;      // Hz
        double f_hi = 0.0;      // Hz
        double level_dbc = 0.0; // dBc/Hz, -inf allowed
    };

    // sigma^2 = 2 * integral of 10^(L(f)/10) df over the union of segments.
    // Throws std::invalid_argument on an empty band or negative frequencies.
    double psd_to_variance(const std::vector<PsdSegment> &psd);

    // Convenience form for a single flat level over [f_min, f_max].
    double psd_to_variance(double level_dbc, double f_min, double f_max);

    struct PhaseNoiseModel
    {
        double variance = 0.0; // rad^2
        std::optional<std::vector<PsdSegment>> psd;

        static PhaseNoiseModel from_variance(double variance_rad2);
        static PhaseNoiseModel from_psd(std::vector<PsdSegment> psd);
        bool silent() const { return variance == 0.0; }
    };

    // `count` i.i.d. draws from N(0, variance); no draws are consumed when variance is zero.
    Eigen::VectorXd sample_phase_noise(const PhaseNoiseModel &model, std::size_t count, RngStream &rng);
}
