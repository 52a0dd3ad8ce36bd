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
#include "rbloc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rbloc
{
    RfConstants RfConstants::from_frequency(double frequency_hz, double max_gain_dbi, ElementPattern pattern)
    {
        if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
            throw std::invalid_argument("RfConstants: frequency must be positive");
        RfConstants rf;
        rf.frequency = frequency_hz;
        rf.wavelength = speed_of_light / frequency_hz;
        rf.wavenumber = 2.0 * pi / rf.wavelength;
        rf.max_gain = std::pow(10.0, max_gain_dbi / 10.0);
        rf.pattern = pattern;
        return rf;
    }

    double element_gain_cos(double cos_angle, const RfConstants &rf)
    {
        if (rf.pattern == ElementPattern::isotropic)
            return rf.max_gain;
        return cos_angle > 0.0 ? rf.max_gain * cos_angle : 0.0;
    }

    double element_gain(double angle, const RfConstants &rf)
    {
        if (rf.pattern == ElementPattern::isotropic)
            return rf.max_gain;
        if (!(std::abs(angle) < pi / 2.0))
            return 0.0;
        return rf.max_gain * std::cos(angle);
    }

    cplx link_coefficient(double dx, double dy, double dz, const Vec3 &n_from, const Vec3 &n_to, const RfConstants &rf)
    {
        // Every term is symmetric under swapping the two ends (diff -> -diff, n_from <-> n_to),
        // so the reverse channel is the exact transpose.
        const double l = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (!(l > 10.0 * rf.wavelength))
            throw GeometryError("element pair " + std::to_string(l) + " m apart is inside the 10-wavelength far-field guard");

        const double proj_f = n_from.x() * dx + n_from.y() * dy + n_from.z() * dz;
        const double proj_t = n_to.x() * -dx + n_to.y() * -dy + n_to.z() * -dz;
        const double g = element_gain_cos(proj_f / l, rf) * element_gain_cos(proj_t / l, rf);
        const double amp = std::sqrt(g) * (rf.wavelength / (4.0 * pi)) / l;
        const double ph = rf.wavenumber * l;
        return {amp * std::cos(ph), amp * std::sin(ph)};
    }

    ChannelMatrix transfer_matrix(const ArrayGeometry &from, const ArrayGeometry &to, const RfConstants &rf)
    {
        const auto M = static_cast<Eigen::Index>(from.size());
        const auto N = static_cast<Eigen::Index>(to.size());

        ChannelMatrix H{CMatrix(N, M)};
        for (Eigen::Index m = 0; m < M; ++m)
        {
            const double fx = from.positions(0, m), fy = from.positions(1, m), fz = from.positions(2, m);
            for (Eigen::Index n = 0; n < N; ++n)
                H.entries(n, m) = link_coefficient(to.positions(0, n) - fx, to.positions(1, n) - fy,
                                                   to.positions(2, n) - fz, from.boresight, to.boresight, rf);
        }
        return H;
    }

    double psd_to_variance(const std::vector<PsdSegment> &psd)
    {
        if (psd.empty())
            throw std::invalid_argument("psd_to_variance: no segments");

        std::vector<PsdSegment> sorted = psd;
        std::sort(sorted.begin(), sorted.end(), [](const PsdSegment &a, const PsdSegment &b) { return a.f_lo < b.f_lo; });

        double sum = 0.0;
        for (std::size_t i = 0; i < sorted.size(); ++i)
        {
            const PsdSegment &s = sorted[i];
            if (!(s.f_lo > 0.0) || !(s.f_hi > s.f_lo) || !std::isfinite(s.f_hi))
                throw std::invalid_argument("psd_to_variance: segment needs 0 < f_lo < f_hi");
            if (i > 0 && s.f_lo < sorted[i - 1].f_hi)
                throw std::invalid_argument("psd_to_variance: segments overlap");
            if (std::isnan(s.level_dbc) || s.level_dbc == std::numeric_limits<double>::infinity())
                throw std::invalid_argument("psd_to_variance: level must be finite or -inf");
            sum += std::pow(10.0, s.level_dbc / 10.0) * (s.f_hi - s.f_lo);
        }
        return 2.0 * sum;
    }

    double psd_to_variance(double level_dbc, double f_min, double f_max)
    {
        return psd_to_variance(std::vector<PsdSegment>{{f_min, f_max, level_dbc}});
    }

    PhaseNoiseModel PhaseNoiseModel::from_variance(double variance_rad2)
    {
        if (!(variance_rad2 >= 0.0) || !std::isfinite(variance_rad2))
            throw std::invalid_argument("PhaseNoiseModel: variance must be finite and nonnegative");
        PhaseNoiseModel m;
        m.variance = variance_rad2;
        return m;
    }

    PhaseNoiseModel PhaseNoiseModel::from_psd(std::vector<PsdSegment> psd)
    {
        PhaseNoiseModel m;
        m.variance = psd_to_variance(psd);
        m.psd = std::move(psd);
        return m;
    }

    Eigen::VectorXd sample_phase_noise(const PhaseNoiseModel &model, std::size_t count, RngStream &rng)
    {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
        if (model.silent())
            return out;
        const double sigma = std::sqrt(model.variance);
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out(i) = sigma * rng.normal();
        return out;
    }
}
