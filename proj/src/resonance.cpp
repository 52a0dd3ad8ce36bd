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
#include "rbloc/resonance.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rbloc/io.hpp"

namespace rbloc
{
    namespace
    {
        void apply_phase_noise(CVector &x, const PhaseNoiseModel &noise, RngStream &rng)
        {
            if (noise.silent())
                return;
            const Eigen::VectorXd phi = sample_phase_noise(noise, static_cast<std::size_t>(x.size()), rng);
            for (Eigen::Index n = 0; n < x.size(); ++n)
                x(n) *= cplx(std::cos(phi(n)), std::sin(phi(n)));
        }
    }

    PaModel PaModel::from_db(double gain_db, double max_output_w)
    {
        PaModel pa{std::pow(10.0, gain_db / 10.0), max_output_w};
        pa.validate();
        return pa;
    }

    void PaModel::validate() const
    {
        if (!(max_gain >= 1.0) || !std::isfinite(max_gain))
            throw std::invalid_argument("PaModel: max_gain must be >= 1 (0 dB)");
        if (!(max_output_power > 0.0) || !std::isfinite(max_output_power))
            throw std::invalid_argument("PaModel: max_output_power must be positive");
    }

    double PaModel::output_power(double input_power) const
    {
        return std::min(max_gain * input_power, max_output_power);
    }

    void ResonanceSettings::validate() const
    {
        if (max_iterations < 1)
            throw std::invalid_argument("ResonanceSettings: max_iterations must be at least 1");
        if (!(convergence_rel > 0.0))
            throw std::invalid_argument("ResonanceSettings: convergence_rel must be positive");
        if (!(initial_power > 0.0) || !std::isfinite(initial_power))
            throw std::invalid_argument("ResonanceSettings: initial_power must be positive");
        if (!(collapse_floor_rel >= 0.0 && collapse_floor_rel < 1.0))
            throw std::invalid_argument("ResonanceSettings: collapse_floor_rel must lie in [0, 1)");
    }

    CVector mt_reflect(const CVector &received, double reflection_ratio, const PhaseNoiseModel &noise, RngStream &rng)
    {
        if (!(reflection_ratio >= 0.0 && reflection_ratio <= 1.0))
            throw std::invalid_argument("mt_reflect: reflection ratio must lie in [0, 1]");
        CVector out = std::sqrt(reflection_ratio) * received.conjugate();
        apply_phase_noise(out, noise, rng);
        return out;
    }

    CVector bs_process(const CVector &received, const PaModel &pa, const PhaseNoiseModel &noise, RngStream &rng)
    {
        const double p_in = total_power(received);
        if (p_in == 0.0)
            return CVector::Zero(received.size());
        const double g = std::sqrt(pa.output_power(p_in) / p_in);
        CVector out = g * received.conjugate();
        apply_phase_noise(out, noise, rng);
        return out;
    }

    CVector initial_excitation(std::size_t elements, double power, RngStream &rng)
    {
        CVector a(static_cast<Eigen::Index>(elements));
        const double amp = std::sqrt(power / double(elements));
        for (Eigen::Index m = 0; m < a.size(); ++m)
        {
            const double ph = rng.uniform(0.0, 2.0 * pi);
            a(m) = cplx(amp * std::cos(ph), amp * std::sin(ph));
        }
        return a;
    }

    ResonanceTrace iterate_resonance(const std::vector<MtLink> &links, const CVector &a0, const PaModel &pa,
                                     const PhaseNoiseModel &noise, const ResonanceSettings &settings, RngStream &rng)
    {
        settings.validate();
        if (links.empty())
            throw std::invalid_argument("iterate_resonance: at least one MT is required");
        for (const MtLink &l : links)
            if (l.H.bs_size() != a0.size())
                throw std::invalid_argument("iterate_resonance: channel width does not match the BS excitation");

        const std::size_t I = links.size();
        ResonanceTrace trace;
        CVector a = a0;
        std::vector<CVector> c(I);
        CVector r(a0.size());
        CVector ri(a0.size());

        for (std::size_t k = 0; k < settings.max_iterations; ++k)
        {
            IterationRecord rec;
            rec.bs_transmit_power = total_power(a);
            rec.mt_received_power.resize(I);
            rec.bs_received_power_from.resize(I);
            r.setZero();
            for (std::size_t i = 0; i < I; ++i)
            {
                const CVector b = links[i].H.apply(a);
                rec.mt_received_power[i] = total_power(b);
                c[i] = mt_reflect(b, links[i].reflection_ratio, noise, rng);
                ri = links[i].H.apply_transpose(c[i]);
                rec.bs_received_power_from[i] = total_power(ri);
                r += ri;
            }
            rec.bs_received_power = total_power(r);
            trace.per_iteration.push_back(rec);

            const double p_now = rec.bs_received_power;
            if (p_now == 0.0 || p_now < settings.collapse_floor_rel * settings.initial_power)
            {
                trace.collapsed = true;
                trace.diagnostic = "resonance-collapse";
                if (p_now == 0.0)
                {
                    // The BS has nothing left to amplify: record the silent cycle that follows.
                    IterationRecord dead;
                    dead.mt_received_power.assign(I, 0.0);
                    dead.bs_received_power_from.assign(I, 0.0);
                    trace.per_iteration.push_back(dead);
                    a.setZero();
                    for (auto &ci : c)
                        ci.setZero();
                }
                break;
            }
            if (k > 0)
            {
                const double p_prev = trace.per_iteration[k - 1].bs_received_power;
                if (std::abs(p_now - p_prev) < settings.convergence_rel * p_prev)
                {
                    trace.converged = true;
                    break;
                }
            }
            if (k + 1 == settings.max_iterations)
                break;

            if (settings.oracle_mode)
            {
                a = r.conjugate();
                apply_phase_noise(a, noise, rng);
                a *= std::sqrt(settings.initial_power / total_power(a));
            }
            else
            {
                a = bs_process(r, pa, noise, rng);
            }
        }

        trace.final_bs_excitation = a;
        trace.final_mt_excitations = c;
        return trace;
    }

    double transmission_efficiency(const ResonanceTrace &trace)
    {
        if (trace.per_iteration.empty())
            throw std::invalid_argument("transmission_efficiency: empty trace");
        const IterationRecord &rec = trace.last();
        if (!(rec.bs_transmit_power > 0.0))
            throw UndefinedEfficiencyError("transmission efficiency undefined: final BS transmit power is zero");
        double sum = 0.0;
        for (double p : rec.mt_received_power)
            sum += p;
        return sum / rec.bs_transmit_power;
    }

    void write_trace_csv(std::ostream &os, const ResonanceTrace &trace)
    {
        const std::size_t I = trace.per_iteration.empty() ? 0 : trace.per_iteration.front().mt_received_power.size();
        os << "iter,p_bs_rx_w,p_bs_tx_w";
        for (std::size_t i = 0; i < I; ++i)
            os << ",p_mt" << (i + 1) << "_rx_w";
        os << '\n';
        for (std::size_t k = 0; k < trace.per_iteration.size(); ++k)
        {
            const IterationRecord &rec = trace.per_iteration[k];
            os << k << ',' << fmt(rec.bs_received_power) << ',' << fmt(rec.bs_transmit_power);
            for (double p : rec.mt_received_power)
                os << ',' << fmt(p);
            os << '\n';
        }
    }
}
