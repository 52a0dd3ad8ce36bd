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
#include <iosfwd>
#include <string>
#include <vector>

#include "rbloc/channel.hpp"
#include "rbloc/geometry.hpp"
#include "rbloc/types.hpp"

namespace rbloc
{
    // Rectangular sampling window on a plane. Sample (iu, iv) sits at
    // origin + u(iu) * u_axis + v(iv) * v_axis, where u and v run over
    // [u0 - extent_u / 2, u0 + extent_u / 2] and likewise for v.
    struct PlaneSpec
    {
        std::string name = "custom"; // yoz, xoy, xz or custom
        Vec3 origin{0, 0, 0};
        Vec3 u_axis{1, 0, 0};
        Vec3 v_axis{0, 1, 0};
        double u0 = 0.0, v0 = 0.0;   // window centre in plane coordinates, m
        double extent_u = 4.0, extent_v = 4.0; // m
        std::size_t samples_u = 201, samples_v = 201;
        bool mask_near_field = false; // zero points inside the guard instead of throwing

        static PlaneSpec yoz(double x = 0.0);
        static PlaneSpec xoy(double z);
        static PlaneSpec xz(double y = 0.0);

        // "<plane>[:key=value,...]" with plane in {yoz, xoy, xz}; keys x|y|z (offset along the
        // normal), u0, v0, extent (a or aXb), samples (n or nXm), mask (0|1).
        static PlaneSpec parse(const std::string &text);

        void validate() const;
        double u(std::size_t iu) const;
        double v(std::size_t iv) const;
        Vec3 point(std::size_t iu, std::size_t iv) const;

        // File-name tag: the plane name plus its offset, e.g. "xoy_z3".
        std::string tag() const;
    };

    // One radiating array with complex element amplitudes (|a_n|^2 in W).
    struct Radiator
    {
        ArrayGeometry array;
        CVector excitation;
    };

    struct FieldGrid
    {
        PlaneSpec plane;
        RMatrix values;           // W/m^2, values(iu, iv)
        std::size_t masked = 0;   // points zeroed by the near-field mask
    };

    // Power density of the coherent superposition of every radiator:
    // S = | sum_n a_n sqrt(G(n -> p) / (4 pi)) exp(j k r) / r |^2.
    // Throws GeometryError when a point is within 10 wavelengths of an element (unless masked).
    FieldGrid radiate(const std::vector<Radiator> &radiators, const PlaneSpec &plane, const RfConstants &rf);

    // values / max(values). Throws DegenerateGridError for an all-zero grid.
    FieldGrid normalize(const FieldGrid &grid);

    // One comment line of plane metadata, the column row, then u, v, power_w_m2, power_normalized
    // with u running fastest.
    void write_fieldmap_csv(std::ostream &os, const FieldGrid &grid);
}
