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

#include <memory>

#include "rbloc/channel.hpp"
#include "rbloc/geometry.hpp"
#include "rbloc/types.hpp"

namespace rbloc
{
    // Applies one BS -> MT transfer matrix H and its transpose without forming H when the two
    // arrays are parallel lattices with equal spacing and axes aligned up to sign. Then
    // h_nm depends only on the lattice offset between the elements, H is block Toeplitz/Hankel,
    // and both products reduce to one 2-D circular convolution each.
    // Any other geometry falls back to the dense matrix.
    class LinkOperator
    {
    public:
        LinkOperator() = default;

        // Builds the operator for transfer_matrix(bs, mt, rf). Throws GeometryError under the
        // same conditions as transfer_matrix.
        static LinkOperator build(const ArrayGeometry &bs, const ArrayGeometry &mt, const RfConstants &rf,
                                  bool allow_structured = true);

        // Wraps an explicit matrix (rows = MT elements).
        static LinkOperator from_matrix(ChannelMatrix H);

        Eigen::Index bs_size() const { return bs_size_; }
        Eigen::Index mt_size() const { return mt_size_; }
        bool structured() const { return static_cast<bool>(kernel_); }

        CVector apply(const CVector &a) const;           // H a
        CVector apply_transpose(const CVector &c) const; // H^T c

        // Dense H, formed entry by entry from the kernel when structured.
        ChannelMatrix dense() const;

    private:
        struct Kernel;
        std::shared_ptr<const Kernel> kernel_;
        std::shared_ptr<const ChannelMatrix> matrix_;
        Eigen::Index bs_size_ = 0;
        Eigen::Index mt_size_ = 0;
    };
}
