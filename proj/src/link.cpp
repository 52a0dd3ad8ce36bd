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
#include "rbloc/link.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace rbloc
{
    struct LinkOperator::Kernel
    {
        Eigen::Index mx = 0, my = 0; // BS cols, rows
        Eigen::Index nx = 0, ny = 0; // MT cols, rows
        int sx = 1, sy = 1;          // MT axis = s * BS axis
        Eigen::Index px = 0, py = 0; // FFT sizes
        CMatrix values;              // lx x ly lattice-offset kernel
        CMatrix spectrum;            // px x py, FFT of the zero-padded kernel over (px * py)
        fftw_plan forward = nullptr;
        fftw_plan backward = nullptr;

        ~Kernel();
    };

    namespace
    {
        // Smallest 2^a 3^b 5^c 7^d >= n.
        Eigen::Index fft_size(Eigen::Index n)
        {
            for (Eigen::Index m = n;; ++m)
            {
                Eigen::Index r = m;
                for (Eigen::Index f : {2, 3, 5, 7})
                    while (r % f == 0)
                        r /= f;
                if (r == 1)
                    return m;
            }
        }

        // FFTW's planner is not thread-safe; execution with new arrays is.
        std::mutex &planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        // fftw_malloc'd scratch of one 2-D transform, reused per thread.
        struct Scratch
        {
            fftw_complex *data = nullptr;
            std::size_t size = 0;

            fftw_complex *get(std::size_t n)
            {
                if (n > size)
                {
                    fftw_free(data);
                    data = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n));
                    if (!data)
                        throw std::bad_alloc();
                    size = n;
                }
                return data;
            }
            ~Scratch() { fftw_free(data); }
        };

        cplx *as_cplx(fftw_complex *p) { return reinterpret_cast<cplx *>(p); }

        Eigen::Index wrap(Eigen::Index i, Eigen::Index p) { return ((i % p) + p) % p; }

        // Sign s with a == s * b for unit vectors, or 0 when neither matches.
        int axis_sign(const Vec3 &a, const Vec3 &b)
        {
            if ((a - b).norm() < 1e-12)
                return 1;
            if ((a + b).norm() < 1e-12)
                return -1;
            return 0;
        }

        // Kernel index of the MT/BS element pair (j, i) along one axis.
        Eigen::Index kernel_index(int s, Eigen::Index j, Eigen::Index i, Eigen::Index m)
        {
            return s > 0 ? j - i + m - 1 : j + i;
        }
    }

    LinkOperator::Kernel::~Kernel()
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward)
            fftw_destroy_plan(forward);
        if (backward)
            fftw_destroy_plan(backward);
    }

    LinkOperator LinkOperator::build(const ArrayGeometry &bs, const ArrayGeometry &mt, const RfConstants &rf,
                                     bool allow_structured)
    {
        const int sx = axis_sign(mt.x_axis, bs.x_axis);
        const int sy = axis_sign(mt.y_axis, bs.y_axis);
        const bool lattice = allow_structured && sx != 0 && sy != 0 && bs.rows * bs.cols == bs.size() &&
                             mt.rows * mt.cols == mt.size() && std::abs(mt.spacing - bs.spacing) <= 1e-12 * bs.spacing;
        if (!lattice)
            return from_matrix(transfer_matrix(bs, mt, rf));

        auto k = std::make_shared<Kernel>();
        k->mx = static_cast<Eigen::Index>(bs.cols);
        k->my = static_cast<Eigen::Index>(bs.rows);
        k->nx = static_cast<Eigen::Index>(mt.cols);
        k->ny = static_cast<Eigen::Index>(mt.rows);
        k->sx = sx;
        k->sy = sy;
        const Eigen::Index lx = k->mx + k->nx - 1;
        const Eigen::Index ly = k->my + k->ny - 1;
        k->px = fft_size(lx);
        k->py = fft_size(ly);

        const Vec3 d0 = mt.position(0) - bs.position(0);
        const Vec3 ex = bs.spacing * bs.x_axis;
        const Vec3 ey = bs.spacing * bs.y_axis;
        k->values.resize(lx, ly);
        for (Eigen::Index ky = 0; ky < ly; ++ky)
        {
            const double uy = sy > 0 ? double(ky - (k->my - 1)) : -double(ky);
            for (Eigen::Index kx = 0; kx < lx; ++kx)
            {
                const double ux = sx > 0 ? double(kx - (k->mx - 1)) : -double(kx);
                const Vec3 diff = d0 + ux * ex + uy * ey;
                k->values(kx, ky) = link_coefficient(diff.x(), diff.y(), diff.z(), bs.boresight, mt.boresight, rf);
            }
        }

        // Column-major px x py storage is row-major py x px for FFTW. ESTIMATE plans keep the
        // arithmetic identical from run to run.
        const std::size_t cells = static_cast<std::size_t>(k->px * k->py);
        Scratch plan_buf;
        fftw_complex *buf = plan_buf.get(cells);
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            k->forward = fftw_plan_dft_2d(int(k->py), int(k->px), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            k->backward = fftw_plan_dft_2d(int(k->py), int(k->px), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        if (!k->forward || !k->backward)
            throw std::runtime_error("LinkOperator: FFT planning failed");

        Eigen::Map<CMatrix> padded(as_cplx(buf), k->px, k->py);
        padded.setZero();
        padded.topLeftCorner(lx, ly) = k->values;
        fftw_execute_dft(k->forward, buf, buf);
        k->spectrum = padded / double(cells);

        LinkOperator op;
        op.bs_size_ = static_cast<Eigen::Index>(bs.size());
        op.mt_size_ = static_cast<Eigen::Index>(mt.size());
        op.kernel_ = std::move(k);
        return op;
    }

    LinkOperator LinkOperator::from_matrix(ChannelMatrix H)
    {
        LinkOperator op;
        op.bs_size_ = H.cols();
        op.mt_size_ = H.rows();
        op.matrix_ = std::make_shared<const ChannelMatrix>(std::move(H));
        return op;
    }

    CVector LinkOperator::apply(const CVector &a) const
    {
        if (a.size() != bs_size_)
            throw std::invalid_argument("LinkOperator::apply: length does not match the BS array");
        if (matrix_)
            return matrix_->entries * a;
        if (!kernel_)
            throw std::logic_error("LinkOperator: empty operator");

        const Kernel &k = *kernel_;
        thread_local Scratch scratch;
        fftw_complex *raw = scratch.get(static_cast<std::size_t>(k.px * k.py));
        Eigen::Map<CMatrix> buf(as_cplx(raw), k.px, k.py);
        buf.setZero();
        for (Eigen::Index iy = 0; iy < k.my; ++iy)
            for (Eigen::Index ix = 0; ix < k.mx; ++ix)
                buf(k.sx > 0 ? ix : wrap(-ix, k.px), k.sy > 0 ? iy : wrap(-iy, k.py)) = a(iy * k.mx + ix);
        fftw_execute_dft(k.forward, raw, raw);
        buf.array() *= k.spectrum.array();
        fftw_execute_dft(k.backward, raw, raw);

        CVector b(mt_size_);
        for (Eigen::Index jy = 0; jy < k.ny; ++jy)
            for (Eigen::Index jx = 0; jx < k.nx; ++jx)
                b(jy * k.nx + jx) = buf(k.sx > 0 ? jx + k.mx - 1 : jx, k.sy > 0 ? jy + k.my - 1 : jy);
        return b;
    }

    CVector LinkOperator::apply_transpose(const CVector &c) const
    {
        if (c.size() != mt_size_)
            throw std::invalid_argument("LinkOperator::apply_transpose: length does not match the MT array");
        if (matrix_)
            return matrix_->entries.transpose() * c;
        if (!kernel_)
            throw std::logic_error("LinkOperator: empty operator");

        const Kernel &k = *kernel_;
        thread_local Scratch scratch;
        fftw_complex *raw = scratch.get(static_cast<std::size_t>(k.px * k.py));
        Eigen::Map<CMatrix> buf(as_cplx(raw), k.px, k.py);
        buf.setZero();
        for (Eigen::Index jy = 0; jy < k.ny; ++jy)
            for (Eigen::Index jx = 0; jx < k.nx; ++jx)
                buf(wrap(-jx, k.px), wrap(-jy, k.py)) = c(jy * k.nx + jx);
        fftw_execute_dft(k.forward, raw, raw);
        buf.array() *= k.spectrum.array();
        fftw_execute_dft(k.backward, raw, raw);

        CVector r(bs_size_);
        for (Eigen::Index iy = 0; iy < k.my; ++iy)
            for (Eigen::Index ix = 0; ix < k.mx; ++ix)
                r(iy * k.mx + ix) = buf(k.sx > 0 ? k.mx - 1 - ix : ix, k.sy > 0 ? k.my - 1 - iy : iy);
        return r;
    }

    ChannelMatrix LinkOperator::dense() const
    {
        if (matrix_)
            return *matrix_;
        if (!kernel_)
            throw std::logic_error("LinkOperator: empty operator");
        const Kernel &k = *kernel_;
        ChannelMatrix H{CMatrix(mt_size_, bs_size_)};
        for (Eigen::Index iy = 0; iy < k.my; ++iy)
            for (Eigen::Index ix = 0; ix < k.mx; ++ix)
                for (Eigen::Index jy = 0; jy < k.ny; ++jy)
                    for (Eigen::Index jx = 0; jx < k.nx; ++jx)
                        H.entries(jy * k.nx + jx, iy * k.mx + ix) =
                            k.values(kernel_index(k.sx, jx, ix, k.mx), kernel_index(k.sy, jy, iy, k.my));
        return H;
    }
}
