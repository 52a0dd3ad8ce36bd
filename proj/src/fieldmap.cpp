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
#include "rbloc/fieldmap.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "rbloc/io.hpp"
#include "rbloc/parallel.hpp"

namespace rbloc
{
    namespace
    {
        std::pair<double, double> parse_pair(const std::string &s, const std::string &key)
        {
            const auto x = s.find_first_of("xX");
            try
            {
                std::size_t used = 0;
                if (x == std::string::npos)
                {
                    const double a = std::stod(s, &used);
                    if (used != s.size())
                        throw std::invalid_argument(s);
                    return {a, a};
                }
                const std::string lhs = s.substr(0, x), rhs = s.substr(x + 1);
                const double a = std::stod(lhs, &used);
                if (used != lhs.size())
                    throw std::invalid_argument(s);
                const double b = std::stod(rhs, &used);
                if (used != rhs.size())
                    throw std::invalid_argument(s);
                return {a, b};
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("plane: bad value '" + s + "' for " + key);
            }
        }

        double parse_number(const std::string &s, const std::string &key)
        {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used == s.size() && std::isfinite(v))
                    return v;
            }
            catch (const std::exception &)
            {
            }
            throw std::invalid_argument("plane: bad value '" + s + "' for " + key);
        }

        std::size_t as_count(double v, const std::string &key)
        {
            if (!(v >= 1.0) || v != std::floor(v) || v > 1e6)
                throw std::invalid_argument("plane: " + key + " must be a positive integer");
            return static_cast<std::size_t>(v);
        }
    }

    PlaneSpec PlaneSpec::yoz(double x)
    {
        PlaneSpec p;
        p.name = "yoz";
        p.origin = {x, 0, 0};
        p.u_axis = {0, 1, 0};
        p.v_axis = {0, 0, 1};
        p.v0 = 2.0; // z in [0, 4]
        return p;
    }

    PlaneSpec PlaneSpec::xoy(double z)
    {
        PlaneSpec p;
        p.name = "xoy";
        p.origin = {0, 0, z};
        p.u_axis = {1, 0, 0};
        p.v_axis = {0, 1, 0};
        return p;
    }

    PlaneSpec PlaneSpec::xz(double y)
    {
        PlaneSpec p;
        p.name = "xz";
        p.origin = {0, y, 0};
        p.u_axis = {1, 0, 0};
        p.v_axis = {0, 0, 1};
        p.v0 = 2.0;
        return p;
    }

    PlaneSpec PlaneSpec::parse(const std::string &text)
    {
        const auto colon = text.find(':');
        const std::string kind = text.substr(0, colon);
        PlaneSpec p;
        char normal = 0;
        if (kind == "yoz")
            p = yoz(), normal = 'x';
        else if (kind == "xoy")
            p = xoy(0.0), normal = 'z';
        else if (kind == "xz")
            p = xz(), normal = 'y';
        else
            throw std::invalid_argument("plane: unknown plane '" + kind + "' (expected yoz, xoy or xz)");

        bool offset_given = false;
        if (colon != std::string::npos)
        {
            std::stringstream rest(text.substr(colon + 1));
            std::string item;
            while (std::getline(rest, item, ','))
            {
                const auto eq = item.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("plane: expected key=value, got '" + item + "'");
                const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
                if (key.size() == 1 && key[0] == normal)
                {
                    const double off = parse_number(value, key);
                    p.origin = (normal == 'x' ? Vec3(off, 0, 0) : normal == 'y' ? Vec3(0, off, 0) : Vec3(0, 0, off));
                    offset_given = true;
                }
                else if (key == "u0")
                    p.u0 = parse_number(value, key);
                else if (key == "v0")
                    p.v0 = parse_number(value, key);
                else if (key == "extent")
                    std::tie(p.extent_u, p.extent_v) = parse_pair(value, key);
                else if (key == "samples")
                {
                    const auto [a, b] = parse_pair(value, key);
                    p.samples_u = as_count(a, key);
                    p.samples_v = as_count(b, key);
                }
                else if (key == "mask")
                {
                    if (value != "0" && value != "1")
                        throw std::invalid_argument("plane: mask must be 0 or 1");
                    p.mask_near_field = value == "1";
                }
                else
                    throw std::invalid_argument("plane: unknown key '" + key + "' for " + kind);
            }
        }
        if (kind == "xoy" && !offset_given)
            throw std::invalid_argument("plane: xoy needs its height, e.g. xoy:z=3");
        p.validate();
        return p;
    }

    void PlaneSpec::validate() const
    {
        if (std::abs(u_axis.norm() - 1.0) > 1e-12 || std::abs(v_axis.norm() - 1.0) > 1e-12 ||
            std::abs(u_axis.dot(v_axis)) > 1e-12)
            throw std::invalid_argument("plane: axes must be orthonormal");
        if (!(extent_u >= 0.0) || !(extent_v >= 0.0) || !std::isfinite(extent_u) || !std::isfinite(extent_v))
            throw std::invalid_argument("plane: extent must be finite and non-negative");
        if (samples_u < 1 || samples_v < 1)
            throw std::invalid_argument("plane: samples must be at least 1");
        if (!origin.allFinite() || !std::isfinite(u0) || !std::isfinite(v0))
            throw std::invalid_argument("plane: origin must be finite");
    }

    double PlaneSpec::u(std::size_t iu) const
    {
        if (samples_u == 1)
            return u0;
        return u0 - 0.5 * extent_u + extent_u * double(iu) / double(samples_u - 1);
    }

    double PlaneSpec::v(std::size_t iv) const
    {
        if (samples_v == 1)
            return v0;
        return v0 - 0.5 * extent_v + extent_v * double(iv) / double(samples_v - 1);
    }

    Vec3 PlaneSpec::point(std::size_t iu, std::size_t iv) const { return origin + u(iu) * u_axis + v(iv) * v_axis; }

    std::string PlaneSpec::tag() const
    {
        const Vec3 n = u_axis.cross(v_axis);
        const double off = origin.dot(n);
        if (name == "xoy")
            return "xoy_z" + fmt(origin.z());
        if (off == 0.0)
            return name;
        if (name == "yoz")
            return "yoz_x" + fmt(origin.x());
        if (name == "xz")
            return "xz_y" + fmt(origin.y());
        return name;
    }

    FieldGrid radiate(const std::vector<Radiator> &radiators, const PlaneSpec &plane, const RfConstants &rf)
    {
        plane.validate();
        for (const Radiator &r : radiators)
            if (r.excitation.size() != static_cast<Eigen::Index>(r.array.size()))
                throw std::invalid_argument("radiate: excitation length does not match the array");

        const double guard = 10.0 * rf.wavelength;
        const double inv_4pi = 1.0 / (4.0 * pi);
        FieldGrid out;
        out.plane = plane;
        out.values = RMatrix::Zero(static_cast<Eigen::Index>(plane.samples_u), static_cast<Eigen::Index>(plane.samples_v));
        std::vector<unsigned char> masked(plane.samples_u * plane.samples_v, 0);

        parallel_for(plane.samples_v, [&](std::size_t iv) {
            for (std::size_t iu = 0; iu < plane.samples_u; ++iu)
            {
                const Vec3 p = plane.point(iu, iv);
                cplx field = 0.0;
                bool inside = false;
                for (const Radiator &r : radiators)
                {
                    const Vec3 &n = r.array.boresight;
                    for (std::size_t e = 0; e < r.array.size(); ++e)
                    {
                        const cplx a = r.excitation(static_cast<Eigen::Index>(e));
                        const Vec3 d = p - r.array.position(e);
                        const double dist = d.norm();
                        if (dist < guard)
                        {
                            inside = true;
                            break;
                        }
                        if (a == 0.0)
                            continue;
                        const double g = element_gain_cos(n.dot(d) / dist, rf);
                        if (g == 0.0)
                            continue;
                        const double kr = rf.wavenumber * dist;
                        field += a * (std::sqrt(g * inv_4pi) / dist) * cplx(std::cos(kr), std::sin(kr));
                    }
                    if (inside)
                        break;
                }
                if (inside)
                {
                    if (!plane.mask_near_field)
                        throw GeometryError("radiate: grid point within 10 wavelengths of a radiating element");
                    masked[iv * plane.samples_u + iu] = 1;
                    continue;
                }
                out.values(static_cast<Eigen::Index>(iu), static_cast<Eigen::Index>(iv)) = std::norm(field);
            }
        });
        for (unsigned char m : masked)
            out.masked += m;
        return out;
    }

    FieldGrid normalize(const FieldGrid &grid)
    {
        const double peak = grid.values.size() ? grid.values.maxCoeff() : 0.0;
        if (!(peak > 0.0) || !std::isfinite(peak))
            throw DegenerateGridError("normalize: grid has no positive maximum");
        FieldGrid out = grid;
        out.values = grid.values / peak;
        return out;
    }

    void write_fieldmap_csv(std::ostream &os, const FieldGrid &grid)
    {
        const PlaneSpec &p = grid.plane;
        auto vec = [](const Vec3 &v) { return fmt(v.x()) + ";" + fmt(v.y()) + ";" + fmt(v.z()); };
        os << "# plane=" << p.name << " origin=" << vec(p.origin) << " u_axis=" << vec(p.u_axis)
           << " v_axis=" << vec(p.v_axis) << " u0=" << fmt(p.u0) << " v0=" << fmt(p.v0)
           << " extent_m=" << fmt(p.extent_u) << "x" << fmt(p.extent_v) << " samples=" << p.samples_u << "x"
           << p.samples_v << " masked=" << grid.masked << "\n";
        os << "u,v,power_w_m2,power_normalized\n";

        const double peak = grid.values.size() ? grid.values.maxCoeff() : 0.0;
        for (std::size_t iv = 0; iv < p.samples_v; ++iv)
            for (std::size_t iu = 0; iu < p.samples_u; ++iu)
            {
                const double s = grid.values(static_cast<Eigen::Index>(iu), static_cast<Eigen::Index>(iv));
                os << fmt(p.u(iu)) << ',' << fmt(p.v(iv)) << ',' << fmt(s) << ',' << fmt(peak > 0.0 ? s / peak : 0.0)
                   << '\n';
            }
    }
}
