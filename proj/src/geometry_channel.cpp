// SPDX-License-Identifier: Apache-2.0
//
// drisce - two-timescale channel estimation for active double-RIS systems
// Copyright (C) 2026 The drisce authors
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

#include "drisce/geometry_channel.hpp"

#include <string>

namespace drisce
{
    CMat vstack(const std::vector<CMat> &blocks)
    {
        if (blocks.empty())
            return {};
        const Eigen::Index cols = blocks.front().cols();
        Eigen::Index rows = 0;
        for (const auto &b : blocks)
        {
            if (b.cols() != cols)
                throw invalid_input("vstack: column mismatch");
            rows += b.rows();
        }
        CMat out(rows, cols);
        Eigen::Index r = 0;
        for (const auto &b : blocks)
        {
            out.middleRows(r, b.rows()) = b;
            r += b.rows();
        }
        return out;
    }

    CMat hstack(const std::vector<CMat> &blocks)
    {
        if (blocks.empty())
            return {};
        const Eigen::Index rows = blocks.front().rows();
        Eigen::Index cols = 0;
        for (const auto &b : blocks)
        {
            if (b.rows() != rows)
                throw invalid_input("hstack: row mismatch");
            cols += b.cols();
        }
        CMat out(rows, cols);
        Eigen::Index c = 0;
        for (const auto &b : blocks)
        {
            out.middleCols(c, b.cols()) = b;
            c += b.cols();
        }
        return out;
    }

    void UpaGeometry::validate() const
    {
        if (n_y < 1 || n_z < 1)
            throw invalid_input("UpaGeometry: n_y and n_z must be positive");
        if (!(spacing_over_wavelength > 0.0))
            throw invalid_input("UpaGeometry: spacing_over_wavelength must be positive");
    }

    CVec steering_vector(const UpaGeometry &geom, double x1, double x2)
    {
        const double scale = 1.0 / std::sqrt(static_cast<double>(geom.size()));
        CVec a(geom.size());
        for (int nz = 0; nz < geom.n_z; ++nz)
        {
            const cplx pz = std::polar(1.0, pi * nz * x1);
            for (int ny = 0; ny < geom.n_y; ++ny)
                a[nz * geom.n_y + ny] = scale * pz * std::polar(1.0, pi * ny * x2);
        }
        return a;
    }

    double distance(const Vec3 &a, const Vec3 &b)
    {
        const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }

    Direction direction_between(const Vec3 &from, const Vec3 &to)
    {
        const double dx = to.x - from.x, dy = to.y - from.y, dz = to.z - from.z;
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (r == 0.0)
            throw invalid_input("direction_between: coincident positions");
        Direction d;
        d.elevation = std::acos(std::clamp(dz / r, -1.0, 1.0));
        d.azimuth = std::atan2(dy, dx);
        if (d.azimuth == -pi)
            d.azimuth = pi;
        return d;
    }

    void Deployment::validate() const
    {
        if (distance(bs_pos, ris1_pos) == 0.0 || distance(bs_pos, ris2_pos) == 0.0 ||
            distance(ris1_pos, ris2_pos) == 0.0)
            throw invalid_input("Deployment: BS, RIS 1 and RIS 2 positions must be pairwise distinct");
        if (!(user_ring_min > 0.0) || user_ring_max < user_ring_min)
            throw invalid_input("Deployment: require 0 < user_ring_min <= user_ring_max");
    }

    LosAngles los_angles(const Deployment &deploy)
    {
        deploy.validate();
        LosAngles out;
        const std::array<Vec3, 2> ris{deploy.ris1_pos, deploy.ris2_pos};
        for (int i = 0; i < 2; ++i)
        {
            out.bs_side[i] = direction_between(deploy.bs_pos, ris[i]);
            out.ris_side[i] = direction_between(ris[i], deploy.bs_pos);
        }
        out.ris2_side = direction_between(deploy.ris2_pos, deploy.ris1_pos);
        out.ris1_side = direction_between(deploy.ris1_pos, deploy.ris2_pos);
        return out;
    }

    void PathLossParams::validate() const
    {
        for (const auto *c : {&los, &nlos})
        {
            if (!(c->a2 > 0.0))
                throw invalid_input("PathLossParams: a2 must be positive");
            if (c->shadow_sigma_db < 0.0)
                throw invalid_input("PathLossParams: shadow_sigma must be non-negative");
        }
    }

    double path_loss_db(const PathLossClass &cls, double distance_m, double shadow_db)
    {
        if (!(distance_m > 0.0))
            throw invalid_input("path_loss_db: distance must be positive");
        return cls.a1 + 10.0 * cls.a2 * std::log10(distance_m) + shadow_db;
    }

    void PathSet::validate() const
    {
        const auto n = gains.size();
        if (departure_elev.size() != n || departure_azim.size() != n || arrival_elev.size() != n ||
            arrival_azim.size() != n)
            throw invalid_input("PathSet: angle vectors must match the gain count");
        if (los_index && (*los_index < 0 || *los_index >= n))
            throw invalid_input("PathSet: los_index out of range");
    }

    PathSet draw_path_set(Rng &rng, const LinkSpec &link, int num_paths, const PathLossParams &pl)
    {
        if (num_paths < 1)
            throw invalid_input("draw_path_set: num_paths must be at least 1");
        pl.validate();

        const double d = distance(link.left_pos, link.right_pos);
        if (d == 0.0)
            throw invalid_input("draw_path_set: coincident link endpoints");

        std::uniform_real_distribution<double> elev(0.25 * pi, 0.75 * pi);
        std::uniform_real_distribution<double> azim(-0.5 * pi, 0.5 * pi);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> k2(0.0, 4.0);
        std::normal_distribution<double> std_normal(0.0, 1.0);

        PathSet ps;
        ps.gains.resize(num_paths);
        ps.departure_elev.resize(num_paths);
        ps.departure_azim.resize(num_paths);
        ps.arrival_elev.resize(num_paths);
        ps.arrival_azim.resize(num_paths);

        const bool pinned = link.cls != LinkClass::ris_user;
        for (int p = 0; p < num_paths; ++p)
        {
            if (p == 0 && pinned)
            {
                const Direction left = direction_between(link.left_pos, link.right_pos);
                const Direction right = direction_between(link.right_pos, link.left_pos);
                ps.departure_elev[p] = left.elevation;
                ps.departure_azim[p] = left.azimuth;
                ps.arrival_elev[p] = right.elevation;
                ps.arrival_azim[p] = right.azimuth;
            }
            else
            {
                ps.departure_elev[p] = elev(rng);
                ps.departure_azim[p] = azim(rng);
                ps.arrival_elev[p] = elev(rng);
                ps.arrival_azim[p] = azim(rng);
            }

            // The first path of every link carries the LoS constants
            const PathLossClass &cls = p == 0 ? pl.los : pl.nlos;
            const double shadow = cls.shadow_sigma_db * std_normal(rng);
            const double pl_db = path_loss_db(cls, d, shadow);
            double aleph = 1.0;
            if (pl.random_aleph)
            {
                const double K1 = unit(rng);
                const double K2 = k2(rng);
                aleph = std::pow(K1, 1.8) * std::pow(10.0, 0.1 * K2);
            }
            ps.gains[p] = complex_normal(rng, aleph * db_to_linear(-pl_db));
        }
        if (pinned)
            ps.los_index = 0;
        return ps;
    }

    CMat synth_bilinear(const UpaGeometry &left, const UpaGeometry &right, const PathSet &paths)
    {
        paths.validate();
        const int P = paths.size();
        const double norm = std::sqrt(static_cast<double>(left.size()) * right.size() / P);
        const double kl = 2.0 * left.spacing_over_wavelength;
        const double kr = 2.0 * right.spacing_over_wavelength;
        CMat out = CMat::Zero(left.size(), right.size());
        for (int p = 0; p < P; ++p)
        {
            const CVec al = steering_vector(left, kl * paths.departure_comp_ele(p), kl * paths.departure_comp_azi(p));
            const CVec ar = steering_vector(right, kr * paths.arrival_comp_ele(p), kr * paths.arrival_comp_azi(p));
            out.noalias() += (norm * paths.gains[p]) * al * ar.adjoint();
        }
        return out;
    }

    CVec synth_vector(const UpaGeometry &geom, const PathSet &paths)
    {
        paths.validate();
        const int P = paths.size();
        const double norm = std::sqrt(static_cast<double>(geom.size()) / P);
        const double k = 2.0 * geom.spacing_over_wavelength;
        CVec out = CVec::Zero(geom.size());
        for (int p = 0; p < P; ++p)
            out += (norm * paths.gains[p]) *
                   steering_vector(geom, k * paths.departure_comp_ele(p), k * paths.departure_comp_azi(p));
        return out;
    }

    CMat ChannelRealization::H(int i) const
    {
        const auto &users = h.at(i);
        if (users.empty())
            return {};
        CMat out(users.front().size(), static_cast<Eigen::Index>(users.size()));
        for (std::size_t u = 0; u < users.size(); ++u)
            out.col(static_cast<Eigen::Index>(u)) = users[u];
        return out;
    }

    ChannelRealization synth_channels(const SystemDims &dims, const PathSets &paths)
    {
        dims.bs.validate();
        dims.ris.validate();
        for (int i = 0; i < 2; ++i)
            if (static_cast<int>(paths.h[i].size()) != dims.users)
                throw invalid_input("synth_channels: user path set count does not match users");

        ChannelRealization chan;
        for (int i = 0; i < 2; ++i)
        {
            chan.F[i] = synth_bilinear(dims.bs, dims.ris, paths.f[i]);
            chan.f_paths[i] = paths.f[i];
            for (const auto &ps : paths.h[i])
                chan.h[i].push_back(synth_vector(dims.ris, ps));
            chan.h_paths[i] = paths.h[i];
        }
        chan.D = synth_bilinear(dims.ris, dims.ris, paths.d);
        chan.d_paths = paths.d;
        return chan;
    }

    std::vector<Vec3> draw_user_positions(Rng &rng, const Deployment &deploy, int users)
    {
        deploy.validate();
        std::uniform_real_distribution<double> radius(deploy.user_ring_min, deploy.user_ring_max);
        std::uniform_real_distribution<double> angle(-0.5 * pi, 0.5 * pi);
        std::vector<Vec3> out;
        out.reserve(users);
        for (int u = 0; u < users; ++u)
        {
            const double r = radius(rng);
            const double a = angle(rng);
            out.push_back({deploy.ris2_pos.x + r * std::cos(a), deploy.ris2_pos.y + r * std::sin(a), deploy.ris2_pos.z});
        }
        return out;
    }

    PathSets draw_all_paths(Rng &rng, const Deployment &deploy, const std::vector<Vec3> &users,
                            const PathCounts &counts, const PathLossParams &pl)
    {
        deploy.validate();
        PathSets out;
        const std::array<Vec3, 2> ris{deploy.ris1_pos, deploy.ris2_pos};
        for (int i = 0; i < 2; ++i)
            out.f[i] = draw_path_set(rng, {LinkClass::bs_ris, deploy.bs_pos, ris[i]}, counts.p_f, pl);
        out.d = draw_path_set(rng, {LinkClass::ris_ris, deploy.ris2_pos, deploy.ris1_pos}, counts.p_d, pl);
        for (int i = 0; i < 2; ++i)
            for (const auto &u : users)
                out.h[i].push_back(draw_path_set(rng, {LinkClass::ris_user, ris[i], u}, counts.p_h, pl));
        return out;
    }

    ChannelRealization apply_reflection_gain(ChannelRealization chan, double gain_db)
    {
        const double g = std::pow(10.0, gain_db / 20.0);
        for (int i = 0; i < 2; ++i)
        {
            chan.F[i] *= g;
            chan.f_paths[i].gains *= g;
        }
        chan.D *= g;
        chan.d_paths.gains *= g;
        return chan;
    }

} // namespace drisce
