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

#ifndef DRISCE_GEOMETRY_CHANNEL_HPP
#define DRISCE_GEOMETRY_CHANNEL_HPP

#include "drisce/linalg.hpp"

#include <array>
#include <optional>
#include <vector>

namespace drisce
{
    // Uniform planar array in the local y-z plane, boresight along +x.
    // Element (n_z, n_y) sits at index n_z * n_y_count + n_y.
    struct UpaGeometry
    {
        int n_y = 1;
        int n_z = 1;
        double spacing_over_wavelength = 0.5; // d / lambda

        int size() const { return n_y * n_z; }
        void validate() const;
    };

    // Unit-norm UPA response for dimensionless spatial frequencies (x1 on z, x2 on y).
    // a = 1/sqrt(N) [e^{j pi n_z x1}]_{n_z} (kron) [e^{j pi n_y x2}]_{n_y}
    CVec steering_vector(const UpaGeometry &geom, double x1, double x2);

    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;
    };

    // Direction of a line segment in an array's local frame.
    // elevation is measured from +z, azimuth from +x toward +y.
    struct Direction
    {
        double elevation = 0.5 * pi;
        double azimuth = 0.0;

        double comp_ele() const { return std::cos(elevation); }
        double comp_azi() const { return std::sin(elevation) * std::sin(azimuth); }
    };

    Direction direction_between(const Vec3 &from, const Vec3 &to);
    double distance(const Vec3 &a, const Vec3 &b);

    struct Deployment
    {
        Vec3 bs_pos{0.0, 0.0, 5.0};
        Vec3 ris1_pos{10.0 * std::numbers::sqrt2, 10.0 * std::numbers::sqrt2, 6.0};
        Vec3 ris2_pos{10.0 * std::numbers::sqrt2 + 100.0, 10.0 * std::numbers::sqrt2, 6.0};
        double user_ring_min = 1.0;
        double user_ring_max = 30.0;

        void validate() const;
    };

    // LoS directions of the slow links. Index 0 is RIS 1, index 1 is RIS 2.
    struct LosAngles
    {
        std::array<Direction, 2> bs_side{};  // at the BS toward RIS i
        std::array<Direction, 2> ris_side{}; // at RIS i toward the BS
        Direction ris2_side;                 // at RIS 2 toward RIS 1
        Direction ris1_side;                 // at RIS 1 toward RIS 2
    };

    LosAngles los_angles(const Deployment &deploy);

    struct PathLossClass
    {
        double a1 = 0.0;
        double a2 = 1.0;
        double shadow_sigma_db = 0.0;
    };

    // PL = a1 + 10 a2 log10(d) + N(0, sigma^2) [dB]; gains ~ CN(0, aleph 10^{-0.1 PL})
    // with aleph = K1^1.8 10^{0.1 K2}, K1 ~ U(0,1), K2 ~ N(0, 16).
    struct PathLossParams
    {
        PathLossClass los{61.4, 2.0, 5.8};
        PathLossClass nlos{72.0, 2.92, 8.7};
        bool random_aleph = true;

        void validate() const;
    };

    double path_loss_db(const PathLossClass &cls, double distance_m, double shadow_db = 0.0);

    enum class LinkClass
    {
        bs_ris,
        ris_ris,
        ris_user
    };

    struct PathSet
    {
        CVec gains; // linear, one per path
        // departure_* parameterize the left (row-side) array, arrival_* the right (column-side) array
        RVec departure_elev, departure_azim;
        RVec arrival_elev, arrival_azim;
        std::optional<int> los_index;

        int size() const { return static_cast<int>(gains.size()); }
        void validate() const;

        double departure_comp_ele(int p) const { return std::cos(departure_elev[p]); }
        double departure_comp_azi(int p) const { return std::sin(departure_elev[p]) * std::sin(departure_azim[p]); }
        double arrival_comp_ele(int p) const { return std::cos(arrival_elev[p]); }
        double arrival_comp_azi(int p) const { return std::sin(arrival_elev[p]) * std::sin(arrival_azim[p]); }
    };

    // Endpoints of one link. left is the array on the matrix row side
    // (the BS for F, RIS 2 for D, the RIS for h), right the column side.
    struct LinkSpec
    {
        LinkClass cls = LinkClass::ris_user;
        Vec3 left_pos;
        Vec3 right_pos;
    };

    PathSet draw_path_set(Rng &rng, const LinkSpec &link, int num_paths, const PathLossParams &pl);

    struct SystemDims
    {
        UpaGeometry bs;
        UpaGeometry ris;
        int users = 1;
    };

    struct ChannelRealization
    {
        std::array<CMat, 2> F; // J x L, BS <- RIS i
        CMat D;                // L x L, RIS 2 <- RIS 1
        // h[i][u], length L, RIS i <- user u
        std::array<std::vector<CVec>, 2> h;

        std::array<PathSet, 2> f_paths;
        PathSet d_paths;
        std::array<std::vector<PathSet>, 2> h_paths;

        // Stacked user channels [h_{i,1}, ..., h_{i,U}]
        CMat H(int i) const;
    };

    // F = sqrt(LJ/P) sum_p alpha_p a_B a_L^H
    CMat synth_bilinear(const UpaGeometry &left, const UpaGeometry &right, const PathSet &paths);
    // h = sqrt(L/P) sum_c gamma_c a_L
    CVec synth_vector(const UpaGeometry &geom, const PathSet &paths);

    struct PathSets
    {
        std::array<PathSet, 2> f;
        PathSet d;
        std::array<std::vector<PathSet>, 2> h;
    };

    ChannelRealization synth_channels(const SystemDims &dims, const PathSets &paths);

    struct PathCounts
    {
        int p_f = 3;
        int p_d = 3;
        int p_h = 3;
    };

    // Users uniformly on the front half-ring around RIS 2 at the RIS height
    std::vector<Vec3> draw_user_positions(Rng &rng, const Deployment &deploy, int users);

    PathSets draw_all_paths(Rng &rng, const Deployment &deploy, const std::vector<Vec3> &users,
                            const PathCounts &counts, const PathLossParams &pl);

    // Scales the reflected links (F_i once, D once) by the active-RIS amplitude gain.
    // Path gains are scaled alongside so re-synthesis stays exact.
    ChannelRealization apply_reflection_gain(ChannelRealization chan, double gain_db);

} // namespace drisce

#endif
