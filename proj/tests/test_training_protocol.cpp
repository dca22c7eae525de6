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

#include "drisce/training_protocol.hpp"

#include <doctest.h>

using namespace drisce;

namespace
{
    struct Scene
    {
        SystemDims dims{{2, 2, 0.5}, {3, 3, 0.5}, 3};
        ChannelRealization chan;
    };

    Scene make_scene(std::uint64_t seed)
    {
        Scene s;
        Rng rng(seed);
        const Deployment dep;
        PathLossParams pl;
        pl.random_aleph = false;
        const auto users = draw_user_positions(rng, dep, s.dims.users);
        s.chan = apply_reflection_gain(synth_channels(s.dims, draw_all_paths(rng, dep, users, {3, 3, 3}, pl)), 100.0);
        return s;
    }

    CVec hadamard(const CVec &a, const CVec &b) { return a.cwiseProduct(b); }
} // namespace

TEST_CASE("pilot book")
{
    const PilotBook pb = gen_pilots(3, 5, 10.0);
    CHECK(pb.T() == 5);
    CHECK(pb.U() == 3);
    CHECK(pb.power == doctest::Approx(10.0));
    CHECK((pb.S.adjoint() * pb.S - 50.0 * CMat::Identity(3, 3)).norm() < 1e-12);
    CHECK(std::abs(pb.S(0, 2) - cplx(std::sqrt(10.0), 0.0)) < 1e-12);
    CHECK(std::abs(pb.S(1, 1) - std::polar(std::sqrt(10.0), -2.0 * pi / 5.0)) < 1e-12);
    CHECK_THROWS_AS(gen_pilots(4, 3, 0.0), invalid_input);
    CHECK_THROWS_AS(gen_pilots(0, 3, 0.0), invalid_input);
}

TEST_CASE("reflection schedules")
{
    Rng rng(1);
    const ReflectionSchedule s = gen_reflection_schedule(rng, 9, 6);
    CHECK(s.Q() == 6);
    CHECK_FALSE(s.paired);
    CHECK((s.V1.cwiseAbs() - RMat::Ones(9, 6)).norm() < 1e-12);

    const ReflectionSchedule p = gen_paired_schedule(rng, 9, 3, 4);
    CHECK(p.paired);
    CHECK(p.Q() == 12);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 4; ++y)
        {
            CHECK(p.V1.col(p.index(x, y)) == p.V1.col(p.index(x, 0)));
            CHECK(p.V2.col(p.index(x, y)) == p.V2.col(p.index(0, y)));
        }
    CHECK((p.V1.col(0) - p.V1.col(p.index(1, 0))).norm() > 1.0);
    CHECK_THROWS_AS(gen_paired_schedule(rng, 9, 0, 4), invalid_input);
}

TEST_CASE("despread noise variance")
{
    Scene s = make_scene(2);
    for (int i = 0; i < 2; ++i)
        for (auto &h : s.chan.h[i])
            h.setZero();
    const PilotBook pb = gen_pilots(3, 4, 5.0);
    Rng rng(3);
    const ReflectionSchedule sched = gen_reflection_schedule(rng, 9, 4000);
    const double sn2 = 2.0;
    const RxRecord rec = simulate_uplink(s.chan, pb, sched, Stage::bs_rx_single, 0, sn2, rng);
    const double expected = sn2 / (pb.power * pb.T());
    for (int u = 0; u < 3; ++u)
    {
        const CMat z = despread(rec, pb, u);
        const double var = z.squaredNorm() / static_cast<double>(z.size());
        CHECK(std::abs(var / expected - 1.0) < 0.05);
    }
}

TEST_CASE("noiseless uplink matches the summed reflection model")
{
    const Scene s = make_scene(4);
    const PilotBook pb = gen_pilots(3, 3, 0.0);
    Rng rng(5);
    const ReflectionSchedule sched = gen_reflection_schedule(rng, 9, 5);
    const RxRecord dbl = simulate_uplink(s.chan, pb, sched, Stage::bs_rx_double, 0, 0.0, rng);
    const RxRecord ris = simulate_uplink(s.chan, pb, sched, Stage::ris_rx, 1, 0.0, rng);
    const RxRecord one = simulate_uplink(s.chan, pb, sched, Stage::bs_rx_single, 1, 0.0, rng);
    for (int u = 0; u < 3; ++u)
    {
        const CMat zd = despread(dbl, pb, u), zr = despread(ris, pb, u), z1 = despread(one, pb, u);
        for (int q = 0; q < 5; ++q)
        {
            const CVec &v1 = sched.V1.col(q), &v2 = sched.V2.col(q);
            const CVec &h1 = s.chan.h[0][u], &h2 = s.chan.h[1][u];
            const CVec first = hadamard(v1, h1);
            const CVec expected = s.chan.F[0] * first + s.chan.F[1] * hadamard(v2, h2) +
                                  s.chan.F[1] * hadamard(v2, s.chan.D * first);
            CHECK((zd.col(q) - expected).norm() < 1e-9 * expected.norm());

            cplx r = 0.0;
            for (int l = 0; l < 9; ++l)
                r += std::conj(v2[l]) * h2[l];
            CHECK(std::abs(zr(0, q) - r) < 1e-9 * std::abs(r) + 1e-300);

            const CVec e1 = s.chan.F[1] * hadamard(v2, h2);
            CHECK((z1.col(q) - e1).norm() < 1e-9 * e1.norm());
        }
    }
    CHECK_THROWS_AS(simulate_uplink(s.chan, pb, sched, Stage::ris_rx, 2, 0.0, rng), invalid_input);
    CHECK_THROWS_AS(despread(dbl, pb, 3), invalid_input);
}

TEST_CASE("uplink is reproducible from the seed")
{
    const Scene s = make_scene(6);
    const PilotBook pb = gen_pilots(3, 3, 0.0);
    Rng r1(8), r2(8);
    const ReflectionSchedule sched = gen_reflection_schedule(r1, 9, 3);
    gen_reflection_schedule(r2, 9, 3);
    const RxRecord a = simulate_uplink(s.chan, pb, sched, Stage::bs_rx_double, 0, 1e-3, r1);
    const RxRecord b = simulate_uplink(s.chan, pb, sched, Stage::bs_rx_double, 0, 1e-3, r2);
    for (int q = 0; q < 3; ++q)
        CHECK(a.frames[q] == b.frames[q]);
}

TEST_CASE("assembled systems reproduce noiseless observations")
{
    const Scene s = make_scene(10);
    const PilotBook pb = gen_pilots(3, 3, 0.0);
    Rng rng(11);
    const ReflectionSchedule single = gen_reflection_schedule(rng, 9, 7);

    const RxRecord at_ris = simulate_uplink(s.chan, pb, single, Stage::ris_rx, 0, 0.0, rng);
    const LinearSystem hr = assemble_h_at_ris(despread(at_ris, pb, 1), single.V1);
    CHECK((hr.Y - hr.C * s.chan.h[0][1]).norm() < 1e-9 * hr.Y.norm());

    const RxRecord at_bs = simulate_uplink(s.chan, pb, single, Stage::bs_rx_single, 0, 0.0, rng);
    std::vector<CMat> z;
    for (int u = 0; u < 3; ++u)
        z.push_back(despread(at_bs, pb, u));
    const BilinearSystem fm = assemble_f_mae(z, single.V1, s.chan.h[0]);
    CHECK(fm.Y.cols() == 21);
    CHECK((fm.C1 - CMat::Identity(4, 4)).norm() == 0.0);
    CHECK((fm.Y - fm.C1 * s.chan.F[0] * fm.C2.adjoint()).norm() < 1e-9 * fm.Y.norm());

    const LinearSystem hs = assemble_h_small(z[2], single.V1, s.chan.F[0]);
    CHECK((hs.Y - hs.C * s.chan.h[0][2]).norm() < 1e-9 * hs.Y.norm());

    const ReflectionSchedule paired = gen_paired_schedule(rng, 9, 4, 3);
    const RxRecord dbl = simulate_uplink(s.chan, pb, paired, Stage::bs_rx_double, 0, 0.0, rng);
    std::vector<CMat> zd;
    for (int u = 0; u < 3; ++u)
        zd.push_back(despread(dbl, pb, u));
    const BilinearSystem ds = assemble_d_system(zd, paired, s.chan.F[0], s.chan.F[1], s.chan.H(0), s.chan.H(1));
    CHECK(ds.Y.rows() == 3 * 4);
    CHECK(ds.Y.cols() == 4 * 3);
    CHECK((ds.Y - ds.C1 * s.chan.D * ds.C2.adjoint()).norm() < 1e-8 * ds.Y.norm());

    CHECK_THROWS_AS(assemble_d_system(zd, single, s.chan.F[0], s.chan.F[1], s.chan.H(0), s.chan.H(1)), invalid_input);
    CHECK_THROWS_AS(assemble_d_system(zd, paired, CMat(), s.chan.F[1], s.chan.H(0), s.chan.H(1)), invalid_input);
    CHECK_THROWS_AS(assemble_f_mae(z, single.V1, {}), invalid_input);
    CHECK_THROWS_AS(assemble_h_small(z[0], single.V1, CMat()), invalid_input);
}
