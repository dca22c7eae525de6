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

namespace drisce
{
    PilotBook gen_pilots(int U, int T, double power_dbm)
    {
        if (U < 1)
            throw invalid_input("gen_pilots: U must be positive");
        if (T < U)
            throw invalid_input("gen_pilots: T must be at least U");
        PilotBook pb;
        pb.power = db_to_linear(power_dbm);
        const double amp = std::sqrt(pb.power);
        pb.S.resize(T, U);
        for (int u = 0; u < U; ++u)
            for (int t = 0; t < T; ++t)
                pb.S(t, u) = std::polar(amp, -2.0 * pi * ((static_cast<long>(t) * u) % T) / T);
        return pb;
    }

    namespace
    {
        CMat random_phases(Rng &rng, int L, int Q)
        {
            std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
            CMat V(L, Q);
            for (int q = 0; q < Q; ++q)
                for (int l = 0; l < L; ++l)
                    V(l, q) = std::polar(1.0, ph(rng));
            return V;
        }
    } // namespace

    ReflectionSchedule gen_reflection_schedule(Rng &rng, int L, int Q)
    {
        if (L < 1 || Q < 1)
            throw invalid_input("gen_reflection_schedule: L and Q must be positive");
        ReflectionSchedule s;
        s.V1 = random_phases(rng, L, Q);
        s.V2 = random_phases(rng, L, Q);
        return s;
    }

    ReflectionSchedule gen_paired_schedule(Rng &rng, int L, int n_x, int n_y)
    {
        if (L < 1 || n_x < 1 || n_y < 1)
            throw invalid_input("gen_paired_schedule: L, n_x and n_y must be positive");
        const CMat v1 = random_phases(rng, L, n_x);
        const CMat v2 = random_phases(rng, L, n_y);
        ReflectionSchedule s;
        s.paired = true;
        s.n_x = n_x;
        s.n_y = n_y;
        s.V1.resize(L, n_x * n_y);
        s.V2.resize(L, n_x * n_y);
        for (int x = 0; x < n_x; ++x)
            for (int y = 0; y < n_y; ++y)
            {
                s.V1.col(s.index(x, y)) = v1.col(x);
                s.V2.col(s.index(x, y)) = v2.col(y);
            }
        return s;
    }

    RxRecord simulate_uplink(const ChannelRealization &chan, const PilotBook &pilots, const ReflectionSchedule &sched,
                             Stage stage, int ris, double noise_power, Rng &rng)
    {
        if (ris < 0 || ris > 1)
            throw invalid_input("simulate_uplink: ris index must be 0 or 1");
        if (noise_power < 0.0)
            throw invalid_input("simulate_uplink: noise power must be non-negative");
        const int Q = sched.Q();
        const int T = pilots.T();
        const CMat SH = pilots.S.adjoint(); // U x T

        std::array<CMat, 2> HS;
        for (int i = 0; i < 2; ++i)
        {
            const CMat H = chan.H(i);
            if (H.cols() != pilots.U())
                throw invalid_input("simulate_uplink: pilot book and channel disagree on U");
            HS[i] = H * SH; // L x T
        }

        // One sub-stream per sub-frame so the draws do not depend on evaluation order
        const std::uint64_t base = rng();
        RxRecord rec;
        rec.stage = stage;
        rec.ris = ris;
        rec.noise_power = noise_power;
        rec.frames.resize(Q);
        const CMat &Vi = ris == 0 ? sched.V1 : sched.V2;
        for (int q = 0; q < Q; ++q)
        {
            Rng sub(hash_combine(base, static_cast<std::uint64_t>(q)));
            switch (stage)
            {
            case Stage::ris_rx:
            {
                const CVec v = Vi.col(q);
                CMat N = complex_normal_matrix(sub, HS[ris].rows(), T, noise_power);
                rec.frames[q] = v.adjoint() * (HS[ris] + N);
                break;
            }
            case Stage::bs_rx_single:
            {
                const CMat &F = chan.F[ris];
                rec.frames[q] = F * Vi.col(q).asDiagonal() * HS[ris] +
                                complex_normal_matrix(sub, F.rows(), T, noise_power);
                break;
            }
            case Stage::bs_rx_double:
            {
                const auto v1 = sched.V1.col(q).asDiagonal();
                const auto v2 = sched.V2.col(q).asDiagonal();
                CMat Y = chan.F[0] * v1 * HS[0] + chan.F[1] * v2 * HS[1];
                Y += chan.F[1] * v2 * (chan.D * (v1 * HS[0]));
                Y += complex_normal_matrix(sub, Y.rows(), T, noise_power);
                rec.frames[q] = std::move(Y);
                break;
            }
            }
        }
        return rec;
    }

    CMat despread(const RxRecord &rec, const PilotBook &pilots, int u)
    {
        if (u < 0 || u >= pilots.U())
            throw invalid_input("despread: user index out of range");
        if (rec.frames.empty())
            return {};
        const CVec su = pilots.S.col(u) / (pilots.power * pilots.T());
        CMat out(rec.frames.front().rows(), static_cast<Eigen::Index>(rec.frames.size()));
        for (std::size_t q = 0; q < rec.frames.size(); ++q)
        {
            if (rec.frames[q].cols() != pilots.T())
                throw invalid_input("despread: frame length does not match the pilot book");
            out.col(static_cast<Eigen::Index>(q)) = rec.frames[q] * su;
        }
        return out;
    }

    LinearSystem assemble_h_at_ris(const CMat &despread_ris, const CMat &V)
    {
        if (despread_ris.rows() != 1 || despread_ris.cols() != V.cols())
            throw invalid_input("assemble_h_at_ris: expected a 1 x Q observation matching V");
        return {despread_ris.transpose(), V.adjoint()};
    }

    BilinearSystem assemble_f_mae(const std::vector<CMat> &despread_bs, const CMat &V, const std::vector<CVec> &h_hat)
    {
        if (h_hat.empty())
            throw invalid_input("assemble_f_mae: RIS-user estimates are required");
        if (despread_bs.size() != h_hat.size())
            throw invalid_input("assemble_f_mae: one observation per user estimate required");
        std::vector<CMat> cols, c2;
        for (std::size_t u = 0; u < h_hat.size(); ++u)
        {
            if (h_hat[u].size() != V.rows() || despread_bs[u].cols() != V.cols())
                throw invalid_input("assemble_f_mae: dimension mismatch");
            cols.push_back(despread_bs[u]);
            c2.push_back(V.adjoint() * h_hat[u].conjugate().asDiagonal());
        }
        const Eigen::Index J = despread_bs.front().rows();
        return {hstack(cols), CMat::Identity(J, J), vstack(c2)};
    }

    BilinearSystem assemble_d_system(const std::vector<CMat> &despread_bs, const ReflectionSchedule &sched,
                                     const CMat &F1_hat, const CMat &F2_hat, const CMat &H1_hat, const CMat &H2_hat)
    {
        if (!sched.paired)
            throw invalid_input("assemble_d_system: a paired schedule is required");
        if (F1_hat.size() == 0 || F2_hat.size() == 0 || H1_hat.size() == 0 || H2_hat.size() == 0)
            throw invalid_input("assemble_d_system: F1, F2, H1 and H2 estimates are required");
        const int U = static_cast<int>(despread_bs.size());
        if (U != H1_hat.cols() || U != H2_hat.cols())
            throw invalid_input("assemble_d_system: user count mismatch");
        const Eigen::Index J = F2_hat.rows();
        const Eigen::Index L = F2_hat.cols();

        CMat Y(sched.n_y * J, sched.n_x * U);
        for (int u = 0; u < U; ++u)
        {
            const CMat &Z = despread_bs[u];
            if (Z.rows() != J || Z.cols() != sched.Q())
                throw invalid_input("assemble_d_system: observation dimension mismatch");
            const CMat f1h = F1_hat * H1_hat.col(u).asDiagonal(); // J x L
            const CMat f2h = F2_hat * H2_hat.col(u).asDiagonal();
            for (int x = 0; x < sched.n_x; ++x)
                for (int y = 0; y < sched.n_y; ++y)
                {
                    const int q = sched.index(x, y);
                    Y.block(y * J, x * U + u, J, 1) = Z.col(q) - f1h * sched.V1.col(q) - f2h * sched.V2.col(q);
                }
        }

        CMat C1(sched.n_y * J, L);
        for (int y = 0; y < sched.n_y; ++y)
            C1.middleRows(y * J, J) = F2_hat * sched.V2.col(sched.index(0, y)).asDiagonal();
        CMat C2(sched.n_x * U, L);
        for (int x = 0; x < sched.n_x; ++x)
            C2.middleRows(x * U, U) = H1_hat.adjoint() * sched.V1.col(sched.index(x, 0)).conjugate().asDiagonal();
        return {std::move(Y), std::move(C1), std::move(C2)};
    }

    LinearSystem assemble_h_small(const CMat &despread_bs, const CMat &V, const CMat &F_hat)
    {
        if (F_hat.size() == 0)
            throw invalid_input("assemble_h_small: an F estimate is required");
        if (despread_bs.cols() != V.cols() || despread_bs.rows() != F_hat.rows() || V.rows() != F_hat.cols())
            throw invalid_input("assemble_h_small: dimension mismatch");
        const Eigen::Index J = F_hat.rows();
        const Eigen::Index Q = V.cols();
        CMat C(Q * J, F_hat.cols());
        for (Eigen::Index q = 0; q < Q; ++q)
            C.middleRows(q * J, J) = F_hat * V.col(q).asDiagonal();
        return {vec(despread_bs), std::move(C)};
    }

} // namespace drisce
