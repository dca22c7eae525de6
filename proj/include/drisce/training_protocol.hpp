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

#ifndef DRISCE_TRAINING_PROTOCOL_HPP
#define DRISCE_TRAINING_PROTOCOL_HPP

#include "drisce/geometry_channel.hpp"

#include <vector>

namespace drisce
{
    struct PilotBook
    {
        CMat S;              // T x U, column u is s_u
        double power = 0.0; // sigma_p^2, linear mW

        int T() const { return static_cast<int>(S.rows()); }
        int U() const { return static_cast<int>(S.cols()); }
    };

    // s_u[t] = sigma_p e^{-j 2 pi t u / T}
    PilotBook gen_pilots(int U, int T, double power_dbm);

    struct ReflectionSchedule
    {
        CMat V1; // L x Q
        CMat V2; // L x Q
        // paired mode: sub-frame q = x * n_y + y uses V1 column x-block and V2 column y
        bool paired = false;
        int n_x = 0;
        int n_y = 0;

        int Q() const { return static_cast<int>(V1.cols()); }
        int index(int x, int y) const { return x * n_y + y; }
    };

    ReflectionSchedule gen_reflection_schedule(Rng &rng, int L, int Q);
    ReflectionSchedule gen_paired_schedule(Rng &rng, int L, int n_x, int n_y);

    enum class Stage
    {
        ris_rx,        // RF chain of one RIS, that RIS active
        bs_rx_single,  // BS, one RIS active
        bs_rx_double   // BS, both RISs active
    };

    struct RxRecord
    {
        Stage stage = Stage::ris_rx;
        int ris = 0;                 // active RIS for single-RIS stages
        std::vector<CMat> frames;    // 1 x T at a RIS, J x T at the BS
        double noise_power = 0.0;    // sigma_n^2, linear mW
    };

    RxRecord simulate_uplink(const ChannelRealization &chan, const PilotBook &pilots, const ReflectionSchedule &sched,
                             Stage stage, int ris, double noise_power, Rng &rng);

    // (1 / (sigma_p^2 T)) Y_q s_u for every sub-frame; column q of the result
    CMat despread(const RxRecord &rec, const PilotBook &pilots, int u);

    // Y ~= C A X with X row-sparse
    struct LinearSystem
    {
        CMat Y;
        CMat C;
    };

    // Y ~= C1 A1 Delta A2^H C2^H
    struct BilinearSystem
    {
        CMat Y;
        CMat C1;
        CMat C2;
    };

    // Observation of one user at RIS i: y = V^H h
    LinearSystem assemble_h_at_ris(const CMat &despread_ris, const CMat &V);

    // Multi-user stacking at the BS: [Y_1 ... Y_U] = F [diag(h_1) V ... diag(h_U) V]
    BilinearSystem assemble_f_mae(const std::vector<CMat> &despread_bs, const CMat &V, const std::vector<CVec> &h_hat);

    // Double-reflection system after removing both single-reflection terms.
    // Row block y stacks F2 V2y, column block x stacks V1x H1.
    BilinearSystem assemble_d_system(const std::vector<CMat> &despread_bs, const ReflectionSchedule &sched,
                                     const CMat &F1_hat, const CMat &F2_hat, const CMat &H1_hat, const CMat &H2_hat);

    // Small-timescale observation of one user through a known F: stacked [F diag(v_q) h]_q
    LinearSystem assemble_h_small(const CMat &despread_bs, const CMat &V, const CMat &F_hat);

} // namespace drisce

#endif
