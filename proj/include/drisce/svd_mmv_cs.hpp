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

#ifndef DRISCE_SVD_MMV_CS_HPP
#define DRISCE_SVD_MMV_CS_HPP

#include "drisce/baselines.hpp"
#include "drisce/gamp.hpp"

namespace drisce
{
    enum class SolverKind
    {
        em_gamp,
        somp
    };

    struct RecoveryOptions
    {
        SolverKind solver = SolverKind::em_gamp;
        int P = 3; // sparsity / path count
        SolverConfig gamp;
    };

    struct SvdSplit
    {
        CMat E1; // N1 x R, u_k sqrt(sigma_k)
        CMat E2; // N2 x R, v_k sqrt(sigma_k)
        RVec singular_values; // all of them, descending
        int R = 0;
    };

    SvdSplit split_via_svd(const CMat &Y, int R);

    // Row-sparse MMV recovery with a common support of size P.
    // EM-GAMP keeps the P rows of largest posterior energy and refits them by least squares.
    SparseEstimate recover_mmv(const CMat &E, const LinearOperator &Phi, const RecoveryOptions &opts);

    struct FactorEstimates
    {
        SparseEstimate f1; // Delta_1^M on Phi1
        SparseEstimate f2; // Delta_2^M on Phi2
    };

    FactorEstimates recover_factors(const SvdSplit &split, const LinearOperator &Phi1, const LinearOperator &Phi2,
                                    const RecoveryOptions &opts);

    // Delta = Delta_1^M (Delta_2^M)^H
    CMat reassemble(const FactorEstimates &est, Eigen::Index G1, Eigen::Index G2);

    enum class BaselineMode
    {
        kronecker,
        svd_cs
    };

    struct BaselineOptions
    {
        bool explicit_kronecker = false;
    };

    CMat baseline_solve(const CMat &Y, const CMat &Phi1, const CMat &Phi2, BaselineMode mode,
                        const RecoveryOptions &opts, const BaselineOptions &bopts = {});

} // namespace drisce

#endif
