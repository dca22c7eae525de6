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

#include "drisce/svd_mmv_cs.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

namespace drisce
{
    SvdSplit split_via_svd(const CMat &Y, int R)
    {
        if (R < 1)
            throw invalid_input("split_via_svd: R must be at least 1");
        if (R > std::min(Y.rows(), Y.cols()))
            throw invalid_input("split_via_svd: R exceeds min(rows, cols)");
        Eigen::BDCSVD<CMat> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
        SvdSplit s;
        s.R = R;
        s.singular_values = svd.singularValues();
        const RVec root = s.singular_values.head(R).cwiseSqrt();
        s.E1 = svd.matrixU().leftCols(R) * root.asDiagonal();
        s.E2 = svd.matrixV().leftCols(R) * root.asDiagonal();
        return s;
    }

    SparseEstimate recover_mmv(const CMat &E, const LinearOperator &Phi, const RecoveryOptions &opts)
    {
        if (E.rows() != Phi.rows())
            throw invalid_input("recover_mmv: observation rows do not match the operator");
        const int P = static_cast<int>(std::min<Eigen::Index>(opts.P, Phi.cols()));
        if (P < 1)
            throw invalid_input("recover_mmv: P must be positive");
        if (opts.solver == SolverKind::somp)
            return somp_solve(E, Phi, GreedyConfig{P, 0.0});

        RVec norms = Phi.column_norms();
        for (Eigen::Index g = 0; g < norms.size(); ++g)
            if (!(norms[g] > 0.0))
                norms[g] = 1.0;
        const ScaledOperator unit(Phi, norms);
        const double scale = E.norm() / std::sqrt(static_cast<double>(E.size()));

        SparseEstimate est;
        if (!(scale > 0.0))
        {
            est.support.resize(P);
            std::iota(est.support.begin(), est.support.end(), 0);
            est.coeffs = CMat::Zero(P, E.cols());
            est.residual = E;
            return est;
        }

        const auto res = m_em_gamp(E / scale, unit, opts.gamp);
        const RVec energy = res.state.t_hat.rowwise().squaredNorm();
        std::vector<int> order(energy.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return energy[a] > energy[b]; });
        est.support.assign(order.begin(), order.begin() + P);
        std::sort(est.support.begin(), est.support.end());
        const CMat A = Phi.columns(est.support);
        est.coeffs = least_squares(A, E);
        est.residual = E - A * est.coeffs;
        return est;
    }

    FactorEstimates recover_factors(const SvdSplit &split, const LinearOperator &Phi1, const LinearOperator &Phi2,
                                    const RecoveryOptions &opts)
    {
        return {recover_mmv(split.E1, Phi1, opts), recover_mmv(split.E2, Phi2, opts)};
    }

    CMat reassemble(const FactorEstimates &est, Eigen::Index G1, Eigen::Index G2)
    {
        if (est.f1.coeffs.cols() != est.f2.coeffs.cols())
            throw invalid_input("reassemble: factor column counts differ");
        return est.f1.dense(G1) * est.f2.dense(G2).adjoint();
    }

    namespace
    {
        // Each column solved alone. Disagreeing supports fall back to a majority vote weighted by
        // column energy (ties broken by recovered energy) and a per-column refit on the voted support.
        CMat columnwise(const CMat &E, const LinearOperator &Phi, const RecoveryOptions &opts)
        {
            const Eigen::Index G = Phi.cols();
            std::vector<SparseEstimate> cols;
            RVec votes = RVec::Zero(G), energy = RVec::Zero(G);
            for (Eigen::Index r = 0; r < E.cols(); ++r)
            {
                cols.push_back(recover_mmv(E.col(r), Phi, opts));
                const CVec d = cols.back().dense(G).col(0);
                const double weight = E.col(r).squaredNorm();
                for (int g : cols.back().support)
                    votes[g] += weight;
                energy += d.cwiseAbs2();
            }
            CMat out = CMat::Zero(G, E.cols());
            const bool agree = std::all_of(cols.begin(), cols.end(),
                                           [&](const SparseEstimate &c) { return c.support == cols.front().support; });
            if (agree)
            {
                for (Eigen::Index r = 0; r < E.cols(); ++r)
                    out.col(r) = cols[r].dense(G).col(0);
                return out;
            }
            std::vector<int> order(G);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return votes[a] != votes[b] ? votes[a] > votes[b] : energy[a] > energy[b];
            });
            const int P = static_cast<int>(std::min<Eigen::Index>(opts.P, G));
            std::vector<int> support(order.begin(), order.begin() + P);
            std::sort(support.begin(), support.end());
            const CMat coeffs = least_squares(Phi.columns(support), E);
            for (int k = 0; k < P; ++k)
                out.row(support[k]) = coeffs.row(k);
            return out;
        }
    } // namespace

    CMat baseline_solve(const CMat &Y, const CMat &Phi1, const CMat &Phi2, BaselineMode mode,
                        const RecoveryOptions &opts, const BaselineOptions &bopts)
    {
        if (Y.rows() != Phi1.rows() || Y.cols() != Phi2.rows())
            throw invalid_input("baseline_solve: operand dimensions do not match the observation");
        const Eigen::Index G1 = Phi1.cols(), G2 = Phi2.cols();

        if (mode == BaselineMode::svd_cs)
        {
            const int R = static_cast<int>(std::min<Eigen::Index>({opts.P, Y.rows(), Y.cols()}));
            const auto split = split_via_svd(Y, R);
            const DenseOperator op1(Phi1), op2(Phi2);
            return columnwise(split.E1, op1, opts) * columnwise(split.E2, op2, opts).adjoint();
        }

        const KroneckerOperator kron(Phi1, Phi2);
        const CVec y = vec(Y);
        SparseEstimate est;
        if (bopts.explicit_kronecker)
            est = recover_mmv(y, DenseOperator(kron.materialize()), opts);
        else
            est = recover_mmv(y, kron, opts);
        return unvec(est.dense(G1 * G2).col(0), G1, G2);
    }

} // namespace drisce
