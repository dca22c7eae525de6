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

#include "drisce/baselines.hpp"

#include <algorithm>

namespace drisce
{
    void GreedyConfig::validate(Eigen::Index atoms) const
    {
        if (sparsity < 1)
            throw invalid_input("GreedyConfig: sparsity must be positive");
        if (sparsity > atoms)
            throw invalid_input("GreedyConfig: sparsity exceeds the atom count");
        if (residual_tol < 0.0)
            throw invalid_input("GreedyConfig: residual_tol must be non-negative");
    }

    CMat SparseEstimate::dense(Eigen::Index G) const
    {
        CMat out = CMat::Zero(G, coeffs.cols());
        for (std::size_t k = 0; k < support.size(); ++k)
            out.row(support[k]) = coeffs.row(static_cast<Eigen::Index>(k));
        return out;
    }

    SparseEstimate omp_solve(const CVec &y, const CMat &Phi, const GreedyConfig &cfg)
    {
        return somp_solve(CMat(y), Phi, cfg);
    }

    SparseEstimate somp_solve(const CMat &Y, const CMat &Phi, const GreedyConfig &cfg)
    {
        return somp_solve(Y, DenseOperator(Phi), cfg);
    }

    SparseEstimate somp_solve(const CMat &Y, const LinearOperator &Phi, const GreedyConfig &cfg)
    {
        if (Y.rows() != Phi.rows())
            throw invalid_input("somp_solve: observation rows do not match the operator");
        cfg.validate(Phi.cols());

        RVec norms = Phi.column_norms();
        for (Eigen::Index g = 0; g < norms.size(); ++g)
            if (norms[g] == 0.0)
                norms[g] = std::numeric_limits<double>::infinity();

        SparseEstimate est;
        est.residual = Y;
        est.coeffs = CMat::Zero(0, Y.cols());
        std::vector<char> used(Phi.cols(), 0);
        CMat basis(Y.rows(), 0);

        for (int k = 0; k < cfg.sparsity; ++k)
        {
            if (est.residual.norm() <= cfg.residual_tol)
                break;
            const RVec score = Phi.adjoint(est.residual).cwiseAbs2().rowwise().sum().cwiseQuotient(norms.cwiseAbs2());
            int best = -1;
            double best_score = -1.0;
            for (Eigen::Index g = 0; g < score.size(); ++g)
                if (!used[g] && score[g] > best_score)
                {
                    best_score = score[g];
                    best = static_cast<int>(g);
                }
            if (best < 0)
                break;
            used[best] = 1;
            est.support.push_back(best);
            basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
            basis.col(basis.cols() - 1) = Phi.column(best);
            est.coeffs = least_squares(basis, Y);
            est.residual = Y - basis * est.coeffs;
        }
        return est;
    }

} // namespace drisce
