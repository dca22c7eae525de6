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

#ifndef DRISCE_BASELINES_HPP
#define DRISCE_BASELINES_HPP

#include "drisce/linear_operator.hpp"

#include <vector>

namespace drisce
{
    struct GreedyConfig
    {
        int sparsity = 1;          // K
        double residual_tol = 0.0; // stop once ||residual||_F <= tol

        void validate(Eigen::Index atoms) const;
    };

    // Row-sparse estimate: coeffs row k belongs to atom support[k]
    struct SparseEstimate
    {
        std::vector<int> support;
        CMat coeffs;   // |support| x R
        CMat residual; // M x R

        // Dense G x R coefficient matrix with zero rows off the support
        CMat dense(Eigen::Index G) const;
    };

    SparseEstimate omp_solve(const CVec &y, const CMat &Phi, const GreedyConfig &cfg);
    SparseEstimate somp_solve(const CMat &Y, const CMat &Phi, const GreedyConfig &cfg);
    SparseEstimate somp_solve(const CMat &Y, const LinearOperator &Phi, const GreedyConfig &cfg);

} // namespace drisce

#endif
