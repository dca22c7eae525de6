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

#ifndef DRISCE_OFFGRID_HPP
#define DRISCE_OFFGRID_HPP

#include "drisce/baselines.hpp"
#include "drisce/dictionary.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace drisce
{
    // Paths in composite spatial frequencies (cos(ele), sin(ele) sin(azi)).
    // The steering argument is (2d/lambda) times the composite.
    struct RefinableEstimate
    {
        RVec comp_ele;
        RVec comp_azi;
        CMat coeffs;   // P x R
        std::optional<int> los_index;
        CMat residual; // M x R
        int iterations = 0; // accepted steps
        bool converged = false;

        int paths() const { return static_cast<int>(comp_ele.size()); }
    };

    // (d a / d comp_ele, d a / d comp_azi)
    std::pair<CVec, CVec> steering_gradients(const UpaGeometry &geom, double comp_ele, double comp_azi);

    // argmin_w || Y - sum_b w_b A_b ||_F
    CVec mls_solve(const CMat &Y, const std::vector<CMat> &A);

    // Columns a(comp_ele[b], comp_azi[b])
    CMat partial_dictionary(const UpaGeometry &geom, const RVec &comp_ele, const RVec &comp_azi);

    // On-grid support and coefficients re-expressed as a refinable estimate; the anchor atom becomes los_index
    RefinableEstimate make_refinable(const SparseEstimate &on_grid, const Dictionary &dict, const CMat &E,
                                     const CMat &C);

    RefinableEstimate refine_iteration(const RefinableEstimate &est, const CMat &E, const CMat &C,
                                       const UpaGeometry &geom);

    RefinableEstimate offgrid_run(const SparseEstimate &on_grid, const Dictionary &dict, const CMat &E, const CMat &C,
                                  int max_iters = 10);

    // Channel factor: partial dictionary times coefficients (N x R)
    CMat reconstruct(const RefinableEstimate &est, const UpaGeometry &geom);

} // namespace drisce

#endif
