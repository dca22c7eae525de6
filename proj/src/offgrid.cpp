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

#include "drisce/offgrid.hpp"

#include <algorithm>

namespace drisce
{
    std::pair<CVec, CVec> steering_gradients(const UpaGeometry &geom, double comp_ele, double comp_azi)
    {
        geom.validate();
        const double k = 2.0 * geom.spacing_over_wavelength;
        const CVec a = steering_vector(geom, k * comp_ele, k * comp_azi);
        CVec de(a.size()), da(a.size());
        for (int nz = 0; nz < geom.n_z; ++nz)
            for (int ny = 0; ny < geom.n_y; ++ny)
            {
                const int i = nz * geom.n_y + ny;
                de[i] = cplx(0.0, pi * k * nz) * a[i];
                da[i] = cplx(0.0, pi * k * ny) * a[i];
            }
        return {de, da};
    }

    CVec mls_solve(const CMat &Y, const std::vector<CMat> &A)
    {
        if (A.empty())
            return {};
        CMat G(Y.size(), static_cast<Eigen::Index>(A.size()));
        for (std::size_t b = 0; b < A.size(); ++b)
        {
            if (A[b].rows() != Y.rows() || A[b].cols() != Y.cols())
                throw invalid_input("mls_solve: every A_b must match Y in shape");
            G.col(static_cast<Eigen::Index>(b)) = vec(A[b]);
        }
        return least_squares(G, vec(Y));
    }

    CMat partial_dictionary(const UpaGeometry &geom, const RVec &comp_ele, const RVec &comp_azi)
    {
        const double k = 2.0 * geom.spacing_over_wavelength;
        CMat out(geom.size(), comp_ele.size());
        for (Eigen::Index b = 0; b < comp_ele.size(); ++b)
            out.col(b) = steering_vector(geom, k * comp_ele[b], k * comp_azi[b]);
        return out;
    }

    CMat reconstruct(const RefinableEstimate &est, const UpaGeometry &geom)
    {
        return partial_dictionary(geom, est.comp_ele, est.comp_azi) * est.coeffs;
    }

    RefinableEstimate make_refinable(const SparseEstimate &on_grid, const Dictionary &dict, const CMat &E,
                                     const CMat &C)
    {
        if (C.cols() != dict.geom.size() || C.rows() != E.rows())
            throw invalid_input("make_refinable: measurement matrix does not match the dictionary or observation");
        const double k = 2.0 * dict.geom.spacing_over_wavelength;
        const int P = static_cast<int>(on_grid.support.size());
        RefinableEstimate est;
        est.comp_ele.resize(P);
        est.comp_azi.resize(P);
        for (int b = 0; b < P; ++b)
        {
            const int g = on_grid.support[b];
            est.comp_ele[b] = dict.x1[g] / k;
            est.comp_azi[b] = dict.x2[g] / k;
            if (dict.anchor_atom && *dict.anchor_atom == g)
                est.los_index = b;
        }
        est.coeffs = on_grid.coeffs;
        est.residual = E - C * partial_dictionary(dict.geom, est.comp_ele, est.comp_azi) * est.coeffs;
        return est;
    }

    RefinableEstimate refine_iteration(const RefinableEstimate &est, const CMat &E, const CMat &C,
                                       const UpaGeometry &geom)
    {
        std::vector<int> free;
        for (int b = 0; b < est.paths(); ++b)
            if (!est.los_index || *est.los_index != b)
                free.push_back(b);
        RefinableEstimate out = est;
        if (free.empty())
        {
            out.converged = true;
            return out;
        }
        const double k = 2.0 * geom.spacing_over_wavelength;

        CMat E_t = E;
        if (est.los_index)
        {
            const int b = *est.los_index;
            E_t -= C * steering_vector(geom, k * est.comp_ele[b], k * est.comp_azi[b]) * est.coeffs.row(b);
        }
        const double r_norm = est.residual.norm();
        if (r_norm <= 1e-13 * std::max(E.norm(), 1e-300))
        {
            out.converged = true;
            return out;
        }

        std::vector<CMat> g_ele, g_azi;
        std::vector<double> s_ele, s_azi;
        for (int b : free)
        {
            const auto [de, da] = steering_gradients(geom, est.comp_ele[b], est.comp_azi[b]);
            // Multiplicative perturbation; additive when the frequency sits at zero
            const double se = std::abs(est.comp_ele[b]) > 1e-6 ? est.comp_ele[b] : 1.0;
            const double sa = std::abs(est.comp_azi[b]) > 1e-6 ? est.comp_azi[b] : 1.0;
            const CMat tb = est.coeffs.row(b);
            g_ele.push_back(se * (C * de) * tb);
            g_azi.push_back(sa * (C * da) * tb);
            s_ele.push_back(se);
            s_azi.push_back(sa);
        }
        const CVec w_ele = mls_solve(est.residual, g_ele);
        const CVec w_azi = mls_solve(est.residual, g_azi);
        for (std::size_t i = 0; i < free.size(); ++i)
        {
            const int b = free[i];
            out.comp_ele[b] = std::clamp(est.comp_ele[b] + w_ele[i].real() * s_ele[i], -1.0, 1.0);
            out.comp_azi[b] = std::clamp(est.comp_azi[b] + w_azi[i].real() * s_azi[i], -1.0, 1.0);
        }

        RVec fe(free.size()), fa(free.size());
        for (std::size_t i = 0; i < free.size(); ++i)
        {
            fe[i] = out.comp_ele[free[i]];
            fa[i] = out.comp_azi[free[i]];
        }
        const CMat CA = C * partial_dictionary(geom, fe, fa);
        const CMat T = least_squares(CA, E_t);
        CMat R = E_t - CA * T;

        if (R.norm() > r_norm)
        {
            RefinableEstimate kept = est;
            kept.converged = true;
            return kept;
        }
        for (std::size_t i = 0; i < free.size(); ++i)
            out.coeffs.row(free[i]) = T.row(static_cast<Eigen::Index>(i));
        out.residual = std::move(R);
        ++out.iterations;
        return out;
    }

    RefinableEstimate offgrid_run(const SparseEstimate &on_grid, const Dictionary &dict, const CMat &E, const CMat &C,
                                  int max_iters)
    {
        RefinableEstimate est = make_refinable(on_grid, dict, E, C);
        for (int t = 0; t < max_iters && !est.converged; ++t)
            est = refine_iteration(est, E, C, dict.geom);
        return est;
    }

} // namespace drisce
