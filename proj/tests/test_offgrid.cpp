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

#include <doctest.h>

using namespace drisce;

namespace
{
    struct Planted
    {
        UpaGeometry geom{6, 6, 0.5};
        Dictionary dict;
        CMat C;
        CMat E;
        RVec ele, azi;
        CMat coeffs;
    };

    // Paths placed half a grid cell off the dictionary on both axes
    Planted plant(std::uint64_t seed, std::optional<std::pair<double, double>> anchor)
    {
        Planted p;
        Rng rng(seed);
        p.dict = build_dictionary(p.geom, {12, 12, anchor});
        p.C = complex_normal_matrix(rng, 30, 36, 1.0 / 30);
        p.ele.resize(2);
        p.azi.resize(2);
        const int first = anchor ? 0 : 3 * 12 + 4;
        p.ele[0] = p.dict.x1[first] + (anchor ? 0.0 : 1.0 / 12);
        p.azi[0] = p.dict.x2[first] + (anchor ? 0.0 : 1.0 / 12);
        p.ele[1] = p.dict.x1[8 * 12 + 9] + 1.0 / 12;
        p.azi[1] = p.dict.x2[8 * 12 + 9] - 1.0 / 12;
        p.coeffs = complex_normal_matrix(rng, 2, 2);
        p.coeffs.row(0) *= 2.0;
        p.E = p.C * partial_dictionary(p.geom, p.ele, p.azi) * p.coeffs;
        return p;
    }
} // namespace

TEST_CASE("steering gradient hand example")
{
    const auto [de, da] = steering_gradients({2, 1, 0.5}, 0.0, 0.0);
    CHECK(de.norm() < 1e-15);
    CHECK(std::abs(da[0]) < 1e-15);
    CHECK(std::abs(da[1] - cplx(0.0, pi / std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("steering gradients match finite differences")
{
    Rng rng(51);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (const UpaGeometry g : {UpaGeometry{4, 3, 0.5}, UpaGeometry{3, 5, 0.25}})
        for (int k = 0; k < 5; ++k)
        {
            const double e = u(rng), a = u(rng), h = 1e-6, s = 2.0 * g.spacing_over_wavelength;
            const auto [de, da] = steering_gradients(g, e, a);
            const CVec fe = (steering_vector(g, s * (e + h), s * a) - steering_vector(g, s * (e - h), s * a)) / (2 * h);
            const CVec fa = (steering_vector(g, s * e, s * (a + h)) - steering_vector(g, s * e, s * (a - h))) / (2 * h);
            CHECK((de - fe).norm() < 1e-6 * fe.norm());
            CHECK((da - fa).norm() < 1e-6 * fa.norm());
        }
}

TEST_CASE("weighted least squares over matrix atoms")
{
    Rng rng(53);
    const std::vector<CMat> A{complex_normal_matrix(rng, 4, 3), complex_normal_matrix(rng, 4, 3)};
    const CMat Y = 2.0 * A[0] + cplx(0.0, -3.0) * A[1];
    const CVec w = mls_solve(Y, A);
    CHECK(std::abs(w[0] - cplx(2.0)) < 1e-12);
    CHECK(std::abs(w[1] - cplx(0.0, -3.0)) < 1e-12);

    // Noisy case checked against the normal equations
    const CMat N = Y + complex_normal_matrix(rng, 4, 3, 0.1);
    const CVec wn = mls_solve(N, A);
    Eigen::Matrix2cd gram;
    Eigen::Vector2cd rhs;
    for (int i = 0; i < 2; ++i)
    {
        rhs[i] = (A[i].adjoint() * N).trace();
        for (int j = 0; j < 2; ++j)
            gram(i, j) = (A[i].adjoint() * A[j]).trace();
    }
    const Eigen::Vector2cd ref = gram.inverse() * rhs;
    CHECK((wn - CVec(ref)).norm() < 1e-10);

    CHECK(mls_solve(Y, {}).size() == 0);
    CHECK_THROWS_AS(mls_solve(Y, {CMat::Ones(3, 3)}), invalid_input);
}

TEST_CASE("half-cell offsets are refined")
{
    const Planted p = plant(55, std::nullopt);
    const DenseOperator Phi(p.C * p.dict.atoms);
    const SparseEstimate on = somp_solve(p.E, Phi, {2, 0.0});
    const RefinableEstimate start = make_refinable(on, p.dict, p.E, p.C);
    const RefinableEstimate fin = offgrid_run(on, p.dict, p.E, p.C, 30);
    CHECK(fin.residual.norm() < 0.05 * start.residual.norm());
    CHECK(fin.iterations >= 1);
    for (int b = 0; b < 2; ++b)
    {
        double best = 1e9;
        for (int t = 0; t < 2; ++t)
            best = std::min(best, std::hypot(fin.comp_ele[b] - p.ele[t], fin.comp_azi[b] - p.azi[t]));
        CHECK(best < 0.2 / 12);
    }
    const CMat truth = partial_dictionary(p.geom, p.ele, p.azi) * p.coeffs;
    CHECK((reconstruct(fin, p.geom) - truth).norm() < (reconstruct(start, p.geom) - truth).norm());

    RefinableEstimate step = start;
    for (int t = 0; t < 5; ++t)
    {
        const RefinableEstimate next = refine_iteration(step, p.E, p.C, p.geom);
        CHECK(next.residual.norm() <= step.residual.norm() + 1e-12);
        step = next;
    }
}

TEST_CASE("los path is held fixed")
{
    const UpaGeometry geom{6, 6, 0.5};
    const Direction los = direction_between({0, 0, 5}, {10.0 * std::numbers::sqrt2, 10.0 * std::numbers::sqrt2, 6});
    const auto anchor = spatial_frequencies(geom, los);
    const Planted p = plant(57, anchor);
    const DenseOperator Phi(p.C * p.dict.atoms);
    const SparseEstimate on = somp_solve(p.E, Phi, {2, 0.0});
    const RefinableEstimate start = make_refinable(on, p.dict, p.E, p.C);
    REQUIRE(start.los_index.has_value());
    const int b = *start.los_index;
    const RefinableEstimate fin = offgrid_run(on, p.dict, p.E, p.C, 30);
    CHECK(fin.comp_ele[b] == start.comp_ele[b]);
    CHECK(fin.comp_azi[b] == start.comp_azi[b]);
    CHECK(fin.comp_ele[b] == doctest::Approx(los.comp_ele()));
    CHECK(fin.residual.norm() < start.residual.norm());

    // Every path anchored leaves nothing to refine
    SparseEstimate only_los;
    only_los.support = {0};
    only_los.coeffs = CMat::Ones(1, 2);
    const RefinableEstimate r = offgrid_run(only_los, p.dict, p.E, p.C, 5);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
}

TEST_CASE("exact on-grid input is left alone")
{
    Rng rng(59);
    const UpaGeometry geom{4, 4, 0.5};
    const Dictionary dict = build_dictionary(geom, {8, 8, std::nullopt});
    const CMat C = complex_normal_matrix(rng, 12, 16);
    SparseEstimate on;
    on.support = {5, 40};
    on.coeffs = complex_normal_matrix(rng, 2, 1);
    const CMat E = C * dict.atoms * on.dense(64);
    const RefinableEstimate fin = offgrid_run(on, dict, E, C, 10);
    CHECK(fin.converged);
    CHECK(fin.comp_ele[0] == doctest::Approx(dict.x1[5]));
    CHECK(fin.residual.norm() < 1e-12 * E.norm());
    CHECK_THROWS_AS(make_refinable(on, dict, E, CMat::Ones(12, 15)), invalid_input);
}
