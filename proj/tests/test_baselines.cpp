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

#include <doctest.h>

#include <algorithm>

using namespace drisce;

namespace
{
    // Smallest least-squares residual over every K-subset of atoms
    double best_subset_residual(const CMat &Y, const CMat &Phi, int K)
    {
        const int G = static_cast<int>(Phi.cols());
        std::vector<char> mask(G, 0);
        std::fill(mask.begin(), mask.begin() + K, 1);
        double best = std::numeric_limits<double>::infinity();
        do
        {
            std::vector<int> idx;
            for (int g = 0; g < G; ++g)
                if (mask[g])
                    idx.push_back(g);
            CMat A(Phi.rows(), K);
            for (int k = 0; k < K; ++k)
                A.col(k) = Phi.col(idx[k]);
            best = std::min(best, (Y - A * least_squares(A, Y)).norm());
        } while (std::prev_permutation(mask.begin(), mask.end()));
        return best;
    }
} // namespace

TEST_CASE("omp worked example")
{
    CVec y(3);
    y << 0.0, 5.0, 1.0;
    const auto est = omp_solve(y, CMat::Identity(3, 3), {1, 0.0});
    REQUIRE(est.support.size() == 1);
    CHECK(est.support[0] == 1);
    CHECK(std::abs(est.coeffs(0, 0) - cplx(5.0)) < 1e-14);
    CHECK(std::abs(est.residual(2, 0) - cplx(1.0)) < 1e-14);
    CHECK(est.residual.col(0).head(2).norm() < 1e-14);

    const CMat d = est.dense(3);
    CHECK(d(1, 0) == est.coeffs(0, 0));
    CHECK(d(0, 0) == cplx(0.0));

    const auto two = omp_solve(y, CMat::Identity(3, 3), {2, 0.0});
    CHECK(two.support == std::vector<int>{1, 2});
    CHECK(two.residual.norm() < 1e-14);
}

TEST_CASE("column scaling does not bias selection")
{
    CMat Phi(2, 2);
    Phi << 10.0, 0.0, 0.0, 1.0;
    CVec y(2);
    y << 1.0, 2.0;
    CHECK(omp_solve(y, Phi, {1, 0.0}).support[0] == 1);
}

TEST_CASE("residual tolerance stops early")
{
    CVec y(3);
    y << 0.0, 5.0, 0.0;
    const auto est = omp_solve(y, CMat::Identity(3, 3), {3, 1e-9});
    CHECK(est.support.size() == 1);
    const auto none = omp_solve(y, CMat::Identity(3, 3), {3, 10.0});
    CHECK(none.support.empty());
    CHECK(none.coeffs.rows() == 0);
}

TEST_CASE("planted recovery matches the brute-force optimum")
{
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial)
    {
        const CMat Phi = complex_normal_matrix(rng, 8, 12);
        CMat X = CMat::Zero(12, 2);
        std::uniform_int_distribution<int> pick(0, 11);
        const int a = pick(rng);
        int b = pick(rng);
        while (b == a)
            b = pick(rng);
        X.row(a) = complex_normal_matrix(rng, 1, 2);
        X.row(b) = complex_normal_matrix(rng, 1, 2);
        const CMat Y = Phi * X;
        const auto est = somp_solve(Y, Phi, {2, 0.0});
        std::vector<int> truth{std::min(a, b), std::max(a, b)};
        std::vector<int> got = est.support;
        std::sort(got.begin(), got.end());
        CHECK(got == truth);
        CHECK(est.residual.norm() < 1e-9 * Y.norm());
        CHECK((est.dense(12) - X).norm() < 1e-9 * X.norm());
    }
}

TEST_CASE("greedy residual never beats the exhaustive search and is orthogonal to the support")
{
    Rng rng(43);
    for (int trial = 0; trial < 10; ++trial)
    {
        const CMat Phi = complex_normal_matrix(rng, 6, 9);
        const CMat Y = complex_normal_matrix(rng, 6, 3);
        const auto est = somp_solve(Y, Phi, {3, 0.0});
        CHECK(est.residual.norm() >= best_subset_residual(Y, Phi, 3) - 1e-10);
        for (int g : est.support)
            CHECK((Phi.col(g).adjoint() * est.residual).norm() < 1e-10 * Y.norm());
    }
}

TEST_CASE("operator variants agree")
{
    Rng rng(47);
    const CMat P1 = complex_normal_matrix(rng, 4, 5), P2 = complex_normal_matrix(rng, 3, 6);
    const KroneckerOperator K(P1, P2);
    const CMat dense = K.materialize();
    CMat oracle(12, 30);
    for (int i2 = 0; i2 < 3; ++i2)
        for (int i1 = 0; i1 < 4; ++i1)
            for (int g2 = 0; g2 < 6; ++g2)
                for (int g1 = 0; g1 < 5; ++g1)
                    oracle(i2 * 4 + i1, g2 * 5 + g1) = std::conj(P2(i2, g2)) * P1(i1, g1);
    CHECK((dense - oracle).norm() < 1e-12 * oracle.norm());

    const CMat Delta = complex_normal_matrix(rng, 5, 6);
    CHECK((unvec(K.apply(vec(Delta)).col(0), 4, 3) - P1 * Delta * P2.adjoint()).norm() < 1e-12 * Delta.norm() * 10);
    const CVec s = complex_normal_matrix(rng, 12, 1).col(0);
    CHECK((K.adjoint(s) - oracle.adjoint() * s).norm() < 1e-12 * 100);
    const RMat x = RMat::Random(30, 1).cwiseAbs();
    CHECK((K.apply_abs2(x) - oracle.cwiseAbs2() * x).norm() < 1e-10);
    const RMat r = RMat::Random(12, 1).cwiseAbs();
    CHECK((K.adjoint_abs2(r) - oracle.cwiseAbs2().transpose() * r).norm() < 1e-10);
    CHECK((K.column_norms() - oracle.colwise().norm().transpose()).norm() < 1e-10);
    CHECK((K.column(17) - oracle.col(17)).norm() < 1e-12);
    CHECK_THROWS_AS(K.materialize(10), invalid_input);

    RVec scale = RVec::LinSpaced(30, 1.0, 3.0);
    const ScaledOperator S(K, scale);
    const CMat scaled = oracle * scale.cwiseInverse().asDiagonal();
    const CVec x2 = complex_normal_matrix(rng, 30, 1).col(0);
    CHECK((S.apply(x2) - scaled * x2).norm() < 1e-10);
    CHECK((S.adjoint(s) - scaled.adjoint() * s).norm() < 1e-10);
    CHECK((S.apply_abs2(x) - scaled.cwiseAbs2() * x).norm() < 1e-10);
    CHECK((S.column_norms() - scaled.colwise().norm().transpose()).norm() < 1e-10);

    CMat spike = CMat::Zero(5, 6);
    spike(2, 3) = cplx(1.5, -0.5);
    const auto via_op = somp_solve(vec(P1 * spike * P2.adjoint()), K, {1, 0.0});
    REQUIRE(via_op.support.size() == 1);
    CHECK(via_op.support[0] == 3 * 5 + 2);
}

TEST_CASE("greedy config errors")
{
    CHECK_THROWS_AS(omp_solve(CVec::Ones(3), CMat::Identity(3, 3), {0, 0.0}), invalid_input);
    CHECK_THROWS_AS(omp_solve(CVec::Ones(3), CMat::Identity(3, 3), {4, 0.0}), invalid_input);
    CHECK_THROWS_AS(omp_solve(CVec::Ones(3), CMat::Identity(3, 3), {1, -1.0}), invalid_input);
    CHECK_THROWS_AS(omp_solve(CVec::Ones(2), CMat::Identity(3, 3), {1, 0.0}), invalid_input);
}
