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

#include "drisce/gamp.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace drisce;

namespace
{
    struct Moments
    {
        cplx mean;
        double var;
        double slab_prob;
    };

    // Brute-force posterior moments on a square grid in the complex plane
    Moments quadrature(cplx psi, double tau, double kappa, const RVec &w, const CVec &nu, const RVec &v)
    {
        const double half = 9.0, h = 0.015;
        const int n = static_cast<int>(2 * half / h);
        double mass = 0.0, m2 = 0.0;
        cplx m1 = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int k = 0; k <= n; ++k)
            {
                const cplx t(-half + i * h, -half + k * h);
                double prior = 0.0;
                for (int l = 0; l < w.size(); ++l)
                    prior += w[l] * std::exp(-std::norm(t - nu[l]) / v[l]) / (pi * v[l]);
                const double p = kappa * prior * std::exp(-std::norm(psi - t) / tau) / (pi * tau) * h * h;
                mass += p;
                m1 += p * t;
                m2 += p * std::norm(t);
            }
        const double spike = (1.0 - kappa) * std::exp(-std::norm(psi) / tau) / (pi * tau);
        const double total = mass + spike;
        const cplx mean = m1 / total;
        return {mean, m2 / total - std::norm(mean), mass / total};
    }

    std::vector<int> top_rows(const CMat &X, int P)
    {
        const RVec e = X.rowwise().squaredNorm();
        std::vector<int> idx(e.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return e[a] > e[b]; });
        idx.resize(P);
        std::sort(idx.begin(), idx.end());
        return idx;
    }
} // namespace

TEST_CASE("solver config")
{
    SolverConfig cfg;
    CHECK(cfg.damping == 0.7);
    CHECK_NOTHROW(cfg.validate());
    cfg.damping = 0.0;
    CHECK_THROWS_AS(cfg.validate(), invalid_input);
    cfg = SolverConfig{};
    cfg.em_tol = -1.0;
    CHECK_THROWS_AS(cfg.validate(), invalid_input);
    cfg = SolverConfig{};
    cfg.gm_components = 0;
    CHECK_THROWS_AS(cfg.validate(), invalid_input);
}

TEST_CASE("output denoiser examples")
{
    const auto o = output_denoiser(cplx(1, 1), 1.0, cplx(3, 0), 1.0);
    CHECK(std::abs(o.s_hat - cplx(1.0, -0.5)) < 1e-15);
    CHECK(o.tau_s == 0.5);
    const auto z = output_denoiser(cplx(1, 1), std::numeric_limits<double>::infinity(), cplx(3, 0), 1.0);
    CHECK(z.s_hat == cplx(0.0));
    CHECK(z.tau_s == 0.0);
    const auto zero_tau = output_denoiser(cplx(0, 0), 0.0, cplx(2, 4), 4.0);
    CHECK(std::abs(zero_tau.s_hat - cplx(0.5, 1.0)) < 1e-15);
    CHECK_THROWS_AS(output_denoiser(0.0, 1.0, 0.0, 0.0), invalid_input);
    CHECK_THROWS_AS(output_denoiser(0.0, -1.0, 0.0, 1.0), invalid_input);
}

TEST_CASE("input denoiser limits")
{
    const RVec w = RVec::Constant(1, 1.0), v = RVec::Constant(1, 2.0);
    const CVec nu = CVec::Constant(1, cplx(0.5, -0.5));

    const auto off = input_denoiser(cplx(3, 1), 0.5, 0.0, w, nu, v);
    CHECK(off.t_hat == cplx(0.0));
    CHECK(off.tau_t == 0.0);
    CHECK(off.varpi == 0.0);

    const auto gauss = input_denoiser(cplx(3, 1), 0.5, 1.0, w, nu, v);
    const cplx lmmse = (cplx(3, 1) / 0.5 + nu[0] / 2.0) / (1.0 / 0.5 + 1.0 / 2.0);
    CHECK(std::abs(gauss.t_hat - lmmse) < 1e-12);
    CHECK(gauss.tau_t == doctest::Approx(1.0 / (2.0 + 0.5)));
    CHECK(gauss.varpi == 1.0);

    // Far from zero with a tiny slab prior probability the slab still wins
    const auto far = input_denoiser(cplx(40, 0), 0.1, 1e-6, w, nu, v);
    CHECK(far.varpi == doctest::Approx(1.0));

    CHECK_THROWS_AS(input_denoiser(0.0, 0.0, 0.5, w, nu, v), invalid_input);
    CHECK_THROWS_AS(input_denoiser(0.0, 1.0, 0.5, RVec::Ones(2), nu, v), invalid_input);
}

TEST_CASE("input denoiser matches quadrature")
{
    RVec w(2), v(2);
    CVec nu(2);
    w << 0.3, 0.7;
    v << 1.5, 0.4;
    nu << cplx(0.2, 0.1), cplx(-0.5, 0.3);
    for (const auto &[psi, tau, kappa] : {std::tuple{cplx(0.4, -0.3), 0.6, 0.3}, std::tuple{cplx(-1.2, 0.9), 0.2, 0.6},
                                          std::tuple{cplx(0.05, 0.02), 1.0, 0.1}})
    {
        const auto d = input_denoiser(psi, tau, kappa, w, nu, v);
        const auto q = quadrature(psi, tau, kappa, w, nu, v);
        CHECK(std::abs(d.t_hat - q.mean) < 1e-6);
        CHECK(d.tau_t == doctest::Approx(q.var).epsilon(1e-5));
        CHECK(d.varpi == doctest::Approx(q.slab_prob).epsilon(1e-5));
        double s = 0.0;
        for (double u : d.upsilon)
            s += u;
        CHECK(s == doctest::Approx(1.0));
    }
}

TEST_CASE("gaussian prior on a DFT operator reaches the linear MMSE mean")
{
    Rng rng(21);
    const int G = 12;
    CMat U(G, G);
    for (int m = 0; m < G; ++m)
        for (int g = 0; g < G; ++g)
            U(m, g) = std::polar(1.0 / std::sqrt(double(G)), -2.0 * pi * m * g / G);
    const DenseOperator Phi(U);
    const CMat E = complex_normal_matrix(rng, G, 2);
    GmmHyperparams th;
    th.kappa = RVec::Ones(G);
    th.weights = RMat::Ones(2, 1);
    th.means = CMat::Zero(2, 1);
    th.vars = RMat::Constant(2, 1, 2.0);
    th.noise_var = RVec::Constant(2, 0.5);
    SolverConfig cfg;
    cfg.max_gamp_iters = 500;
    cfg.inner_tol = 1e-28;
    GampState st = init_state(th, G);
    gamp_pass(E, Phi, th, cfg, st);
    const CMat expected = (2.0 / 2.5) * U.adjoint() * E;
    CHECK((st.t_hat - expected).norm() < 1e-8 * expected.norm());
    // With flat |Phi|^2 the variance recursion settles at tau^2 + rho tau - v rho = 0
    const double tau = 0.5 * (-0.5 + std::sqrt(0.25 + 4.0 * 2.0 * 0.5));
    CHECK((st.tau_t - RMat::Constant(G, 2, tau)).norm() < 1e-8);
}

TEST_CASE("em update examples")
{
    const int G = 4, M = 3;
    GmmHyperparams th;
    th.kappa = RVec::Constant(G, 0.5);
    th.weights = RMat::Ones(1, 1);
    th.means = CMat::Zero(1, 1);
    th.vars = RMat::Ones(1, 1);
    th.noise_var = RVec::Ones(1);
    GampState st = init_state(th, M);
    CMat E(M, 1);
    E << cplx(1, 0), cplx(0, 2), cplx(-2, 0);
    st.mu_hat = CMat::Zero(M, 1);
    st.tau_mu = RMat::Zero(M, 1);
    st.varpi << 1.0, 0.0, 0.0, 0.5;
    st.upsilon[0].setOnes();
    st.varrho[0] << cplx(2, 0), cplx(9, 9), cplx(9, 9), cplx(4, 0);
    st.varkappa[0] = RMat::Constant(G, 1, 0.25);
    const GmmHyperparams nx = em_update(th, st, E);
    CHECK(nx.noise_var[0] == doctest::Approx(3.0));
    CHECK(nx.kappa[0] == 1.0);
    CHECK(nx.kappa[1] == 0.0);
    CHECK(nx.kappa[3] == 0.5);
    CHECK(nx.weights(0, 0) == doctest::Approx(1.0));
    // weighted mean (1*2 + 0.5*4) / 1.5
    CHECK(std::abs(nx.means(0, 0) - cplx(8.0 / 3.0, 0.0)) < 1e-12);
    // weighted second moment about the previous mean plus the posterior spread
    CHECK(nx.vars(0, 0) == doctest::Approx((4.0 + 0.5 * 16.0) / 1.5 + 0.25));
    CHECK_NOTHROW(nx.validate());
}

TEST_CASE("planted sparse recovery")
{
    Rng rng(31);
    const int M = 40, G = 100, R = 3;
    const CMat A = complex_normal_matrix(rng, M, G, 1.0 / M);
    const std::vector<int> support{7, 23, 58, 91};
    CMat X = CMat::Zero(G, R);
    for (int g : support)
        X.row(g) = complex_normal_matrix(rng, 1, R);
    const CMat E = A * X + complex_normal_matrix(rng, M, R, 1e-6);
    const DenseOperator Phi(A);
    const auto res = m_em_gamp(E, Phi, SolverConfig{});
    CHECK(top_rows(res.state.t_hat, 4) == support);
    CHECK((res.state.t_hat - X).norm() < 0.05 * X.norm());
    CHECK(res.theta.noise_var.maxCoeff() < 1e-3);

    const auto again = m_em_gamp(E, Phi, SolverConfig{});
    CHECK(again.state.t_hat == res.state.t_hat);
}

TEST_CASE("init hyperparams")
{
    const CMat E = CMat::Ones(10, 2);
    const auto th = init_hyperparams(E, 40, SolverConfig{});
    CHECK(th.G() == 40);
    CHECK(th.R() == 2);
    CHECK(th.components() == 3);
    CHECK(th.kappa[0] == doctest::Approx(10.0 / 80.0));
    CHECK_NOTHROW(th.validate());
    CHECK(init_hyperparams(E, 4, SolverConfig{}).kappa[0] == 0.5);
    CHECK_THROWS_AS(init_hyperparams(CMat(0, 1), 4, SolverConfig{}), invalid_input);
}
