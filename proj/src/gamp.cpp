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

#include <algorithm>
#include <limits>

namespace drisce
{
    namespace
    {
        constexpr double neg_inf = -std::numeric_limits<double>::infinity();
        constexpr double var_floor = 1e-12;

        double log_cn(cplx x, cplx m, double v) { return -std::norm(x - m) / v - std::log(pi * v); }

        double safe_log(double p) { return p > 0.0 ? std::log(p) : neg_inf; }

        // Writes posterior pieces for one entry into the caller's buffers; returns (t_hat, tau_t, varpi)
        struct Scalar
        {
            cplx t_hat;
            double tau_t;
            double varpi;
        };

        Scalar denoise_entry(cplx psi, double tau, double kappa, const double *w, const cplx *nu, const double *vs,
                             int L, double *ups, cplx *rho, double *kap, double *logs)
        {
            const double spike = safe_log(1.0 - kappa) + log_cn(psi, 0.0, tau);
            double top = neg_inf;
            const double lk = safe_log(kappa);
            for (int l = 0; l < L; ++l)
            {
                logs[l] = lk + safe_log(w[l]) + log_cn(psi, nu[l], vs[l] + tau);
                top = std::max(top, logs[l]);
                kap[l] = 1.0 / (1.0 / tau + 1.0 / vs[l]);
                rho[l] = (psi / tau + nu[l] / vs[l]) * kap[l];
            }
            if (top == neg_inf)
            {
                for (int l = 0; l < L; ++l)
                    ups[l] = 1.0 / L;
                return {0.0, 0.0, 0.0};
            }
            double acc = 0.0;
            for (int l = 0; l < L; ++l)
                acc += std::exp(logs[l] - top);
            const double lse = top + std::log(acc);
            for (int l = 0; l < L; ++l)
                ups[l] = std::exp(logs[l] - lse);

            double varpi;
            if (spike == neg_inf)
                varpi = 1.0;
            else
            {
                const double d = spike - lse;
                varpi = d > 0.0 ? std::exp(-d) / (1.0 + std::exp(-d)) : 1.0 / (1.0 + std::exp(d));
            }

            cplx mean = 0.0;
            double m2 = 0.0;
            for (int l = 0; l < L; ++l)
            {
                mean += ups[l] * rho[l];
                m2 += ups[l] * (std::norm(rho[l]) + kap[l]);
            }
            const cplx t = varpi * mean;
            return {t, std::max(varpi * m2 - std::norm(t), 0.0), varpi};
        }
    } // namespace

    void SolverConfig::validate() const
    {
        if (max_gamp_iters < 1 || max_em_iters < 1 || gm_components < 1)
            throw invalid_input("SolverConfig: iteration counts and gm_components must be positive");
        if (!(inner_tol > 0.0))
            throw invalid_input("SolverConfig: inner_tol must be positive");
        if (!(damping > 0.0 && damping <= 1.0))
            throw invalid_input("SolverConfig: damping must lie in (0, 1]");
        if (!(em_tol >= 0.0))
            throw invalid_input("SolverConfig: em_tol must be non-negative");
    }

    void GmmHyperparams::validate() const
    {
        const Eigen::Index R = noise_var.size();
        if (weights.rows() != R || means.rows() != R || vars.rows() != R || weights.cols() != means.cols() ||
            weights.cols() != vars.cols() || weights.cols() < 1)
            throw invalid_input("GmmHyperparams: inconsistent shapes");
        for (Eigen::Index r = 0; r < R; ++r)
            if (std::abs(weights.row(r).sum() - 1.0) > 1e-10)
                throw invalid_input("GmmHyperparams: mixture weights must sum to one");
        if ((vars.array() <= 0.0).any() || (noise_var.array() <= 0.0).any())
            throw invalid_input("GmmHyperparams: variances must be positive");
        if ((kappa.array() < 0.0).any() || (kappa.array() > 1.0).any())
            throw invalid_input("GmmHyperparams: kappa must lie in [0, 1]");
    }

    OutputDenoised output_denoiser(cplx mu_hat, double tau_mu, cplx e, double rho)
    {
        if (!(rho > 0.0))
            throw invalid_input("output_denoiser: rho must be positive");
        if (tau_mu < 0.0)
            throw invalid_input("output_denoiser: tau_mu must be non-negative");
        if (std::isinf(tau_mu))
            return {0.0, 0.0};
        const double inv = 1.0 / (tau_mu + rho);
        return {(e - mu_hat) * inv, inv};
    }

    InputDenoised input_denoiser(cplx psi_hat, double tau_psi, double kappa, const RVec &weights, const CVec &means,
                                 const RVec &vars)
    {
        if (!(tau_psi > 0.0))
            throw invalid_input("input_denoiser: tau_psi must be positive");
        const int L = static_cast<int>(weights.size());
        if (means.size() != L || vars.size() != L || L < 1)
            throw invalid_input("input_denoiser: mixture parameter lengths differ");
        InputDenoised out;
        out.upsilon.resize(L);
        out.varrho.resize(L);
        out.varkappa.resize(L);
        std::vector<double> logs(L);
        const auto s = denoise_entry(psi_hat, tau_psi, kappa, weights.data(), means.data(), vars.data(), L,
                                     out.upsilon.data(), out.varrho.data(), out.varkappa.data(), logs.data());
        out.t_hat = s.t_hat;
        out.tau_t = s.tau_t;
        out.varpi = s.varpi;
        return out;
    }

    GmmHyperparams init_hyperparams(const CMat &E, Eigen::Index G, const SolverConfig &cfg)
    {
        cfg.validate();
        const Eigen::Index M = E.rows(), R = E.cols();
        if (M < 1 || R < 1 || G < 1)
            throw invalid_input("init_hyperparams: empty problem");
        const int L = cfg.gm_components;
        const double energy = E.squaredNorm();
        const double kbar = std::min(0.5, static_cast<double>(M) / (2.0 * G));

        GmmHyperparams th;
        th.kappa = RVec::Constant(G, kbar);
        th.weights = RMat::Constant(R, L, 1.0 / L);
        th.means = CMat::Zero(R, L);
        th.vars.resize(R, L);
        const double base = std::max(energy / (static_cast<double>(M) * R * kbar), var_floor);
        for (int l = 0; l < L; ++l)
            th.vars.col(l).setConstant(std::max(base * std::pow(10.0, -l), var_floor));
        th.noise_var = RVec::Constant(R, std::max(energy / (11.0 * M * R), var_floor));
        return th;
    }

    GampState init_state(const GmmHyperparams &theta, Eigen::Index M)
    {
        const Eigen::Index G = theta.G(), R = theta.R();
        const int L = theta.components();
        GampState st;
        st.t_hat.resize(G, R);
        st.tau_t.resize(G, R);
        for (Eigen::Index r = 0; r < R; ++r)
        {
            cplx m1 = 0.0;
            double m2 = 0.0;
            for (int l = 0; l < L; ++l)
            {
                m1 += theta.weights(r, l) * theta.means(r, l);
                m2 += theta.weights(r, l) * (theta.vars(r, l) + std::norm(theta.means(r, l)));
            }
            for (Eigen::Index g = 0; g < G; ++g)
            {
                const double k = theta.kappa[g];
                st.t_hat(g, r) = k * m1;
                st.tau_t(g, r) = std::max(k * m2 - std::norm(k * m1), 0.0);
            }
        }
        st.s_hat = CMat::Zero(M, R);
        st.tau_s = RMat::Zero(M, R);
        st.mu_hat = CMat::Zero(M, R);
        st.tau_mu = RMat::Zero(M, R);
        st.psi_hat = CMat::Zero(G, R);
        st.tau_psi = RMat::Zero(G, R);
        st.varpi = RMat::Zero(G, R);
        st.upsilon.assign(L, RMat::Constant(G, R, 1.0 / L));
        st.varrho.assign(L, CMat::Zero(G, R));
        st.varkappa.assign(L, RMat::Zero(G, R));
        return st;
    }

    void gamp_pass(const CMat &E, const LinearOperator &Phi, const GmmHyperparams &theta, const SolverConfig &cfg,
                   GampState &st)
    {
        cfg.validate();
        const Eigen::Index M = E.rows(), R = E.cols(), G = Phi.cols();
        if (Phi.rows() != M || theta.G() != G || theta.R() != R || st.t_hat.rows() != G || st.t_hat.cols() != R ||
            st.s_hat.rows() != M || st.s_hat.cols() != R)
            throw invalid_input("gamp_pass: dimension mismatch");
        const int L = theta.components();
        double d = cfg.damping;

        std::vector<double> w(L), vs(L), ups(L), kap(L), logs(L);
        std::vector<cplx> nu(L), rho(L);

        // Step-size guard: a residual far above the data energy restores the last good state and halves the step
        CMat phi_t = Phi.apply(st.t_hat);
        const double limit = 10.0 * std::max(E.squaredNorm(), (E - phi_t).squaredNorm()) + 1e-300;
        GampState saved = st;
        CMat saved_phi = phi_t;

        st.iterations = 0;
        for (int z = 0; z < cfg.max_gamp_iters; ++z)
        {
            // output linear step
            st.tau_mu = Phi.apply_abs2(st.tau_t);
            st.mu_hat = phi_t - (st.tau_mu.array() * st.s_hat.array()).matrix();

            // output nonlinear step
            CMat s_new(M, R);
            for (Eigen::Index r = 0; r < R; ++r)
                for (Eigen::Index m = 0; m < M; ++m)
                {
                    const double inv = 1.0 / (st.tau_mu(m, r) + theta.noise_var[r]);
                    s_new(m, r) = (E(m, r) - st.mu_hat(m, r)) * inv;
                    st.tau_s(m, r) = inv;
                }
            st.s_hat = d * s_new + (1.0 - d) * st.s_hat;

            // input linear step
            st.tau_psi = Phi.adjoint_abs2(st.tau_s).cwiseMax(1e-300).cwiseInverse();
            st.psi_hat = st.t_hat + (st.tau_psi.array() * Phi.adjoint(st.s_hat).array()).matrix();

            // input nonlinear step
            CMat t_new(G, R);
            for (Eigen::Index r = 0; r < R; ++r)
            {
                for (int l = 0; l < L; ++l)
                {
                    w[l] = theta.weights(r, l);
                    nu[l] = theta.means(r, l);
                    vs[l] = theta.vars(r, l);
                }
                for (Eigen::Index g = 0; g < G; ++g)
                {
                    const auto s = denoise_entry(st.psi_hat(g, r), std::max(st.tau_psi(g, r), var_floor * 1e-6),
                                                 theta.kappa[g], w.data(), nu.data(), vs.data(), L, ups.data(),
                                                 rho.data(), kap.data(), logs.data());
                    t_new(g, r) = s.t_hat;
                    st.tau_t(g, r) = s.tau_t;
                    st.varpi(g, r) = s.varpi;
                    for (int l = 0; l < L; ++l)
                    {
                        st.upsilon[l](g, r) = ups[l];
                        st.varrho[l](g, r) = rho[l];
                        st.varkappa[l](g, r) = kap[l];
                    }
                }
            }
            const CMat t_next = d * t_new + (1.0 - d) * st.t_hat;
            const double change = (t_next - st.t_hat).squaredNorm();
            st.t_hat = t_next;
            ++st.iterations;

            const bool finite = st.t_hat.allFinite() && st.s_hat.allFinite() && st.tau_t.allFinite();
            if (finite)
                phi_t = Phi.apply(st.t_hat);
            const double res = finite ? (E - phi_t).squaredNorm() : std::numeric_limits<double>::infinity();
            if (!(res <= limit))
            {
                const int done = st.iterations;
                st = saved;
                phi_t = saved_phi;
                st.iterations = done;
                d *= 0.5;
                if (d < 0.01)
                    break;
                continue;
            }
            saved = st;
            saved_phi = phi_t;
            if (!st.t_hat.allFinite())
                throw divergence_error("gamp_pass: non-finite state at iteration " + std::to_string(z));
            if (change < cfg.inner_tol)
                break;
        }
    }

    GmmHyperparams em_update(const GmmHyperparams &theta, const GampState &st, const CMat &E)
    {
        const Eigen::Index M = E.rows(), R = E.cols(), G = theta.G();
        const int L = theta.components();
        if (st.mu_hat.rows() != M || st.mu_hat.cols() != R || st.varpi.rows() != G)
            throw invalid_input("em_update: state does not match the problem");

        GmmHyperparams nx = theta;
        for (Eigen::Index r = 0; r < R; ++r)
        {
            const double rho = theta.noise_var[r];
            double acc = 0.0;
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double tm = st.tau_mu(m, r);
                acc += std::norm((E(m, r) - st.mu_hat(m, r)) / (tm / rho + 1.0)) + tm * rho / (tm + rho);
            }
            nx.noise_var[r] = std::max(acc / M, var_floor);

            const double total = st.varpi.col(r).sum();
            if (!(total > 0.0))
                continue;
            for (int l = 0; l < L; ++l)
            {
                double den = 0.0, var_num = 0.0;
                cplx mean_num = 0.0;
                for (Eigen::Index g = 0; g < G; ++g)
                {
                    const double wgt = st.varpi(g, r) * st.upsilon[l](g, r);
                    den += wgt;
                    mean_num += wgt * st.varrho[l](g, r);
                    var_num += wgt * (std::norm(theta.means(r, l) - st.varrho[l](g, r)) + st.varkappa[l](g, r));
                }
                nx.weights(r, l) = den / total;
                if (den > 0.0)
                {
                    nx.means(r, l) = mean_num / den;
                    nx.vars(r, l) = std::max(var_num / den, var_floor);
                }
            }
            const double wsum = nx.weights.row(r).sum();
            if (wsum > 0.0)
                nx.weights.row(r) /= wsum;
            else
                nx.weights.row(r) = theta.weights.row(r);
        }
        for (Eigen::Index g = 0; g < G; ++g)
            nx.kappa[g] = std::clamp(st.varpi.row(g).mean(), 0.0, 1.0);
        return nx;
    }

    EmGampResult m_em_gamp(const CMat &E, const LinearOperator &Phi, const SolverConfig &cfg)
    {
        return m_em_gamp(E, Phi, cfg, init_hyperparams(E, Phi.cols(), cfg));
    }

    EmGampResult m_em_gamp(const CMat &E, const LinearOperator &Phi, const SolverConfig &cfg,
                           const GmmHyperparams &theta0)
    {
        cfg.validate();
        if (E.rows() < 1 || E.cols() < 1 || Phi.cols() < 1)
            throw invalid_input("m_em_gamp: empty problem");
        EmGampResult res{init_state(theta0, E.rows()), theta0};
        for (int o = 0; o < cfg.max_em_iters; ++o)
        {
            const CMat before = res.state.t_hat;
            gamp_pass(E, Phi, res.theta, cfg, res.state);
            res.theta = em_update(res.theta, res.state, E);
            const double energy = res.state.t_hat.squaredNorm();
            if (o > 0 && energy > 0.0 && (res.state.t_hat - before).squaredNorm() < cfg.em_tol * energy)
                break;
        }
        return res;
    }

} // namespace drisce
