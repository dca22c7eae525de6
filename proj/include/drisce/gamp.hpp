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

#ifndef DRISCE_GAMP_HPP
#define DRISCE_GAMP_HPP

#include "drisce/linear_operator.hpp"

#include <vector>

namespace drisce
{
    struct SolverConfig
    {
        int max_gamp_iters = 100; // Z
        int max_em_iters = 15;    // O_EM
        double inner_tol = 1e-7;  // epsilon, on the normalized problem
        int gm_components = 3;    // L_gm
        double damping = 0.7;     // 1 = undamped
        double em_tol = 1e-6;     // EM stops once ||dt||^2 / ||t||^2 between rounds drops below; 0 disables

        void validate() const;
    };

    // Spike-and-slab Gaussian-mixture prior with per-column mixtures and shared sparsity rates
    struct GmmHyperparams
    {
        RVec kappa;     // G
        RMat weights;   // R x L_gm
        CMat means;     // R x L_gm
        RMat vars;      // R x L_gm
        RVec noise_var; // R

        int G() const { return static_cast<int>(kappa.size()); }
        int R() const { return static_cast<int>(noise_var.size()); }
        int components() const { return static_cast<int>(weights.cols()); }
        void validate() const;
    };

    struct GampState
    {
        CMat t_hat;
        RMat tau_t;
        CMat s_hat;
        RMat tau_s;
        CMat mu_hat;
        RMat tau_mu;
        CMat psi_hat;
        RMat tau_psi;
        RMat varpi;                  // G x R
        std::vector<RMat> upsilon;   // per component, G x R
        std::vector<CMat> varrho;    // per component, G x R
        std::vector<RMat> varkappa;  // per component, G x R
        int iterations = 0;
    };

    struct OutputDenoised
    {
        cplx s_hat;
        double tau_s;
    };

    OutputDenoised output_denoiser(cplx mu_hat, double tau_mu, cplx e, double rho);

    struct InputDenoised
    {
        cplx t_hat;
        double tau_t = 0.0;
        double varpi = 0.0;
        std::vector<double> upsilon;
        std::vector<cplx> varrho;
        std::vector<double> varkappa;
    };

    InputDenoised input_denoiser(cplx psi_hat, double tau_psi, double kappa, const RVec &weights, const CVec &means,
                                 const RVec &vars);

    // Deterministic initial Theta from the data energy
    GmmHyperparams init_hyperparams(const CMat &E, Eigen::Index G, const SolverConfig &cfg);

    // Prior mean/variance start, s_hat = 0
    GampState init_state(const GmmHyperparams &theta, Eigen::Index M);

    // E-step: GAMP iterations until the tolerance or Z is hit; updates state in place
    void gamp_pass(const CMat &E, const LinearOperator &Phi, const GmmHyperparams &theta, const SolverConfig &cfg,
                   GampState &state);

    // M-step
    GmmHyperparams em_update(const GmmHyperparams &theta, const GampState &state, const CMat &E);

    struct EmGampResult
    {
        GampState state;
        GmmHyperparams theta;
    };

    EmGampResult m_em_gamp(const CMat &E, const LinearOperator &Phi, const SolverConfig &cfg);
    EmGampResult m_em_gamp(const CMat &E, const LinearOperator &Phi, const SolverConfig &cfg,
                           const GmmHyperparams &theta0);

    // Thrown when the message-passing state leaves the finite range
    class divergence_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

} // namespace drisce

#endif
