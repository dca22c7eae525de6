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

#include "drisce/estimators.hpp"

#include <chrono>
#include <limits>

namespace drisce
{
    std::string SchemeSpec::label() const
    {
        std::string s;
        switch (framework)
        {
        case Framework::svd_mmv:
            s = "svdmmv";
            break;
        case Framework::svd_cs:
            s = "svdcs";
            break;
        case Framework::kronecker:
            s = "kron";
            break;
        }
        s += solver == SolverKind::em_gamp ? "-gamp" : "-omp";
        if (framework == Framework::svd_mmv)
            s += offgrid ? "-offgrid" : "-ongrid";
        return s;
    }

    SchemeSpec SchemeSpec::parse(const std::string &label)
    {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true)
        {
            const auto pos = label.find('-', start);
            parts.push_back(label.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
            if (pos == std::string::npos)
                break;
            start = pos + 1;
        }
        if (parts.size() < 2 || parts.size() > 3)
            throw invalid_input("unknown scheme '" + label + "'");
        SchemeSpec s;
        if (parts[0] == "svdmmv")
            s.framework = Framework::svd_mmv;
        else if (parts[0] == "svdcs")
            s.framework = Framework::svd_cs;
        else if (parts[0] == "kron")
            s.framework = Framework::kronecker;
        else
            throw invalid_input("unknown framework in scheme '" + label + "'");
        if (parts[1] == "gamp")
            s.solver = SolverKind::em_gamp;
        else if (parts[1] == "omp")
            s.solver = SolverKind::somp;
        else
            throw invalid_input("unknown solver in scheme '" + label + "'");
        if (parts.size() == 3)
        {
            if (parts[2] == "offgrid")
                s.offgrid = true;
            else if (parts[2] == "ongrid")
                s.offgrid = false;
            else
                throw invalid_input("unknown grid mode in scheme '" + label + "'");
        }
        else
            s.offgrid = false;
        if (s.offgrid && s.framework != Framework::svd_mmv)
            throw invalid_input("scheme '" + label + "': off-grid refinement is only defined for svdmmv");
        if (parts.size() == 2 && s.framework == Framework::svd_mmv)
            throw invalid_input("scheme '" + label + "': svdmmv needs -offgrid or -ongrid");
        return s;
    }

    std::string assumption_name(Assumption a) { return a == Assumption::perfect_aux ? "perfect" : "imperfect"; }

    CMat TaggedUsers::stacked() const
    {
        if (value.empty())
            return {};
        CMat out(value.front().size(), static_cast<Eigen::Index>(value.size()));
        for (std::size_t u = 0; u < value.size(); ++u)
            out.col(static_cast<Eigen::Index>(u)) = value[u];
        return out;
    }

    double compute_nmse(const CMat &truth, const CMat &estimate)
    {
        if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
            throw invalid_input("compute_nmse: shape mismatch");
        const double den = truth.squaredNorm();
        if (!(den > 0.0))
            throw invalid_input("compute_nmse: truth has zero norm");
        return (estimate - truth).squaredNorm() / den;
    }

    CMat solve_linear(const LinearSystem &sys, const Dictionary &dict, SolverKind solver, bool offgrid, int P,
                      const EstimatorConfig &cfg)
    {
        if (sys.C.cols() != dict.atoms.rows())
            throw invalid_input("solve_linear: measurement matrix does not match the dictionary");
        const CMat Phi = sys.C * dict.atoms;
        const DenseOperator op(Phi);
        const SparseEstimate est = recover_mmv(sys.Y, op, {solver, P, cfg.gamp});
        if (offgrid)
            return reconstruct(offgrid_run(est, dict, sys.Y, sys.C, cfg.offgrid_iters), dict.geom);
        CMat A(dict.atoms.rows(), static_cast<Eigen::Index>(est.support.size()));
        for (std::size_t k = 0; k < est.support.size(); ++k)
            A.col(static_cast<Eigen::Index>(k)) = dict.atoms.col(est.support[k]);
        return A * est.coeffs;
    }

    CMat solve_bilinear(const BilinearSystem &sys, const Dictionary &d1, const Dictionary &d2,
                        const SchemeSpec &scheme, int P, const EstimatorConfig &cfg)
    {
        if (sys.C1.cols() != d1.atoms.rows() || sys.C2.cols() != d2.atoms.rows() || sys.Y.rows() != sys.C1.rows() ||
            sys.Y.cols() != sys.C2.rows())
            throw invalid_input("solve_bilinear: operand dimensions are inconsistent");
        const CMat Phi1 = sys.C1 * d1.atoms;
        const CMat Phi2 = sys.C2 * d2.atoms;
        const RecoveryOptions opts{scheme.solver, P, cfg.gamp};

        if (scheme.framework == Framework::svd_mmv)
        {
            const int R = static_cast<int>(std::min<Eigen::Index>({P, sys.Y.rows(), sys.Y.cols()}));
            const SvdSplit split = split_via_svd(sys.Y, R);
            const DenseOperator op1(Phi1), op2(Phi2);
            const FactorEstimates fe = recover_factors(split, op1, op2, opts);
            if (scheme.offgrid)
            {
                const CMat left = reconstruct(offgrid_run(fe.f1, d1, split.E1, sys.C1, cfg.offgrid_iters), d1.geom);
                const CMat right = reconstruct(offgrid_run(fe.f2, d2, split.E2, sys.C2, cfg.offgrid_iters), d2.geom);
                return left * right.adjoint();
            }
            return d1.atoms * reassemble(fe, d1.size(), d2.size()) * d2.atoms.adjoint();
        }
        if (scheme.offgrid)
            throw invalid_input("solve_bilinear: off-grid refinement needs the svd_mmv framework");
        const BaselineMode mode = scheme.framework == Framework::svd_cs ? BaselineMode::svd_cs : BaselineMode::kronecker;
        const CMat Delta = baseline_solve(sys.Y, Phi1, Phi2, mode, opts, {cfg.explicit_kronecker});
        return d1.atoms * Delta * d2.atoms.adjoint();
    }

    std::vector<CVec> estimate_ris_user_at_ris(const std::vector<CMat> &despread_ris, const CMat &V,
                                               const Dictionary &dict, SolverKind solver, bool offgrid,
                                               const EstimatorConfig &cfg)
    {
        std::vector<CVec> out;
        out.reserve(despread_ris.size());
        for (const auto &y : despread_ris)
            out.push_back(solve_linear(assemble_h_at_ris(y, V), dict, solver, offgrid, cfg.p_h, cfg).col(0));
        return out;
    }

    namespace
    {
        void require(Provenance tag, const char *what)
        {
            if (tag == Provenance::none)
                throw invalid_input(std::string(what) + " has no provenance; run the upstream stage first");
        }
    } // namespace

    CMat estimate_bs_ris(const std::vector<CMat> &despread_bs, const CMat &V, const TaggedUsers &h,
                         const Dictionary &dict_bs, const Dictionary &dict_ris, const SchemeSpec &scheme,
                         const EstimatorConfig &cfg)
    {
        require(h.tag, "estimate_bs_ris: RIS-user estimate");
        const BilinearSystem sys = assemble_f_mae(despread_bs, V, h.value);
        return solve_bilinear(sys, dict_bs, dict_ris, scheme, cfg.p_f, cfg);
    }

    CMat estimate_inter_ris(const std::vector<CMat> &despread_bs, const ReflectionSchedule &sched,
                            const TaggedMatrix &F1, const TaggedMatrix &F2, const TaggedUsers &H1,
                            const TaggedUsers &H2, const Dictionary &dict_ris2, const Dictionary &dict_ris1,
                            const SchemeSpec &scheme, const EstimatorConfig &cfg)
    {
        require(F2.tag, "estimate_inter_ris: F2 estimate");
        require(F1.tag, "estimate_inter_ris: F1 estimate");
        require(H1.tag, "estimate_inter_ris: RIS 1 user estimate");
        require(H2.tag, "estimate_inter_ris: RIS 2 user estimate");
        const BilinearSystem sys =
            assemble_d_system(despread_bs, sched, F1.value, F2.value, H1.stacked(), H2.stacked());
        return solve_bilinear(sys, dict_ris2, dict_ris1, scheme, cfg.p_d, cfg);
    }

    std::vector<CVec> estimate_small_timescale(const std::vector<CMat> &despread_bs, const CMat &V,
                                               const TaggedMatrix &F, const Dictionary &dict, SolverKind solver,
                                               bool offgrid, const EstimatorConfig &cfg)
    {
        require(F.tag, "estimate_small_timescale: F estimate");
        std::vector<CVec> out;
        out.reserve(despread_bs.size());
        for (const auto &Z : despread_bs)
            out.push_back(solve_linear(assemble_h_small(Z, V, F.value), dict, solver, offgrid, cfg.p_h, cfg).col(0));
        return out;
    }

    namespace
    {
        double wrap_freq(double x)
        {
            while (x > 1.0)
                x -= 2.0;
            while (x <= -1.0)
                x += 2.0;
            return x;
        }

        Dictionary anchored(const UpaGeometry &geom, GridSpec spec, const Direction &dir)
        {
            const auto [x1, x2] = spatial_frequencies(geom, dir);
            spec.los_anchor = std::make_pair(wrap_freq(x1), wrap_freq(x2));
            return build_dictionary(geom, spec);
        }
    } // namespace

    PipelineDictionaries build_pipeline_dictionaries(const SystemDims &dims, const GridSpec &grid_bs,
                                                     const GridSpec &grid_ris, const LosAngles &los)
    {
        PipelineDictionaries d;
        for (int i = 0; i < 2; ++i)
        {
            d.bs[i] = anchored(dims.bs, grid_bs, los.bs_side[i]);
            d.ris[i] = anchored(dims.ris, grid_ris, los.ris_side[i]);
        }
        d.ris2_d = anchored(dims.ris, grid_ris, los.ris2_side);
        d.ris1_d = anchored(dims.ris, grid_ris, los.ris1_side);
        GridSpec plain = grid_ris;
        plain.los_anchor.reset();
        d.user = build_dictionary(dims.ris, plain);
        return d;
    }

    const std::vector<std::string> &report_channels()
    {
        static const std::vector<std::string> names{"F1", "F2", "D", "H1_direct", "H2_direct", "H1_mae", "H2_mae"};
        return names;
    }

    namespace
    {
        class Stopwatch
        {
        public:
            explicit Stopwatch(bool on) : on_(on), t0_(std::chrono::steady_clock::now()) {}
            double ms() const
            {
                if (!on_)
                    return 0.0;
                return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
            }

        private:
            bool on_;
            std::chrono::steady_clock::time_point t0_;
        };

        CMat stack_users(const std::vector<CVec> &h)
        {
            return TaggedUsers{h, Provenance::pipeline}.stacked();
        }

        const std::array<std::vector<CVec>, 2> &ris_side(RisSideCache &cache, const TrialObservations &obs,
                                                         const PipelineDictionaries &dicts, SolverKind solver,
                                                         bool offgrid, const EstimatorConfig &cfg, bool timing)
        {
            const auto key = std::make_pair(static_cast<int>(solver), offgrid);
            auto it = cache.direct.find(key);
            if (it != cache.direct.end())
                return it->second;
            std::array<std::vector<CVec>, 2> est;
            std::array<double, 2> ms{};
            for (int i = 0; i < 2; ++i)
            {
                Stopwatch sw(timing);
                est[i] = estimate_ris_user_at_ris(obs.ris_despread[i], obs.V_large[i], dicts.user, solver, offgrid, cfg);
                ms[i] = sw.ms();
            }
            cache.direct_ms[key] = ms;
            return cache.direct.emplace(key, std::move(est)).first->second;
        }
    } // namespace

    EstimationReport run_pipeline(const ChannelRealization &truth, const TrialObservations &obs,
                                  const PipelineDictionaries &dicts, const SchemeSpec &scheme, Assumption assumption,
                                  const EstimatorConfig &cfg, RisSideCache &cache, bool timing)
    {
        EstimationReport rep;
        rep.scheme = scheme.label();
        rep.assumption = assumption;
        rep.channels = report_channels();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto &c : rep.channels)
        {
            rep.nmse[c] = nan;
            rep.runtime_ms[c] = 0.0;
        }
        const bool perfect = assumption == Assumption::perfect_aux;

        auto stage = [&](const std::string &name, const CMat &truth_m, auto &&fn) -> bool {
            try
            {
                Stopwatch sw(timing);
                CMat est = fn();
                rep.runtime_ms[name] = sw.ms();
                rep.nmse[name] = compute_nmse(truth_m, est);
                rep.estimates[name] = std::move(est);
                return true;
            }
            catch (const std::exception &e)
            {
                rep.errors[name] = e.what();
                return false;
            }
        };

        // RIS-side direct estimates with this scheme's solver
        try
        {
            const auto &direct = ris_side(cache, obs, dicts, scheme.solver, scheme.offgrid, cfg, timing);
            const auto &ms = cache.direct_ms[{static_cast<int>(scheme.solver), scheme.offgrid}];
            for (int i = 0; i < 2; ++i)
            {
                const std::string name = i == 0 ? "H1_direct" : "H2_direct";
                const CMat est = stack_users(direct[i]);
                rep.nmse[name] = compute_nmse(truth.H(i), est);
                rep.runtime_ms[name] = ms[i];
                rep.estimates[name] = est;
            }
        }
        catch (const std::exception &e)
        {
            rep.errors["H1_direct"] = rep.errors["H2_direct"] = e.what();
        }

        // Auxiliary RIS-user channels for the large-timescale stages
        std::array<TaggedUsers, 2> h_aux;
        bool aux_ok = true;
        if (perfect)
        {
            for (int i = 0; i < 2; ++i)
                h_aux[i] = {truth.h[i], Provenance::ground_truth};
        }
        else
        {
            try
            {
                const auto &aux = ris_side(cache, obs, dicts, SolverKind::em_gamp, true, cfg, timing);
                for (int i = 0; i < 2; ++i)
                    h_aux[i] = {aux[i], Provenance::pipeline};
            }
            catch (const std::exception &e)
            {
                aux_ok = false;
                rep.errors["F1"] = rep.errors["F2"] = rep.errors["D"] = std::string("aux: ") + e.what();
            }
        }

        std::array<TaggedMatrix, 2> F_hat;
        for (int i = 0; i < 2 && aux_ok; ++i)
        {
            const std::string name = i == 0 ? "F1" : "F2";
            if (stage(name, truth.F[i], [&] {
                    return estimate_bs_ris(obs.bs_despread[i], obs.V_large[i], h_aux[i], dicts.bs[i], dicts.ris[i],
                                           scheme, cfg);
                }))
                F_hat[i] = {rep.estimates[name], Provenance::pipeline};
        }

        std::array<TaggedMatrix, 2> F_aux;
        for (int i = 0; i < 2; ++i)
            F_aux[i] = perfect ? TaggedMatrix{truth.F[i], Provenance::ground_truth} : F_hat[i];

        if (aux_ok)
            stage("D", truth.D, [&] {
                return estimate_inter_ris(obs.d_despread, obs.d_sched, F_aux[0], F_aux[1], h_aux[0], h_aux[1],
                                          dicts.ris2_d, dicts.ris1_d, scheme, cfg);
            });

        for (int i = 0; i < 2; ++i)
        {
            const std::string name = i == 0 ? "H1_mae" : "H2_mae";
            stage(name, truth.H(i), [&] {
                return stack_users(estimate_small_timescale(obs.small_despread[i], obs.V_small[i], F_aux[i],
                                                            dicts.user, scheme.solver, scheme.offgrid, cfg));
            });
        }
        return rep;
    }

} // namespace drisce
