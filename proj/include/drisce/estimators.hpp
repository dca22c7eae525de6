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

#ifndef DRISCE_ESTIMATORS_HPP
#define DRISCE_ESTIMATORS_HPP

#include "drisce/dictionary.hpp"
#include "drisce/offgrid.hpp"
#include "drisce/svd_mmv_cs.hpp"
#include "drisce/training_protocol.hpp"

#include <map>
#include <string>
#include <vector>

namespace drisce
{
    enum class Framework
    {
        svd_mmv,
        svd_cs,
        kronecker
    };

    struct SchemeSpec
    {
        Framework framework = Framework::svd_mmv;
        SolverKind solver = SolverKind::em_gamp;
        bool offgrid = true;

        // e.g. svdmmv-gamp-offgrid, svdcs-omp, kron-gamp
        std::string label() const;
        static SchemeSpec parse(const std::string &label);
    };

    enum class Assumption
    {
        perfect_aux,
        imperfect_aux
    };

    std::string assumption_name(Assumption a);

    enum class Provenance
    {
        none,
        ground_truth,
        pipeline
    };

    struct TaggedMatrix
    {
        CMat value;
        Provenance tag = Provenance::none;
    };

    struct TaggedUsers
    {
        std::vector<CVec> value;
        Provenance tag = Provenance::none;

        CMat stacked() const;
    };

    struct EstimatorConfig
    {
        int p_f = 3;
        int p_d = 3;
        int p_h = 3;
        SolverConfig gamp;
        int offgrid_iters = 10;
        bool explicit_kronecker = false;
    };

    double compute_nmse(const CMat &truth, const CMat &estimate);

    // Channel estimate A X for Y ~= C A X; P atoms
    CMat solve_linear(const LinearSystem &sys, const Dictionary &dict, SolverKind solver, bool offgrid, int P,
                      const EstimatorConfig &cfg);

    // Channel estimate A1 Delta A2^H for Y ~= C1 A1 Delta A2^H C2^H
    CMat solve_bilinear(const BilinearSystem &sys, const Dictionary &d1, const Dictionary &d2,
                        const SchemeSpec &scheme, int P, const EstimatorConfig &cfg);

    // Per-user SMV at the RIS RF chain; despread_ris[u] is 1 x Q
    std::vector<CVec> estimate_ris_user_at_ris(const std::vector<CMat> &despread_ris, const CMat &V,
                                               const Dictionary &dict, SolverKind solver, bool offgrid,
                                               const EstimatorConfig &cfg);

    CMat estimate_bs_ris(const std::vector<CMat> &despread_bs, const CMat &V, const TaggedUsers &h,
                         const Dictionary &dict_bs, const Dictionary &dict_ris, const SchemeSpec &scheme,
                         const EstimatorConfig &cfg);

    CMat estimate_inter_ris(const std::vector<CMat> &despread_bs, const ReflectionSchedule &sched,
                            const TaggedMatrix &F1, const TaggedMatrix &F2, const TaggedUsers &H1,
                            const TaggedUsers &H2, const Dictionary &dict_ris2, const Dictionary &dict_ris1,
                            const SchemeSpec &scheme, const EstimatorConfig &cfg);

    std::vector<CVec> estimate_small_timescale(const std::vector<CMat> &despread_bs, const CMat &V,
                                               const TaggedMatrix &F, const Dictionary &dict, SolverKind solver,
                                               bool offgrid, const EstimatorConfig &cfg);

    // Everything a trial observed; index i is RIS i+1
    struct TrialObservations
    {
        PilotBook pilots;
        std::array<CMat, 2> V_large;                      // L x Q_i, shared by the RIS and BS records
        std::array<std::vector<CMat>, 2> ris_despread;    // per user, 1 x Q_i
        std::array<std::vector<CMat>, 2> bs_despread;     // per user, J x Q_i
        ReflectionSchedule d_sched;
        std::vector<CMat> d_despread;                     // per user, J x N_X N_Y
        std::array<CMat, 2> V_small;                      // L x Qbar_i
        std::array<std::vector<CMat>, 2> small_despread;  // per user, J x Qbar_i
    };

    struct PipelineDictionaries
    {
        std::array<Dictionary, 2> bs;  // anchored at the BS toward RIS i
        std::array<Dictionary, 2> ris; // anchored at RIS i toward the BS
        Dictionary ris2_d;             // anchored at RIS 2 toward RIS 1
        Dictionary ris1_d;             // anchored at RIS 1 toward RIS 2
        Dictionary user;               // uniform
    };

    PipelineDictionaries build_pipeline_dictionaries(const SystemDims &dims, const GridSpec &grid_bs,
                                                     const GridSpec &grid_ris, const LosAngles &los);

    struct EstimationReport
    {
        std::string scheme;
        Assumption assumption = Assumption::perfect_aux;
        std::vector<std::string> channels;          // reporting order
        std::map<std::string, CMat> estimates;
        std::map<std::string, double> nmse;
        std::map<std::string, double> runtime_ms;
        std::map<std::string, std::string> errors;  // per channel, when a stage failed
    };

    // Channel names in reporting order
    const std::vector<std::string> &report_channels();

    // Caches the scheme-independent RIS-side estimates of one trial
    struct RisSideCache
    {
        std::map<std::pair<int, bool>, std::array<std::vector<CVec>, 2>> direct;
        std::map<std::pair<int, bool>, std::array<double, 2>> direct_ms;
    };

    EstimationReport run_pipeline(const ChannelRealization &truth, const TrialObservations &obs,
                                  const PipelineDictionaries &dicts, const SchemeSpec &scheme, Assumption assumption,
                                  const EstimatorConfig &cfg, RisSideCache &cache, bool timing);

} // namespace drisce

#endif
