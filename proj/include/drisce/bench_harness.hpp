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

#ifndef DRISCE_BENCH_HARNESS_HPP
#define DRISCE_BENCH_HARNESS_HPP

#include "drisce/estimators.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace drisce
{
    // Raised for malformed or inconsistent configuration files
    class config_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct SchemeEntry
    {
        SchemeSpec spec;
        Assumption assumption = Assumption::perfect_aux;

        std::string label() const { return spec.label() + ":" + assumption_name(assumption); }
        static SchemeEntry parse(const std::string &text);
    };

    struct SystemConfig
    {
        // system
        UpaGeometry bs{6, 6, 0.5};
        UpaGeometry ris{8, 8, 0.5};
        int users = 4;
        int pilot_length = 4; // T
        double frequency_ghz = 28.0;
        double bandwidth_hz = 1e8;
        double noise_figure_db = 9.0;

        // dictionary
        int g_t = 36;
        int g_r = 64;

        PathCounts paths;
        Deployment deployment;
        PathLossParams pathloss;

        // protocol
        double ris_reflection_gain_db = 110.0;
        bool noiseless = false;
        bool on_grid_paths = false;

        // sweep: one pilot count Q sets Q1 = Q2 = Qbar1 = Qbar2, and N_X = N_Y = Q unless d_blocks > 0
        std::vector<double> power_dbm{30.0};
        std::vector<int> q_pilot{16, 32, 48, 64};
        int d_blocks = 0;
        int trials = 100;
        std::uint64_t base_seed = 1;
        std::vector<SchemeEntry> schemes;

        // solver
        SolverConfig gamp;
        int offgrid_iters = 10;
        bool explicit_kronecker = false;

        // run
        bool timing = false;

        int J() const { return bs.size(); }
        int L() const { return ris.size(); }
        double noise_power_dbm() const { return drisce::noise_power_dbm(bandwidth_hz, noise_figure_db); }
        SystemDims dims() const { return {bs, ris, users}; }
        EstimatorConfig estimator() const;
        void validate() const;
    };

    SystemConfig load_config(const std::string &path);
    SystemConfig parse_config(std::istream &in);

    struct SweepPoint
    {
        double power_dbm = 30.0;
        int q = 16;
        int n_xy = 0; // N_X = N_Y; 0 follows q

        int blocks() const { return n_xy > 0 ? n_xy : q; }
    };

    struct TrialResult
    {
        std::string scheme;
        std::string channel;
        int q_pilot = 0;
        double power_dbm = 0.0;
        int trial = 0;
        std::uint64_t seed = 0;
        double nmse = 0.0;
        double runtime_ms = 0.0;
        std::string error;

        bool operator==(const TrialResult &o) const;
    };

    std::uint64_t channel_seed(const SystemConfig &cfg, int trial);
    std::uint64_t trial_seed(const SystemConfig &cfg, const SweepPoint &pt, int trial);

    // One coherent channel draw for a trial (shared by every sweep cell)
    ChannelRealization draw_trial_channel(const SystemConfig &cfg, int trial, const PipelineDictionaries &dicts);

    TrialObservations simulate_trial(const SystemConfig &cfg, const ChannelRealization &chan, const SweepPoint &pt,
                                     int trial);

    PipelineDictionaries pipeline_dictionaries(const SystemConfig &cfg);

    std::vector<TrialResult> run_trial(const SystemConfig &cfg, const SweepPoint &pt, int trial);

    // Worker count from DRISCE_WORKERS, else the logical core count
    int worker_count();

    // Cells in (power, q) order; trials within a cell run on the worker pool.
    // on_cell receives each finished cell's rows in deterministic order.
    std::vector<TrialResult> run_sweep(const SystemConfig &cfg, int workers = 0,
                                       const std::function<void(const std::vector<TrialResult> &)> &on_cell = {});

    struct CellStats
    {
        std::string scheme;
        std::string channel;
        double power_dbm = 0.0;
        int q_pilot = 0;
        int n = 0;
        double mean = 0.0;
        double std = 0.0;
        double se = 0.0;
    };

    // Mean / std per (scheme, channel, power, q); NaN rows are skipped
    std::vector<CellStats> aggregate(const std::vector<TrialResult> &rows);

    enum class OutputFormat
    {
        csv,
        plot_data
    };

    void write_csv_header(std::ostream &os);
    void write_csv_rows(std::ostream &os, const std::vector<TrialResult> &rows);
    void write_plot_data(std::ostream &os, const std::vector<TrialResult> &rows);
    void emit_results(const std::vector<TrialResult> &rows, const std::string &path, OutputFormat format);
    std::vector<TrialResult> read_results_csv(const std::string &path);
    std::vector<TrialResult> read_results_csv(std::istream &in);

    double nmse_db(double nmse);

} // namespace drisce

#endif
