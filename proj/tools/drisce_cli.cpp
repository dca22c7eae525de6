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

#include "drisce/bench_harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace drisce;
using nlohmann::json;

namespace
{
    json to_json(const CMat &M)
    {
        json re = json::array(), im = json::array();
        for (Eigen::Index r = 0; r < M.rows(); ++r)
        {
            json rr = json::array(), ii = json::array();
            for (Eigen::Index c = 0; c < M.cols(); ++c)
            {
                rr.push_back(M(r, c).real());
                ii.push_back(M(r, c).imag());
            }
            re.push_back(rr);
            im.push_back(ii);
        }
        return {{"rows", M.rows()}, {"cols", M.cols()}, {"re", re}, {"im", im}};
    }

    json to_json(const PathSet &ps)
    {
        json g = json::array();
        for (Eigen::Index p = 0; p < ps.gains.size(); ++p)
            g.push_back({ps.gains[p].real(), ps.gains[p].imag()});
        auto vecj = [](const RVec &v) { return std::vector<double>(v.data(), v.data() + v.size()); };
        json out{{"gains", g},
                 {"departure_elev", vecj(ps.departure_elev)},
                 {"departure_azim", vecj(ps.departure_azim)},
                 {"arrival_elev", vecj(ps.arrival_elev)},
                 {"arrival_azim", vecj(ps.arrival_azim)}};
        out["los_index"] = ps.los_index ? json(*ps.los_index) : json(nullptr);
        return out;
    }

    void write_text(const std::string &path, const std::string &text)
    {
        if (path.empty())
        {
            std::cout << text;
            return;
        }
        std::ofstream os(path, std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        os << text;
    }

    void apply_overrides(SystemConfig &cfg, const std::optional<std::uint64_t> &seed, const std::string &schemes)
    {
        if (seed)
            cfg.base_seed = *seed;
        if (!schemes.empty())
        {
            cfg.schemes.clear();
            std::stringstream ss(schemes);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty())
                {
                    try
                    {
                        cfg.schemes.push_back(SchemeEntry::parse(item));
                    }
                    catch (const invalid_input &e)
                    {
                        throw config_error(std::string("--schemes: ") + e.what());
                    }
                }
        }
        cfg.validate();
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"drisce: two-timescale channel estimation for active double-RIS systems"};
    app.require_subcommand(1);

    std::string config_path, out_path, schemes, format = "csv", input_path;
    std::optional<std::uint64_t> seed;
    double power = 30.0;
    int q = 16;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "INI configuration file")->required();
        sub->add_option("--seed", seed, "base seed override");
        sub->add_option("--out", out_path, "output path (stdout when omitted)");
        sub->add_option("--schemes", schemes, "comma-separated scheme[:perfect|:imperfect] list");
    };

    auto *sim = app.add_subcommand("simulate", "dump one channel realization as JSON");
    add_common(sim);
    auto *est = app.add_subcommand("estimate", "run one trial and report every stage");
    add_common(est);
    est->add_option("--power", power, "uplink power in dBm");
    est->add_option("--q", q, "pilot count Q");
    auto *bench = app.add_subcommand("bench", "run the configured Monte Carlo sweep");
    add_common(bench);
    bench->add_option("--format", format, "csv or plot_data")->check(CLI::IsMember({"csv", "plot_data"}));
    auto *plot = app.add_subcommand("plot-data", "aggregate an existing results CSV");
    plot->add_option("input", input_path, "results CSV")->required();
    plot->add_option("--out", out_path, "output path (stdout when omitted)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try
    {
        if (*plot)
        {
            std::ostringstream os;
            write_plot_data(os, read_results_csv(input_path));
            write_text(out_path, os.str());
            return 0;
        }

        SystemConfig cfg = load_config(config_path);
        apply_overrides(cfg, seed, schemes);

        if (*sim)
        {
            const auto dicts = pipeline_dictionaries(cfg);
            const ChannelRealization chan = draw_trial_channel(cfg, 0, dicts);
            json j;
            j["seed"] = channel_seed(cfg, 0);
            j["noise_power_dbm"] = cfg.noise_power_dbm();
            j["J"] = cfg.J();
            j["L"] = cfg.L();
            j["U"] = cfg.users;
            j["F1"] = to_json(chan.F[0]);
            j["F2"] = to_json(chan.F[1]);
            j["D"] = to_json(chan.D);
            j["H1"] = to_json(chan.H(0));
            j["H2"] = to_json(chan.H(1));
            j["paths"] = {{"F1", to_json(chan.f_paths[0])}, {"F2", to_json(chan.f_paths[1])}, {"D", to_json(chan.d_paths)}};
            write_text(out_path, j.dump(1) + "\n");
            return 0;
        }

        if (*est)
        {
            const SweepPoint pt{power, q, cfg.d_blocks};
            const auto dicts = pipeline_dictionaries(cfg);
            const ChannelRealization chan = draw_trial_channel(cfg, 0, dicts);
            const TrialObservations obs = simulate_trial(cfg, chan, pt, 0);
            RisSideCache cache;
            json j = json::array();
            for (const auto &entry : cfg.schemes)
            {
                const auto rep =
                    run_pipeline(chan, obs, dicts, entry.spec, entry.assumption, cfg.estimator(), cache, true);
                json r{{"scheme", entry.label()}, {"q_pilot", q}, {"power_dbm", power}};
                for (const auto &ch : rep.channels)
                {
                    json c{{"nmse", rep.nmse.at(ch)}, {"nmse_db", nmse_db(rep.nmse.at(ch))},
                           {"runtime_ms", rep.runtime_ms.at(ch)}};
                    if (auto it = rep.errors.find(ch); it != rep.errors.end())
                        c["error"] = it->second;
                    r["channels"][ch] = c;
                }
                j.push_back(r);
            }
            write_text(out_path, j.dump(1) + "\n");
            return 0;
        }

        // bench
        std::ofstream file;
        std::ostream *os = &std::cout;
        if (!out_path.empty() && format == "csv")
        {
            file.open(out_path, std::ios::trunc);
            if (!file)
                throw std::runtime_error("cannot open '" + out_path + "' for writing");
            os = &file;
        }
        if (format == "csv")
            write_csv_header(*os);
        const auto rows = run_sweep(cfg, 0, [&](const std::vector<TrialResult> &cell) {
            for (const auto &r : cell)
                if (!r.error.empty())
                    std::cerr << "warning: " << r.scheme << " " << r.channel << " trial " << r.trial << ": "
                              << r.error << "\n";
            if (format == "csv")
                write_csv_rows(*os, cell);
        });
        if (format == "plot_data")
        {
            std::ostringstream ps;
            write_plot_data(ps, rows);
            write_text(out_path, ps.str());
        }
        return 0;
    }
    catch (const config_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
