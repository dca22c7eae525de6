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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace drisce
{
    SchemeEntry SchemeEntry::parse(const std::string &text)
    {
        SchemeEntry e;
        const auto pos = text.find(':');
        e.spec = SchemeSpec::parse(text.substr(0, pos));
        if (pos != std::string::npos)
        {
            const std::string a = text.substr(pos + 1);
            if (a == "perfect")
                e.assumption = Assumption::perfect_aux;
            else if (a == "imperfect")
                e.assumption = Assumption::imperfect_aux;
            else
                throw invalid_input("unknown assumption '" + a + "' in scheme '" + text + "'");
        }
        return e;
    }

    EstimatorConfig SystemConfig::estimator() const
    {
        EstimatorConfig e;
        e.p_f = paths.p_f;
        e.p_d = paths.p_d;
        e.p_h = paths.p_h;
        e.gamp = gamp;
        e.offgrid_iters = offgrid_iters;
        e.explicit_kronecker = explicit_kronecker;
        return e;
    }

    void SystemConfig::validate() const
    {
        try
        {
            bs.validate();
            ris.validate();
            deployment.validate();
            pathloss.validate();
            gamp.validate();
        }
        catch (const invalid_input &e)
        {
            throw config_error(e.what());
        }
        if (users < 1)
            throw config_error("system.users must be positive");
        if (pilot_length < users)
            throw config_error("system.pilot_length (T = " + std::to_string(pilot_length) +
                               ") must be at least system.users (U = " + std::to_string(users) + ")");
        if (!(bandwidth_hz > 0.0) || !(frequency_ghz > 0.0))
            throw config_error("system.bandwidth_hz and system.frequency_ghz must be positive");
        if (g_t < 1 || g_r < 1)
            throw config_error("dictionary.g_t and dictionary.g_r must be positive");
        if (paths.p_f < 1 || paths.p_d < 1 || paths.p_h < 1)
            throw config_error("paths.p_f, paths.p_d and paths.p_h must be positive");
        if (paths.p_f > g_t || paths.p_d > g_r || paths.p_h > g_r)
            throw config_error("path counts must not exceed the dictionary sizes");
        if (trials < 0)
            throw config_error("sweep.trials must be non-negative");
        for (int q : q_pilot)
            if (q < 1)
                throw config_error("sweep.q_pilot entries must be positive");
        if (d_blocks < 0)
            throw config_error("sweep.d_blocks must be non-negative");
        if (offgrid_iters < 0)
            throw config_error("solver.offgrid_iters must be non-negative");
    }

    namespace
    {
        namespace pt = boost::property_tree;

        const std::map<std::string, std::set<std::string>> &known_keys()
        {
            static const std::map<std::string, std::set<std::string>> k{
                {"system",
                 {"bs_ny", "bs_nz", "ris_ny", "ris_nz", "users", "pilot_length", "frequency_ghz", "bandwidth_hz",
                  "noise_figure_db", "spacing_over_wavelength"}},
                {"dictionary", {"g_t", "g_r"}},
                {"paths", {"p_f", "p_d", "p_h"}},
                {"deployment", {"bs_pos", "ris1_pos", "ris2_pos", "user_ring_min", "user_ring_max"}},
                {"pathloss",
                 {"los_a1", "los_a2", "los_sigma_db", "nlos_a1", "nlos_a2", "nlos_sigma_db", "random_aleph"}},
                {"protocol", {"ris_reflection_gain_db", "noiseless", "on_grid_paths"}},
                {"sweep", {"power_dbm", "q_pilot", "d_blocks", "trials", "base_seed", "schemes"}},
                {"solver",
                 {"max_gamp_iters", "max_em_iters", "inner_tol", "gm_components", "damping", "em_tol", "offgrid_iters",
                  "explicit_kronecker"}},
                {"run", {"timing"}},
            };
            return k;
        }

        std::vector<std::string> split_list(const std::string &s)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                const auto b = item.find_first_not_of(" \t");
                const auto e = item.find_last_not_of(" \t");
                if (b != std::string::npos)
                    out.push_back(item.substr(b, e - b + 1));
            }
            return out;
        }

        template <class T> T parse_value(const std::string &key, const std::string &text)
        {
            std::istringstream is(text);
            T v{};
            is >> v;
            if (!is || !(is >> std::ws).eof())
                throw config_error("cannot parse '" + key + "' from '" + text + "'");
            return v;
        }

        template <> bool parse_value<bool>(const std::string &key, const std::string &text)
        {
            if (text == "true" || text == "1" || text == "yes" || text == "on")
                return true;
            if (text == "false" || text == "0" || text == "no" || text == "off")
                return false;
            throw config_error("cannot parse boolean '" + key + "' from '" + text + "'");
        }

        Vec3 parse_vec3(const std::string &key, const std::string &text)
        {
            const auto items = split_list(text);
            if (items.size() != 3)
                throw config_error(key + " needs three comma-separated coordinates");
            return {parse_value<double>(key, items[0]), parse_value<double>(key, items[1]),
                    parse_value<double>(key, items[2])};
        }

        template <class T> std::vector<T> parse_list(const std::string &key, const std::string &text)
        {
            std::vector<T> out;
            for (const auto &item : split_list(text))
                out.push_back(parse_value<T>(key, item));
            return out;
        }

        class Reader
        {
        public:
            explicit Reader(const pt::ptree &tree) : tree_(tree) {}

            template <class T> void get(const std::string &section, const std::string &key, T &target) const
            {
                if (auto v = raw(section, key))
                    target = parse_value<T>(section + "." + key, *v);
            }

            std::optional<std::string> raw(const std::string &section, const std::string &key) const
            {
                const auto sec = tree_.get_child_optional(section);
                if (!sec)
                    return std::nullopt;
                const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
                if (!v)
                    return std::nullopt;
                return *v;
            }

        private:
            const pt::ptree &tree_;
        };
    } // namespace

    SystemConfig parse_config(std::istream &in)
    {
        pt::ptree tree;
        try
        {
            pt::read_ini(in, tree);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw config_error(std::string("config parse error: ") + e.what());
        }

        const auto &known = known_keys();
        for (const auto &[section, child] : tree)
        {
            const auto it = known.find(section);
            if (it == known.end())
                throw config_error("unknown config section [" + section + "]");
            if (child.empty() && !child.data().empty())
                throw config_error("config key '" + section + "' must live inside a section");
            for (const auto &[key, value] : child)
                if (!it->second.count(key))
                    throw config_error("unknown config key '" + section + "." + key + "'");
        }

        const Reader r(tree);
        SystemConfig c;
        r.get("system", "bs_ny", c.bs.n_y);
        r.get("system", "bs_nz", c.bs.n_z);
        r.get("system", "ris_ny", c.ris.n_y);
        r.get("system", "ris_nz", c.ris.n_z);
        double spacing = 0.5;
        r.get("system", "spacing_over_wavelength", spacing);
        c.bs.spacing_over_wavelength = c.ris.spacing_over_wavelength = spacing;
        r.get("system", "users", c.users);
        c.pilot_length = c.users;
        r.get("system", "pilot_length", c.pilot_length);
        r.get("system", "frequency_ghz", c.frequency_ghz);
        r.get("system", "bandwidth_hz", c.bandwidth_hz);
        r.get("system", "noise_figure_db", c.noise_figure_db);

        c.g_t = c.J();
        c.g_r = c.L();
        r.get("dictionary", "g_t", c.g_t);
        r.get("dictionary", "g_r", c.g_r);

        r.get("paths", "p_f", c.paths.p_f);
        r.get("paths", "p_d", c.paths.p_d);
        r.get("paths", "p_h", c.paths.p_h);

        if (auto v = r.raw("deployment", "bs_pos"))
            c.deployment.bs_pos = parse_vec3("deployment.bs_pos", *v);
        if (auto v = r.raw("deployment", "ris1_pos"))
            c.deployment.ris1_pos = parse_vec3("deployment.ris1_pos", *v);
        if (auto v = r.raw("deployment", "ris2_pos"))
            c.deployment.ris2_pos = parse_vec3("deployment.ris2_pos", *v);
        r.get("deployment", "user_ring_min", c.deployment.user_ring_min);
        r.get("deployment", "user_ring_max", c.deployment.user_ring_max);

        r.get("pathloss", "los_a1", c.pathloss.los.a1);
        r.get("pathloss", "los_a2", c.pathloss.los.a2);
        r.get("pathloss", "los_sigma_db", c.pathloss.los.shadow_sigma_db);
        r.get("pathloss", "nlos_a1", c.pathloss.nlos.a1);
        r.get("pathloss", "nlos_a2", c.pathloss.nlos.a2);
        r.get("pathloss", "nlos_sigma_db", c.pathloss.nlos.shadow_sigma_db);
        r.get("pathloss", "random_aleph", c.pathloss.random_aleph);

        r.get("protocol", "ris_reflection_gain_db", c.ris_reflection_gain_db);
        r.get("protocol", "noiseless", c.noiseless);
        r.get("protocol", "on_grid_paths", c.on_grid_paths);

        if (auto v = r.raw("sweep", "power_dbm"))
            c.power_dbm = parse_list<double>("sweep.power_dbm", *v);
        if (auto v = r.raw("sweep", "q_pilot"))
            c.q_pilot = parse_list<int>("sweep.q_pilot", *v);
        r.get("sweep", "trials", c.trials);
        r.get("sweep", "d_blocks", c.d_blocks);
        r.get("sweep", "base_seed", c.base_seed);
        if (auto v = r.raw("sweep", "schemes"))
        {
            c.schemes.clear();
            for (const auto &s : split_list(*v))
            {
                try
                {
                    c.schemes.push_back(SchemeEntry::parse(s));
                }
                catch (const invalid_input &e)
                {
                    throw config_error(std::string("sweep.schemes: ") + e.what());
                }
            }
        }

        r.get("solver", "max_gamp_iters", c.gamp.max_gamp_iters);
        r.get("solver", "max_em_iters", c.gamp.max_em_iters);
        r.get("solver", "inner_tol", c.gamp.inner_tol);
        r.get("solver", "gm_components", c.gamp.gm_components);
        r.get("solver", "damping", c.gamp.damping);
        r.get("solver", "em_tol", c.gamp.em_tol);
        r.get("solver", "offgrid_iters", c.offgrid_iters);
        r.get("solver", "explicit_kronecker", c.explicit_kronecker);

        r.get("run", "timing", c.timing);

        if (c.schemes.empty())
            c.schemes.push_back(SchemeEntry::parse("svdmmv-gamp-offgrid:perfect"));
        c.validate();
        return c;
    }

    SystemConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw config_error("cannot open config file '" + path + "'");
        return parse_config(in);
    }

    bool TrialResult::operator==(const TrialResult &o) const
    {
        const bool same_nmse = (std::isnan(nmse) && std::isnan(o.nmse)) || nmse == o.nmse;
        return scheme == o.scheme && channel == o.channel && q_pilot == o.q_pilot && power_dbm == o.power_dbm &&
               trial == o.trial && seed == o.seed && same_nmse && runtime_ms == o.runtime_ms;
    }

    namespace
    {
        std::uint64_t bits(double v)
        {
            std::uint64_t b;
            std::memcpy(&b, &v, sizeof b);
            return b;
        }
    } // namespace

    std::uint64_t channel_seed(const SystemConfig &cfg, int trial)
    {
        return hash_combine(hash_combine(cfg.base_seed, 0x6368616eULL), static_cast<std::uint64_t>(trial));
    }

    std::uint64_t trial_seed(const SystemConfig &cfg, const SweepPoint &p, int trial)
    {
        std::uint64_t h = hash_combine(cfg.base_seed, bits(p.power_dbm));
        h = hash_combine(h, static_cast<std::uint64_t>(p.q));
        return hash_combine(h, static_cast<std::uint64_t>(trial));
    }

    PipelineDictionaries pipeline_dictionaries(const SystemConfig &cfg)
    {
        const auto [tz, ty] = square_split(cfg.g_t);
        const auto [rz, ry] = square_split(cfg.g_r);
        return build_pipeline_dictionaries(cfg.dims(), GridSpec{tz, ty, {}}, GridSpec{rz, ry, {}},
                                           los_angles(cfg.deployment));
    }

    namespace
    {
        // Moves a path's direction on one side onto a random dictionary atom not used yet on that side
        void snap_side(PathSet &ps, int p, bool departure, const Dictionary &dict, Rng &rng, std::vector<int> &used)
        {
            const double k = 2.0 * dict.geom.spacing_over_wavelength;
            std::vector<int> candidates;
            for (int g = 0; g < dict.size(); ++g)
            {
                const double ce = dict.x1[g] / k, ca = dict.x2[g] / k;
                if (ce * ce + ca * ca < 1.0 - 1e-9 && std::find(used.begin(), used.end(), g) == used.end())
                    candidates.push_back(g);
            }
            if (candidates.empty())
                throw invalid_input("on-grid path draw: no free grid atom left");
            std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
            const int g = candidates[pick(rng)];
            used.push_back(g);
            const double ce = dict.x1[g] / k, ca = dict.x2[g] / k;
            const double el = std::acos(ce);
            const double az = std::asin(std::clamp(ca / std::sin(el), -1.0, 1.0));
            (departure ? ps.departure_elev : ps.arrival_elev)[p] = el;
            (departure ? ps.departure_azim : ps.arrival_azim)[p] = az;
        }

        void snap_pair(PathSet &ps, const Dictionary &left, const Dictionary *right, Rng &rng)
        {
            std::vector<int> used_l, used_r;
            if (ps.los_index)
            {
                used_l.push_back(*left.anchor_atom);
                if (right)
                    used_r.push_back(*right->anchor_atom);
            }
            for (int p = 0; p < ps.size(); ++p)
            {
                if (ps.los_index && *ps.los_index == p)
                    continue;
                snap_side(ps, p, true, left, rng, used_l);
                if (right)
                    snap_side(ps, p, false, *right, rng, used_r);
            }
        }
    } // namespace

    ChannelRealization draw_trial_channel(const SystemConfig &cfg, int trial, const PipelineDictionaries &dicts)
    {
        Rng rng(channel_seed(cfg, trial));
        const auto users = draw_user_positions(rng, cfg.deployment, cfg.users);
        PathSets paths = draw_all_paths(rng, cfg.deployment, users, cfg.paths, cfg.pathloss);
        if (cfg.on_grid_paths)
        {
            for (int i = 0; i < 2; ++i)
            {
                snap_pair(paths.f[i], dicts.bs[i], &dicts.ris[i], rng);
                for (auto &h : paths.h[i])
                    snap_pair(h, dicts.user, nullptr, rng);
            }
            snap_pair(paths.d, dicts.ris2_d, &dicts.ris1_d, rng);
        }
        return apply_reflection_gain(synth_channels(cfg.dims(), paths), cfg.ris_reflection_gain_db);
    }

    TrialObservations simulate_trial(const SystemConfig &cfg, const ChannelRealization &chan, const SweepPoint &p,
                                     int trial)
    {
        Rng rng(trial_seed(cfg, p, trial));
        const double noise = cfg.noiseless ? 0.0 : db_to_linear(cfg.noise_power_dbm());
        TrialObservations obs;
        obs.pilots = gen_pilots(cfg.users, cfg.pilot_length, p.power_dbm);

        auto despread_all = [&](const RxRecord &rec) {
            std::vector<CMat> out;
            for (int u = 0; u < cfg.users; ++u)
                out.push_back(despread(rec, obs.pilots, u));
            return out;
        };

        const ReflectionSchedule large = gen_reflection_schedule(rng, cfg.L(), p.q);
        obs.V_large = {large.V1, large.V2};
        for (int i = 0; i < 2; ++i)
        {
            obs.ris_despread[i] = despread_all(simulate_uplink(chan, obs.pilots, large, Stage::ris_rx, i, noise, rng));
            obs.bs_despread[i] =
                despread_all(simulate_uplink(chan, obs.pilots, large, Stage::bs_rx_single, i, noise, rng));
        }

        obs.d_sched = gen_paired_schedule(rng, cfg.L(), p.blocks(), p.blocks());
        obs.d_despread = despread_all(simulate_uplink(chan, obs.pilots, obs.d_sched, Stage::bs_rx_double, 0, noise, rng));

        const ReflectionSchedule small = gen_reflection_schedule(rng, cfg.L(), p.q);
        obs.V_small = {small.V1, small.V2};
        for (int i = 0; i < 2; ++i)
            obs.small_despread[i] =
                despread_all(simulate_uplink(chan, obs.pilots, small, Stage::bs_rx_single, i, noise, rng));
        return obs;
    }

    namespace
    {
        std::vector<TrialResult> trial_rows(const SystemConfig &cfg, const PipelineDictionaries &dicts,
                                            const SweepPoint &p, int trial)
        {
            const ChannelRealization chan = draw_trial_channel(cfg, trial, dicts);
            const TrialObservations obs = simulate_trial(cfg, chan, p, trial);
            const EstimatorConfig ecfg = cfg.estimator();
            const std::uint64_t seed = trial_seed(cfg, p, trial);

            RisSideCache cache;
            std::vector<TrialResult> rows;
            for (const auto &entry : cfg.schemes)
            {
                const EstimationReport rep =
                    run_pipeline(chan, obs, dicts, entry.spec, entry.assumption, ecfg, cache, cfg.timing);
                for (const auto &ch : rep.channels)
                {
                    TrialResult r;
                    r.scheme = entry.label();
                    r.channel = ch;
                    r.q_pilot = p.q;
                    r.power_dbm = p.power_dbm;
                    r.trial = trial;
                    r.seed = seed;
                    r.nmse = rep.nmse.at(ch);
                    r.runtime_ms = rep.runtime_ms.at(ch);
                    if (auto it = rep.errors.find(ch); it != rep.errors.end())
                        r.error = it->second;
                    rows.push_back(std::move(r));
                }
            }
            return rows;
        }
    } // namespace

    std::vector<TrialResult> run_trial(const SystemConfig &cfg, const SweepPoint &p, int trial)
    {
        cfg.validate();
        return trial_rows(cfg, pipeline_dictionaries(cfg), p, trial);
    }

    int worker_count()
    {
        if (const char *env = std::getenv("DRISCE_WORKERS"))
        {
            const int n = std::atoi(env);
            if (n > 0)
                return n;
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    std::vector<TrialResult> run_sweep(const SystemConfig &cfg, int workers,
                                       const std::function<void(const std::vector<TrialResult> &)> &on_cell)
    {
        cfg.validate();
        if (workers <= 0)
            workers = worker_count();
        const PipelineDictionaries dicts = pipeline_dictionaries(cfg);
        std::vector<TrialResult> all;
        if (cfg.trials == 0)
            return all;

        for (double power : cfg.power_dbm)
            for (int q : cfg.q_pilot)
            {
                const SweepPoint p{power, q, cfg.d_blocks};
                std::vector<std::vector<TrialResult>> slots(cfg.trials);
                std::atomic<int> next{0};
                auto work = [&] {
                    for (int t = next++; t < cfg.trials; t = next++)
                    {
                        try
                        {
                            slots[t] = trial_rows(cfg, dicts, p, t);
                        }
                        catch (const std::exception &e)
                        {
                            TrialResult r;
                            r.scheme = "*";
                            r.channel = "*";
                            r.q_pilot = q;
                            r.power_dbm = power;
                            r.trial = t;
                            r.seed = trial_seed(cfg, p, t);
                            r.nmse = std::numeric_limits<double>::quiet_NaN();
                            r.error = e.what();
                            slots[t] = {r};
                        }
                    }
                };
                const int n = std::min(workers, cfg.trials);
                std::vector<std::thread> pool;
                for (int w = 1; w < n; ++w)
                    pool.emplace_back(work);
                work();
                for (auto &th : pool)
                    th.join();

                std::vector<TrialResult> cell;
                for (auto &s : slots)
                    cell.insert(cell.end(), s.begin(), s.end());
                if (on_cell)
                    on_cell(cell);
                all.insert(all.end(), cell.begin(), cell.end());
            }
        return all;
    }

    std::vector<CellStats> aggregate(const std::vector<TrialResult> &rows)
    {
        using Key = std::tuple<std::string, std::string, double, int>;
        std::map<Key, std::vector<double>> groups;
        std::vector<Key> order;
        for (const auto &r : rows)
        {
            const Key k{r.scheme, r.channel, r.power_dbm, r.q_pilot};
            auto [it, fresh] = groups.try_emplace(k);
            if (fresh)
                order.push_back(k);
            if (!std::isnan(r.nmse))
                it->second.push_back(r.nmse);
        }
        std::vector<CellStats> out;
        for (const auto &k : order)
        {
            const auto &v = groups[k];
            CellStats s;
            std::tie(s.scheme, s.channel, s.power_dbm, s.q_pilot) = k;
            s.n = static_cast<int>(v.size());
            if (s.n > 0)
            {
                double sum = 0.0;
                for (double x : v)
                    sum += x;
                s.mean = sum / s.n;
                double ss = 0.0;
                for (double x : v)
                    ss += (x - s.mean) * (x - s.mean);
                s.std = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;
                s.se = s.std / std::sqrt(static_cast<double>(s.n));
            }
            else
                s.mean = s.std = s.se = std::numeric_limits<double>::quiet_NaN();
            out.push_back(s);
        }
        return out;
    }

    double nmse_db(double nmse) { return 10.0 * std::log10(nmse); }

    namespace
    {
        std::string fmt(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string figure_of(const std::string &scheme, const std::string &channel, double power)
        {
            const bool imperfect = scheme.find(":imperfect") != std::string::npos;
            if (channel == "F1" || channel == "F2" || channel == "D")
            {
                if (imperfect)
                    return "fig6";
                return power >= 30.0 ? "fig4" : "fig5";
            }
            if (channel.find("_direct") != std::string::npos)
                return "fig7";
            return imperfect ? "fig8" : "fig7";
        }
    } // namespace

    void write_csv_header(std::ostream &os) { os << "scheme,channel,q_pilot,power_dbm,trial,seed,nmse,runtime_ms\n"; }

    void write_csv_rows(std::ostream &os, const std::vector<TrialResult> &rows)
    {
        for (const auto &r : rows)
            os << r.scheme << ',' << r.channel << ',' << r.q_pilot << ',' << fmt(r.power_dbm) << ',' << r.trial << ','
               << r.seed << ',' << fmt(r.nmse) << ',' << fmt(r.runtime_ms) << '\n';
        os.flush();
    }

    void write_plot_data(std::ostream &os, const std::vector<TrialResult> &rows)
    {
        os << "figure,scheme,channel,power_dbm,q_pilot,mean_nmse_db,mean_nmse,std_nmse,trials\n";
        for (const auto &s : aggregate(rows))
            os << figure_of(s.scheme, s.channel, s.power_dbm) << ',' << s.scheme << ',' << s.channel << ','
               << fmt(s.power_dbm) << ',' << s.q_pilot << ',' << fmt(nmse_db(s.mean)) << ',' << fmt(s.mean) << ','
               << fmt(s.std) << ',' << s.n << '\n';
        os.flush();
    }

    void emit_results(const std::vector<TrialResult> &rows, const std::string &path, OutputFormat format)
    {
        std::ofstream os(path, std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        if (format == OutputFormat::csv)
        {
            write_csv_header(os);
            write_csv_rows(os, rows);
        }
        else
            write_plot_data(os, rows);
        if (!os)
            throw std::runtime_error("write to '" + path + "' failed");
    }

    std::vector<TrialResult> read_results_csv(std::istream &in)
    {
        std::string line;
        if (!std::getline(in, line) || line != "scheme,channel,q_pilot,power_dbm,trial,seed,nmse,runtime_ms")
            throw std::runtime_error("results CSV: unexpected header");
        std::vector<TrialResult> rows;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string item;
            while (std::getline(ss, item, ','))
                f.push_back(item);
            if (f.size() != 8)
                throw std::runtime_error("results CSV: malformed line '" + line + "'");
            TrialResult r;
            r.scheme = f[0];
            r.channel = f[1];
            r.q_pilot = std::stoi(f[2]);
            r.power_dbm = std::strtod(f[3].c_str(), nullptr);
            r.trial = std::stoi(f[4]);
            r.seed = std::strtoull(f[5].c_str(), nullptr, 10);
            r.nmse = std::strtod(f[6].c_str(), nullptr);
            r.runtime_ms = std::strtod(f[7].c_str(), nullptr);
            rows.push_back(std::move(r));
        }
        return rows;
    }

    std::vector<TrialResult> read_results_csv(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open '" + path + "'");
        return read_results_csv(in);
    }

} // namespace drisce
