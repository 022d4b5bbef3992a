// SPDX-License-Identifier: Apache-2.0
//
// canyon-sim: interference and capacity simulation for mm-wave picocells in street canyons
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

#ifndef CANYON_EXPERIMENTS_HPP
#define CANYON_EXPERIMENTS_HPP

#include "canyon/config.hpp"
#include "canyon/geometry.hpp"
#include "canyon/interference.hpp"
#include "canyon/simulation.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace canyon {

/// Fixed 9-significant-digit float formatting for every CSV cell.
inline std::string csv_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string ccdf_file_name(const CanyonScenario &s)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "ccdf_%g_%d_%d.csv", s.picocell_width, s.subarrays_per_face,
                  s.users_per_picocell);
    return buf;
}

inline SimulationOptions simulation_options(const ExperimentSpec &e)
{
    SimulationOptions o;
    o.phy.step_db = e.gamma_step_db;
    o.sumrate_stage = e.sumrate_stage;
    o.r_min = e.r_min;
    return o;
}

struct EscapeTraceRow
{
    int trial = 0;
    bool escaped = false;
    double max_forward_range = 0.0;
    double bound = 0.0;
};

/// Main beams from random faces toward random users in the face's own picocell.
inline std::vector<EscapeTraceRow> escape_trials(const CanyonScenario &s, int trials, std::uint64_t seed)
{
    s.validate();
    const int cells = picocell_count(s);
    const double bound = main_beam_escape_range(s.bs_height, s.user_height_max, s.picocell_width).range;
    std::vector<EscapeTraceRow> rows;
    rows.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t)
    {
        std::mt19937_64 rng(drop_seed(seed, static_cast<std::uint64_t>(t)));
        const int cell = std::uniform_int_distribution<int>(0, cells - 1)(rng);
        const Face face = std::bernoulli_distribution(0.5)(rng) ? face_of(s, cell, Facing::east)
                                                                : face_of(s, cell + 1, Facing::west);
        const Position3D user = drop_users(s, cell, rng).front();
        const BeamTrace tr = trace_beam_forward(face.position, (user - face.position).normalized(), s, 64);
        rows.push_back({t, tr.escaped, tr.max_forward_range, bound});
    }
    return rows;
}

namespace detail {

class CsvWriter
{
public:
    CsvWriter(const std::filesystem::path &path, std::uint64_t seed, const std::string &header)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_)
            throw std::runtime_error("cannot write '" + path.string() + "'");
        out_ << "# seed=" << seed << '\n';
        header_ = header;
    }
    void comment(const std::string &text) { out_ << "# " << text << '\n'; }
    void row(const std::vector<std::string> &cells)
    {
        if (!header_.empty())
        {
            out_ << header_ << '\n';
            header_.clear();
        }
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    std::filesystem::path finish()
    {
        if (!header_.empty())
            out_ << header_ << '\n';
        out_.flush();
        if (!out_)
            throw std::runtime_error("write to '" + path_.string() + "' failed");
        return path_;
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::string header_;
};

inline std::filesystem::path prepare_output_dir(const std::string &dir)
{
    std::error_code ec;
    const std::filesystem::path p(dir.empty() ? "." : dir);
    std::filesystem::create_directories(p, ec);
    if (ec || !std::filesystem::is_directory(p))
        throw std::runtime_error("output directory '" + p.string() + "' is not usable: " +
                                 (ec ? ec.message() : "not a directory"));
    return p;
}

} // namespace detail

/// Runs the configured experiment and returns the CSV files written.
inline std::vector<std::filesystem::path> run_experiment(const ParsedConfig &cfg)
{
    const CanyonScenario &s = cfg.scenario;
    const ExperimentSpec &e = cfg.experiment;
    const std::filesystem::path dir = detail::prepare_output_dir(e.output_dir);
    std::vector<std::filesystem::path> written;

    switch (e.kind)
    {
    case ExperimentKind::ccdf:
    {
        const MonteCarloResult mc = run_monte_carlo(s, e.n_drops, e.seed, simulation_options(e));
        detail::CsvWriter w(dir / ccdf_file_name(s), e.seed, "rate_bpshz,ccdf");
        w.comment("d_m=" + csv_number(s.picocell_width) + " K=" + std::to_string(s.subarrays_per_face) +
                  " Q=" + std::to_string(s.users_per_picocell) + " F=" + std::to_string(s.reuse_factor) +
                  " drops=" + std::to_string(e.n_drops));
        w.comment("saturation_fraction=" + csv_number(mc.saturation_fraction) +
                  " mean_min_rate=" + csv_number(mc.mean_min_rate) +
                  " median_min_rate=" + csv_number(mc.median_min_rate));
        for (const CcdfPoint &p : mc.ccdf)
            w.row({csv_number(p.rate), csv_number(p.ccdf)});
        written.push_back(w.finish());
        break;
    }
    case ExperimentKind::capacity_table:
    {
        const auto table = reproduce_capacity_table(s, e.n_drops, e.seed, simulation_options(e));
        detail::CsvWriter w(dir / "capacity.csv", e.seed, "d_m,K,F,Q,mean_min_rate,n_c,capacity_tbps_km2");
        for (const CapacityReport &r : table)
            w.row({csv_number(r.picocell_width), std::to_string(r.K), std::to_string(r.F), std::to_string(r.Q),
                   csv_number(r.mean_min_rate), csv_number(r.n_c), csv_number(r.capacity / 1e12)});
        written.push_back(w.finish());
        break;
    }
    case ExperimentKind::alpha_decay:
    {
        std::mt19937_64 rng(drop_seed(e.seed, 0));
        const std::vector<double> alpha = estimate_alpha_curve(s, e.alpha_max_offset, e.alpha_trials, rng);
        detail::CsvWriter w(dir / "alpha_decay.csv", e.seed, "c,alpha_linear,alpha_db");
        for (std::size_t c = 0; c < alpha.size(); ++c)
            w.row({std::to_string(c + 1), csv_number(alpha[c]), csv_number(linear_to_db(alpha[c]))});
        written.push_back(w.finish());
        break;
    }
    case ExperimentKind::theorem1_check:
    {
        detail::CsvWriter w(dir / "theorem1_check.csv", e.seed, "trial,escaped,max_forward_range_m,bound_m");
        for (const EscapeTraceRow &r : escape_trials(s, e.theorem1_trials, e.seed))
            w.row({std::to_string(r.trial), r.escaped ? "1" : "0", csv_number(r.max_forward_range),
                   csv_number(r.bound)});
        written.push_back(w.finish());
        break;
    }
    }
    return written;
}

} // namespace canyon

#endif // CANYON_EXPERIMENTS_HPP
