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

#ifndef CANYON_SIMULATION_HPP
#define CANYON_SIMULATION_HPP

#include "channel.hpp"
#include "geometry.hpp"
#include "interference.hpp"
#include "scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace canyon {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of drop `index` under `master`; independent of the order in which drops are executed.
inline std::uint64_t drop_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

struct DropResult
{
    std::uint64_t seed = 0;
    Eigen::VectorXd rates;                     // per user, bits/s/Hz
    Eigen::VectorXd allocation;                // time fraction per configuration
    std::vector<Eigen::VectorXd> config_sinr;  // active users' SINR per configuration
    double min_rate = 0.0;
    bool saturated = false;
};

struct SimulationOptions
{
    MaxMinOptions phy;
    bool sumrate_stage = false;
    double r_min = 0.5;
};

/// Target face and its users' channels for one snapshot; the inter-cell residual is filled in
/// from freshly drawn neighbour assignments.
struct CellSnapshot
{
    Face serving;
    std::vector<UserLink> links;
    CellChannels channels;
    std::vector<InterferenceBreakdown> intercell;
};

template <class Rng>
CellSnapshot draw_snapshot(const CanyonScenario &s, Rng &rng, const MaxMinOptions &phy = {})
{
    CellSnapshot snap;
    snap.serving = face_of(s, center_bs_index(s), Facing::east);
    const double sigma2 = noise_power(s.rf, s.reuse_factor);
    for (const Position3D &u : drop_served_users(s, snap.serving, rng))
    {
        UserLink link = make_link(s, snap.serving, u);
        snap.channels.design.push_back(effective_channel(s, snap.serving, link, true));
        snap.channels.full.push_back(effective_channel(s, snap.serving, link, false));
        snap.channels.noise.push_back(sigma2);
        snap.links.push_back(std::move(link));
    }
    std::vector<InterferingAssignment> neighbours;
    for (const Face &f : neighbour_sources(s, snap.serving))
        neighbours.push_back(draw_assignment(s, f, rng, phy));
    for (const UserLink &link : snap.links)
    {
        snap.intercell.push_back(intercell_interference(s, link, snap.serving, neighbours));
        snap.channels.intercell.push_back(snap.intercell.back().total());
    }
    return snap;
}

inline DropResult run_drop(const CanyonScenario &s, std::uint64_t seed, const SimulationOptions &options = {})
{
    s.validate();
    std::mt19937_64 rng(seed);
    const CellSnapshot snap = draw_snapshot(s, rng, options.phy);
    const ConfigurationSet configs = enumerate_configurations(s.users_per_picocell, s.subarrays_per_face);
    const SpectralEfficiencyMatrix se = build_spectral_efficiency_matrix(configs, snap.channels, s.rf, options.phy);

    AllocationPolicy policy = solve_maxmin_rate(se.S);
    DropResult out;
    out.seed = seed;
    out.min_rate = policy.objective;
    if (options.sumrate_stage && policy.objective > options.r_min)
    {
        const AllocationPolicy refined = solve_sumrate_with_floor(se.S, options.r_min);
        if (refined.status == LpStatus::optimal)
            policy = refined;
    }
    out.rates = policy.rates;
    out.allocation = policy.x;
    out.config_sinr = se.config_sinr;
    out.saturated = std::abs(out.min_rate - saturation_rate(s.subarrays_per_face, s.users_per_picocell,
                                                            s.rf.max_spectral_efficiency)) <= 1e-6;
    return out;
}

struct CcdfPoint
{
    double rate = 0.0;
    double ccdf = 0.0; // fraction of drops with max-min rate >= rate
};

struct MonteCarloResult
{
    std::vector<DropResult> drops;
    std::vector<CcdfPoint> ccdf;
    double saturation_fraction = 0.0;
    double mean_min_rate = 0.0;
    double median_min_rate = 0.0;
};

/// Empirical CCDF of the samples, starting at (0, 1). Samples within 1e-9 (relative) of the
/// previous step are merged into it, so rounding noise around the saturation point does not
/// create spurious steps.
inline std::vector<CcdfPoint> empirical_ccdf(std::vector<double> samples)
{
    std::sort(samples.begin(), samples.end());
    std::vector<CcdfPoint> out{{0.0, 1.0}};
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        if (out.size() > 1 && samples[i] - out.back().rate <= 1e-9 * std::max(1.0, std::abs(samples[i])))
            continue;
        if (samples[i] <= 0.0)
            continue;
        out.push_back({samples[i], static_cast<double>(samples.size() - i) / n});
    }
    return out;
}

/// Independent drops, executed on all hardware threads; results are keyed by drop index.
inline MonteCarloResult run_monte_carlo(const CanyonScenario &s, int n_drops, std::uint64_t master_seed,
                                        const SimulationOptions &options = {}, unsigned threads = 0)
{
    if (n_drops < 1)
        throw std::invalid_argument("run_monte_carlo: need at least one drop");
    s.validate();
    MonteCarloResult out;
    out.drops.resize(static_cast<std::size_t>(n_drops));
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n_drops));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n_drops; i = next++)
            out.drops[static_cast<std::size_t>(i)] = run_drop(s, drop_seed(master_seed, static_cast<std::uint64_t>(i)), options);
    };
    if (threads == 1)
        worker();
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    std::vector<double> mins;
    mins.reserve(out.drops.size());
    int saturated = 0;
    for (const DropResult &d : out.drops)
    {
        mins.push_back(d.min_rate);
        saturated += d.saturated ? 1 : 0;
    }
    out.saturation_fraction = static_cast<double>(saturated) / n_drops;
    double sum = 0.0;
    for (double m : mins)
        sum += m;
    out.mean_min_rate = sum / n_drops;
    std::vector<double> sorted = mins;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    out.median_min_rate = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    out.ccdf = empirical_ccdf(std::move(mins));
    return out;
}

/// Area capacity: rate x (B / F) x 2Q users per picocell x picocells per km^2.
inline double capacity_per_km2(double mean_min_rate, double bandwidth_hz, int reuse, int users_per_face,
                               double cells_per_km2)
{
    return mean_min_rate * (bandwidth_hz / reuse) * 2.0 * users_per_face * cells_per_km2;
}

// A square kilometre of Manhattan holds about 15 one-kilometre canyons, each with 1000/d picocells.
inline double cells_per_km2(double picocell_width) { return 15.0 * 1000.0 / picocell_width; }

struct CapacityReport
{
    double picocell_width = 0.0;
    int K = 0;
    int F = 0;
    int Q = 0;
    double mean_min_rate = 0.0;
    double median_min_rate = 0.0;
    double saturation_fraction = 0.0;
    double n_c = 0.0;
    double capacity = 0.0; // bits/s/km^2
};

struct CapacityCell
{
    double picocell_width;
    int K;
    int F;
};

/// Grid of the capacity table: d in {100, 50, 20} m; K in {1, 2} at F = 1 and {1, 2, 4} at F = 2.
inline std::vector<CapacityCell> capacity_grid()
{
    std::vector<CapacityCell> grid;
    for (double d : {100.0, 50.0, 20.0})
    {
        for (int K : {1, 2})
            grid.push_back({d, K, 1});
        for (int K : {1, 2, 4})
            grid.push_back({d, K, 2});
    }
    return grid;
}

inline CapacityReport capacity_report(const CanyonScenario &s, const MonteCarloResult &mc)
{
    CapacityReport r;
    r.picocell_width = s.picocell_width;
    r.K = s.subarrays_per_face;
    r.F = s.reuse_factor;
    r.Q = s.users_per_picocell;
    r.mean_min_rate = mc.mean_min_rate;
    r.median_min_rate = mc.median_min_rate;
    r.saturation_fraction = mc.saturation_fraction;
    r.n_c = cells_per_km2(s.picocell_width);
    r.capacity = capacity_per_km2(r.mean_min_rate, s.rf.bandwidth_hz, r.F, r.Q, r.n_c);
    return r;
}

inline std::vector<CapacityReport> reproduce_capacity_table(const CanyonScenario &base, int n_drops,
                                                            std::uint64_t master_seed,
                                                            const SimulationOptions &options = {})
{
    std::vector<CapacityReport> out;
    for (const CapacityCell &cell : capacity_grid())
    {
        CanyonScenario s = base;
        s.picocell_width = cell.picocell_width;
        s.subarrays_per_face = cell.K;
        s.reuse_factor = cell.F;
        out.push_back(capacity_report(s, run_monte_carlo(s, n_drops, master_seed, options)));
    }
    return out;
}

} // namespace canyon

#endif // CANYON_SIMULATION_HPP
