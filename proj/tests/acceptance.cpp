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

// Acceptance checks P1..P11. One line per criterion; exit status is nonzero if any fails.

#include "canyon/canyon.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace canyon;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// P1: S(P(gamma0)) = gamma0 through an independently computed sum-power max-min solution.
Outcome duality()
{
    std::mt19937_64 rng(101);
    const int Ns[] = {4, 16, 64};
    std::uniform_real_distribution<double> gdb(-5.0, 10.0);
    double worst = 0.0;
    int failed_inner = 0;
    for (int i = 0; i < 200; ++i)
    {
        const int N = Ns[i % 3], K = 2 + (i / 3) % 3;
        const auto h = oracle::random_channels(N, K, rng);
        const std::vector<double> noise(static_cast<std::size_t>(K), 1.0);
        const double gamma0 = db_to_linear(gdb(rng));
        PowerSolveOptions opt;
        opt.max_iterations = 20000;
        opt.tolerance = 1e-13;
        const PowerSolution p = solve_power_problem(h, noise, gamma0, Eigen::VectorXd::Ones(K), opt);
        if (!p.feasible())
        {
            ++failed_inner;
            continue;
        }
        const BeamformerSolution s = solve_maxmin_sum_power(h, noise, p.total_power());
        worst = std::max(worst, std::abs(s.achieved_gamma - gamma0) / gamma0);
    }
    return {failed_inner == 0 && worst <= 1e-6,
            fmt("200 instances, max |S(P(g))-g|/g = %.3g, unsolved = %d (tol 1e-6)", worst, failed_inner)};
}

// P2: every converged max-min solution balances the SINRs.
Outcome equal_sinr()
{
    std::mt19937_64 rng(202);
    RfConstants rf;
    double worst = 1.0;
    int converged = 0;
    for (int i = 0; i < 150; ++i)
    {
        const int N = (i % 2) ? 16 : 64, K = 1 + i % 4;
        const auto h = oracle::random_channels(N, K, rng);
        const std::vector<double> noise(static_cast<std::size_t>(K), 1e-3 * (1 + i % 7));
        const BeamformerSolution s = solve_maxmin_sinr(h, noise, rf);
        if (!s.converged)
            continue;
        ++converged;
        const auto v = oracle::sinr(s.beamformers, h, noise);
        worst = std::max(worst, *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end()));
    }
    // channels of real drops, every configuration
    CanyonScenario sc;
    sc.subarrays_per_face = 4;
    sc.users_per_picocell = 4;
    for (int d = 0; d < 5; ++d)
    {
        std::mt19937_64 drng(drop_seed(202, static_cast<std::uint64_t>(d)));
        const CellSnapshot snap = draw_snapshot(sc, drng);
        const ConfigurationSet configs = enumerate_configurations(4, 4);
        for (const auto &active : configs.subsets)
        {
            if (active.empty())
                continue;
            std::vector<cvec> h;
            std::vector<double> noise;
            for (int q : active)
            {
                h.push_back(snap.channels.design[static_cast<std::size_t>(q)]);
                noise.push_back(snap.channels.noise[static_cast<std::size_t>(q)]);
            }
            const BeamformerSolution s = solve_maxmin_sinr(h, noise, sc.rf);
            if (!s.converged)
                continue;
            ++converged;
            const auto v = oracle::sinr(s.beamformers, h, noise);
            worst = std::max(worst, *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end()));
        }
    }
    return {converged > 0 && worst <= 1 + 1e-6, fmt("%d converged solutions, worst max/min SINR = 1 + %.3g (tol 1e-6)", converged, worst - 1.0)};
}

// P3: the closed-form LMMSE direction against 1e5 random feasible directions.
Outcome lmmse_vs_random()
{
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> pdb(-10.0, 20.0);
    std::vector<double> gains;
    bool never_worse = true;
    for (int i = 0; i < 20; ++i)
    {
        const int K = 2 + i % 3;
        const auto h = oracle::random_channels(4, K, rng);
        Eigen::VectorXd p(K);
        for (int k = 0; k < K; ++k)
            p(k) = db_to_linear(pdb(rng));
        const double closed = oracle::lmmse_objective(lmmse_beamformer(0, h, p), 0, h, p);
        const double search = oracle::best_random_objective(0, h, p, 100000, rng);
        never_worse = never_worse && closed <= search * (1 + 1e-12);
        gains.push_back(search / closed - 1.0);
    }
    std::sort(gains.begin(), gains.end());
    const double median = 0.5 * (gains[9] + gains[10]);
    return {never_worse && median > 0.10,
            fmt("20 N=4 instances, never worse = %s, median improvement = %.1f%%, min = %.2f%%", never_worse ? "yes" : "no",
                100 * median, 100 * gains.front())};
}

// P4: simplex against vertex enumeration, plus the Beale cycling example.
Outcome lp_oracle()
{
    std::mt19937_64 rng(404);
    double worst = 0.0;
    int mismatched_status = 0, optimal = 0;
    for (int i = 0; i < 100; ++i)
    {
        const oracle::SmallLp s = oracle::random_small_lp(i, rng);
        LinearProgram lp;
        lp.objective = s.c;
        lp.a_ub = s.a_ub;
        lp.b_ub = s.b_ub;
        lp.a_eq = s.a_eq;
        lp.b_eq = s.b_eq;
        lp.maximize = true;
        const LpResult r = solve_lp(lp);
        const auto brute = oracle::enumerate_vertices(s.c, s.a_eq, s.b_eq, s.a_ub, s.b_ub);
        if (!brute)
        {
            mismatched_status += r.status == LpStatus::infeasible ? 0 : 1;
            continue;
        }
        if (r.status != LpStatus::optimal)
        {
            ++mismatched_status;
            continue;
        }
        ++optimal;
        worst = std::max(worst, std::abs(r.value - brute->value) / (1.0 + std::abs(brute->value)));
    }
    LinearProgram beale;
    beale.objective.resize(4);
    beale.objective << -0.75, 20, -0.5, 6;
    beale.a_ub.resize(3, 4);
    beale.a_ub << 0.25, -8, -1, 9, 0.5, -12, -0.5, 3, 0, 0, 1, 0;
    beale.b_ub = Eigen::Vector3d(0, 0, 1);
    const LpResult b = solve_lp(beale);
    const bool beale_ok = b.status == LpStatus::optimal && std::abs(b.value + 1.25) <= 1e-9;
    return {mismatched_status == 0 && worst <= 1e-9 && beale_ok,
            fmt("100 LPs (%d optimal), max rel. gap = %.3g, status mismatches = %d; cycling instance %s in %d pivots (value %.6g)",
                optimal, worst, mismatched_status, beale_ok ? "solved" : "FAILED", b.pivots, b.value)};
}

// P5: max-min LP against a 1e6-point grid over the dual simplex, Q = 3, K = 2.
Outcome maxmin_grid()
{
    std::vector<Eigen::MatrixXd> cases;
    const ConfigurationSet configs = enumerate_configurations(3, 2);
    for (double d : {20.0, 100.0})
    {
        CanyonScenario s;
        s.picocell_width = d;
        s.subarrays_per_face = 2;
        s.users_per_picocell = 3;
        for (int i = 0; i < 6; ++i)
        {
            std::mt19937_64 rng(drop_seed(505, static_cast<std::uint64_t>(i + 10 * d)));
            const CellSnapshot snap = draw_snapshot(s, rng);
            cases.push_back(build_spectral_efficiency_matrix(configs, snap.channels, s.rf).S);
        }
    }
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int i = 0; i < 8; ++i)
    {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(7, 3);
        for (std::size_t c = 0; c < configs.size(); ++c)
            for (int q : configs.subsets[c])
                S(static_cast<Eigen::Index>(c), q) = u(rng);
        cases.push_back(S);
    }
    double worst = 0.0;
    for (const Eigen::MatrixXd &S : cases)
        worst = std::max(worst, std::abs(solve_maxmin_rate(S).objective - oracle::maxmin_dual_grid(S)));
    return {worst <= 1e-3, fmt("%zu instances (12 from drops), %ld grid points each, max |LP - grid| = %.3g bps/Hz (tol 1e-3)",
                               cases.size(), oracle::dual_grid_points(), worst)};
}

// P6: traced main beams never reach beyond d (H + h) / (H - h).
Outcome escape_range()
{
    CanyonScenario s;
    const auto rows = escape_trials(s, 10000, 606);
    const EscapeRange r = main_beam_escape_range(6.0, 2.0, s.picocell_width);
    double worst = 0.0;
    int violations = 0, escaped = 0;
    for (const EscapeTraceRow &row : rows)
    {
        worst = std::max(worst, row.max_forward_range / row.bound);
        violations += row.max_forward_range > row.bound ? 1 : 0;
        escaped += row.escaped ? 1 : 0;
    }
    return {violations == 0 && r.n_max == 2,
            fmt("10000 beams, violations = %d, max range/bound = %.4f, escaped = %d, N_max = %d", violations, worst, escaped, r.n_max)};
}

// P7: alpha_c decay (all stations in band) and alpha_3 under reuse 3.
Outcome alpha_decay()
{
    CanyonScenario s;
    s.subarrays_per_face = 1;
    s.rf.reflection_loss_db = 10.0;
    s.reuse_factor = 1;
    std::mt19937_64 rng(707);
    const std::vector<double> a = estimate_alpha_curve(s, 6, 200, rng);
    bool monotone = true;
    std::vector<double> c, log_a;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        if (i && a[i] > a[i - 1])
            monotone = false;
        c.push_back(static_cast<double>(i + 1));
        log_a.push_back(std::log10(a[i]));
    }
    const auto [slope, r2] = oracle::linear_fit(c, log_a);
    s.reuse_factor = 3;
    std::mt19937_64 rng3(708);
    const double a3 = linear_to_db(estimate_alpha_c(s, 3, 200, rng3));
    std::string curve;
    for (double v : a)
        curve += fmt("%.1f ", linear_to_db(v));
    return {monotone && r2 >= 0.9 && slope < 0.0 && a3 <= -40.0,
            fmt("alpha_1..6 [dB] = %snon-increasing = %s, slope = %.2f dB/cell, R^2 = %.3f (>= 0.9); reuse-3 alpha_3 = %.1f dB (<= -40)",
                curve.c_str(), monotone ? "yes" : "no", 10 * slope, r2, a3)};
}

// P8: saturation fraction at d = 20 m, K = 2, Q = 4, F = 2.
Outcome saturation()
{
    CanyonScenario s;
    s.subarrays_per_face = 2;
    s.users_per_picocell = 4;
    s.reuse_factor = 2;
    const MonteCarloResult mc = run_monte_carlo(s, 500, 808);
    return {mc.saturation_fraction >= 0.90,
            fmt("500 drops, saturation fraction = %.3f (>= 0.90), mean min-rate = %.3f bps/Hz, ceiling 3", mc.saturation_fraction,
                mc.mean_min_rate)};
}

// P9: capacity table trends and magnitudes.
Outcome capacity_table()
{
    const double published[3][5] = {{1.3, 1.8, 1.6, 2.6, 2.7}, {5.3, 8.9, 3.3, 6.4, 8.9}, {17.6, 33.1, 8.9, 17.8, 30.9}};
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<CapacityReport> table = reproduce_capacity_table(CanyonScenario{}, 500, 909);
    const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    double tbps[3][5];
    double worst_ratio = 1.0;
    std::string cells;
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        const int row = static_cast<int>(i / 5), col = static_cast<int>(i % 5);
        tbps[row][col] = table[i].capacity / 1e12;
        const double ratio = tbps[row][col] / published[row][col];
        worst_ratio = std::max(worst_ratio, std::max(ratio, 1.0 / ratio));
        cells += fmt("%.2f%s", tbps[row][col], col == 4 ? (row == 2 ? "" : " | ") : " ");
    }
    bool increasing = true;
    for (int col = 0; col < 5; ++col)
        increasing = increasing && tbps[0][col] < tbps[1][col] && tbps[1][col] < tbps[2][col];
    const double k_ratio = tbps[2][1] / tbps[2][0];
    return {table.size() == 15 && increasing && k_ratio >= 1.7 && k_ratio <= 2.0 && worst_ratio <= 2.0 && minutes < 30.0,
            fmt("Tbps/km2 [d=100 | 50 | 20; F1 K1 K2, F2 K1 K2 K4] = %s; increasing = %s; K2/K1 at d=20 F1 = %.3f; worst "
                "factor vs table = %.2f (<= 2); %.1f min",
                cells.c_str(), increasing ? "yes" : "no", k_ratio, worst_ratio, minutes)};
}

// P10: area capacity arithmetic.
Outcome capacity_arithmetic()
{
    const double v = capacity_per_km2(1.0, 2e9, 2, 6, 750) / 1e12;
    return {std::abs(v - 9.0) < 1e-12 && std::abs(v - 8.9) / 8.9 <= 0.02, fmt("capacity(1.0, 2 GHz, F=2, Q=6, 750) = %.6g Tbps/km2", v)};
}

// P11: every experiment, run twice with the same seed, writes identical bytes.
Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / "canyon_acceptance_p11";
    fs::remove_all(root);
    const char *configs[] = {
        "[mac]\nsubarrays_per_face = 2\nusers_per_picocell = 4\n[experiment]\nname = ccdf\nn_drops = 20\n",
        "[experiment]\nname = capacity_table\nn_drops = 2\n",
        "[mac]\nsubarrays_per_face = 1\nreuse_factor = 1\n[experiment]\nname = alpha_decay\nalpha_trials = 5\n",
        "[experiment]\nname = theorem1_check\ntheorem1_trials = 2000\n",
    };
    int identical = 0, total = 0;
    for (const char *text : configs)
    {
        std::string contents[2];
        for (int run = 0; run < 2; ++run)
        {
            ParsedConfig c = parse_config_text(text);
            c.experiment.seed = 1111;
            c.experiment.output_dir = (root / std::to_string(run)).string();
            for (const fs::path &p : run_experiment(c))
            {
                std::ifstream in(p, std::ios::binary);
                std::ostringstream ss;
                ss << in.rdbuf();
                contents[run] += p.filename().string() + "\n" + ss.str();
            }
        }
        ++total;
        identical += (!contents[0].empty() && contents[0] == contents[1]) ? 1 : 0;
    }
    fs::remove_all(root);
    return {identical == total, fmt("%d of %d experiments byte-identical across two runs", identical, total)};
}

} // namespace

int main()
{
    const std::pair<const char *, std::function<Outcome()>> criteria[] = {
        {"P1 inverse-problem duality", duality},
        {"P2 equal-SINR optimum", equal_sinr},
        {"P3 LMMSE vs random search", lmmse_vs_random},
        {"P4 LP vs vertex enumeration", lp_oracle},
        {"P5 max-min LP vs grid", maxmin_grid},
        {"P6 main-beam escape range", escape_range},
        {"P7 sidelobe interference decay", alpha_decay},
        {"P8 saturation at small cells", saturation},
        {"P9 capacity table trends", capacity_table},
        {"P10 area capacity arithmetic", capacity_arithmetic},
        {"P11 determinism", determinism},
    };
    int failures = 0;
    for (const auto &[name, check] : criteria)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = check();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %-32s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), sec);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu acceptance criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
