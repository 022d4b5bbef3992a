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

#ifndef CANYON_SCHEDULER_HPP
#define CANYON_SCHEDULER_HPP

#include "beamforming.hpp"
#include "lp.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace canyon {

/// All user subsets of size <= K, ordered by size and lexicographically within a size.
struct ConfigurationSet
{
    int num_users = 0;
    int max_active = 0;
    std::vector<std::vector<int>> subsets;

    std::size_t size() const { return subsets.size(); }
};

inline ConfigurationSet enumerate_configurations(int Q, int K)
{
    if (Q < 1 || K < 1)
        throw std::invalid_argument("enumerate_configurations: Q and K must be >= 1");
    ConfigurationSet set{Q, K, {}};
    std::vector<int> current;
    std::function<void(int, int)> extend = [&](int start, int remaining) {
        if (remaining == 0)
        {
            set.subsets.push_back(current);
            return;
        }
        for (int q = start; q <= Q - remaining; ++q)
        {
            current.push_back(q);
            extend(q + 1, remaining - 1);
            current.pop_back();
        }
    };
    for (int k = 0; k <= std::min(K, Q); ++k)
        extend(0, k);
    return set;
}

/// Channels of the Q users of one face.
struct CellChannels
{
    std::vector<cvec> design;     // used to compute beamformers (LoS only)
    std::vector<cvec> full;       // used to evaluate the resulting SINR (LoS + reflections)
    std::vector<double> noise;    // W
    std::vector<double> intercell; // residual inter-cell interference per user, W
};

struct SpectralEfficiencyMatrix
{
    Eigen::MatrixXd S;                         // C x Q, bits/s/Hz
    std::vector<Eigen::VectorXd> config_sinr;  // achieved SINR of the active users, per configuration
};

/// SINR of the active users when every stream uses the given transmit vectors.
inline Eigen::VectorXd evaluate_cell_sinr(const std::vector<int> &active, const std::vector<cvec> &beamformers,
                                          const CellChannels &cell)
{
    Eigen::VectorXd sinr(static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a)
    {
        const cvec &h = cell.full[static_cast<std::size_t>(active[a])];
        double interference = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i)
            if (i != a)
                interference += std::norm(beamformers[i].dot(h));
        const auto q = static_cast<std::size_t>(active[a]);
        const double denom = interference + cell.noise[q] + (cell.intercell.empty() ? 0.0 : cell.intercell[q]);
        sinr(static_cast<Eigen::Index>(a)) = std::norm(beamformers[a].dot(h)) / denom;
    }
    return sinr;
}

inline SpectralEfficiencyMatrix build_spectral_efficiency_matrix(const ConfigurationSet &configs,
                                                                 const CellChannels &cell, const RfConstants &rf,
                                                                 const MaxMinOptions &options = {})
{
    const auto C = static_cast<Eigen::Index>(configs.size());
    const auto Q = static_cast<Eigen::Index>(configs.num_users);
    if (static_cast<Eigen::Index>(cell.design.size()) != Q || cell.full.size() != cell.design.size() ||
        cell.noise.size() != cell.design.size())
        throw std::invalid_argument("build_spectral_efficiency_matrix: channel count does not match Q");
    SpectralEfficiencyMatrix out;
    out.S = Eigen::MatrixXd::Zero(C, Q);
    out.config_sinr.resize(static_cast<std::size_t>(C));
    for (Eigen::Index c = 0; c < C; ++c)
    {
        const std::vector<int> &active = configs.subsets[static_cast<std::size_t>(c)];
        if (active.empty())
            continue;
        std::vector<cvec> h;
        std::vector<double> noise;
        for (int q : active)
        {
            h.push_back(cell.design[static_cast<std::size_t>(q)]);
            noise.push_back(cell.noise[static_cast<std::size_t>(q)]);
        }
        const BeamformerSolution bf = solve_maxmin_sinr(h, noise, rf, options);
        const Eigen::VectorXd sinr = evaluate_cell_sinr(active, bf.beamformers, cell);
        out.config_sinr[static_cast<std::size_t>(c)] = sinr;
        for (std::size_t a = 0; a < active.size(); ++a)
            out.S(c, active[a]) =
                std::min(std::log2(1.0 + sinr(static_cast<Eigen::Index>(a))), rf.max_spectral_efficiency);
    }
    return out;
}

struct AllocationPolicy
{
    LpStatus status = LpStatus::optimal;
    Eigen::VectorXd x;     // time fraction per configuration
    Eigen::VectorXd rates; // S^T x
    double objective = 0.0;
};

namespace detail {

inline void check_se_matrix(const Eigen::MatrixXd &S)
{
    if (S.rows() == 0 || S.cols() == 0 || !S.allFinite() || (S.array() < 0.0).any())
        throw std::invalid_argument("spectral-efficiency matrix must be non-empty, finite and non-negative");
}

} // namespace detail

/// max_x min_q (S^T x)_q over the probability simplex, as the epigraph LP in (x, t).
inline AllocationPolicy solve_maxmin_rate(const Eigen::MatrixXd &S)
{
    detail::check_se_matrix(S);
    const Eigen::Index C = S.rows(), Q = S.cols();
    LinearProgram lp;
    lp.maximize = true;
    lp.objective = Eigen::VectorXd::Zero(C + 1);
    lp.objective(C) = 1.0;
    lp.a_ub = Eigen::MatrixXd::Zero(Q, C + 1);
    lp.a_ub.leftCols(C) = -S.transpose();
    lp.a_ub.col(C).setOnes();
    lp.b_ub = Eigen::VectorXd::Zero(Q);
    lp.a_eq = Eigen::MatrixXd::Zero(1, C + 1);
    lp.a_eq.leftCols(C).setOnes();
    lp.b_eq = Eigen::VectorXd::Ones(1);
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal)
        throw std::logic_error("solve_maxmin_rate: epigraph LP must be feasible and bounded");
    AllocationPolicy out;
    out.x = r.x.head(C);
    out.rates = S.transpose() * out.x;
    out.objective = out.rates.minCoeff();
    return out;
}

/// Sum-rate maximization with every user guaranteed at least r_min.
inline AllocationPolicy solve_sumrate_with_floor(const Eigen::MatrixXd &S, double r_min)
{
    detail::check_se_matrix(S);
    if (!(r_min >= 0.0))
        throw std::invalid_argument("solve_sumrate_with_floor: r_min must be non-negative");
    const Eigen::Index C = S.rows(), Q = S.cols();
    LinearProgram lp;
    lp.maximize = true;
    lp.objective = S.rowwise().sum();
    lp.a_ub = -S.transpose();
    lp.b_ub = Eigen::VectorXd::Constant(Q, -r_min);
    lp.a_eq = Eigen::MatrixXd::Ones(1, C);
    lp.b_eq = Eigen::VectorXd::Ones(1);
    const LpResult r = solve_lp(lp);
    AllocationPolicy out;
    out.status = r.status;
    if (r.status != LpStatus::optimal)
        return out;
    out.x = r.x;
    out.rates = S.transpose() * out.x;
    out.objective = out.rates.sum();
    return out;
}

/// Hardware ceiling on the max-min rate: min(K, Q) / Q * s_M.
inline double saturation_rate(int K, int Q, double s_max)
{
    return static_cast<double>(std::min(K, Q)) / static_cast<double>(Q) * s_max;
}

} // namespace canyon

#endif // CANYON_SCHEDULER_HPP
