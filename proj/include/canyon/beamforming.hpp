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

#ifndef CANYON_BEAMFORMING_HPP
#define CANYON_BEAMFORMING_HPP

#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace canyon {

// Downlink transmit beamforming with power control for the K streams of one base-station face.
//
// Channels are the effective (receive-combined) vectors h_k, so that stream i reaches user k
// with amplitude w_i^H h_k. Internally everything runs on noise-normalized channels
// h_k / sigma_k, for which the SINR of user k reads
//
//     |w_k^H h~_k|^2 / (sum_{i != k} |w_i^H h~_k|^2 + 1).
//
// The power problem (minimum total power meeting a common SINR target) is solved through the
// virtual uplink: LMMSE receivers for the current uplink powers, a fixed-point power update,
// and finally the downlink powers that meet the target exactly for those receivers.

struct BeamformerSolution
{
    std::vector<cvec> beamformers;  // transmit vectors, sqrt(W)
    Eigen::VectorXd powers;         // ||w_k||^2, W
    double achieved_gamma = 0.0;    // common linear SINR target met by every stream
    Eigen::VectorXd per_user_sinr;
    bool converged = false;
    int iterations = 0;
};

inline Eigen::VectorXd compute_sinr(const std::vector<cvec> &beamformers, const std::vector<cvec> &channels,
                                    const std::vector<double> &noise_powers)
{
    const std::size_t K = channels.size();
    if (beamformers.size() != K || noise_powers.size() != K)
        throw std::invalid_argument("compute_sinr: mismatched number of users");
    Eigen::VectorXd sinr(static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k)
    {
        double interference = 0.0;
        for (std::size_t i = 0; i < K; ++i)
            if (i != k)
                interference += std::norm(beamformers[i].dot(channels[k]));
        sinr(static_cast<Eigen::Index>(k)) = std::norm(beamformers[k].dot(channels[k])) / (interference + noise_powers[k]);
    }
    return sinr;
}

namespace detail {

inline void check_channels(const std::vector<cvec> &channels)
{
    if (channels.empty())
        throw std::invalid_argument("beamforming: no channels");
    const Eigen::Index n = channels.front().size();
    for (const cvec &h : channels)
    {
        if (h.size() != n)
            throw std::invalid_argument("beamforming: channel vectors differ in length");
        if (!h.allFinite())
            throw std::invalid_argument("beamforming: non-finite channel entry");
    }
}

inline std::vector<cvec> normalize_channels(const std::vector<cvec> &channels, const std::vector<double> &noise)
{
    if (noise.size() != channels.size())
        throw std::invalid_argument("beamforming: one noise power per channel required");
    std::vector<cvec> out;
    out.reserve(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k)
    {
        if (!(noise[k] > 0.0))
            throw std::invalid_argument("beamforming: noise powers must be positive");
        out.push_back(channels[k] / std::sqrt(noise[k]));
    }
    return out;
}

// A^{-1} h for A = I + sum_{j != k} p_j h_j h_j^H, using the low-rank structure of A - I.
inline cvec regularized_solve(std::size_t k, const std::vector<cvec> &h, const Eigen::VectorXd &p)
{
    const Eigen::Index n = h[k].size();
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < h.size(); ++j)
        if (j != k && p(static_cast<Eigen::Index>(j)) > 0.0)
            cols.push_back(static_cast<Eigen::Index>(j));
    if (cols.empty())
        return h[k];
    cmat B(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        B.col(static_cast<Eigen::Index>(c)) = std::sqrt(p(cols[c])) * h[static_cast<std::size_t>(cols[c])];
    cmat small = cmat::Identity(B.cols(), B.cols());
    small.noalias() += B.adjoint() * B;
    const cvec y = small.ldlt().solve(B.adjoint() * h[k]);
    return h[k] - B * y;
}

} // namespace detail

/// Minimizer of sum_{j != k} p_j |w^H h_j|^2 + ||w||^2 subject to w^H h_k = 1, in closed form.
inline cvec lmmse_beamformer(std::size_t k, const std::vector<cvec> &normalized_channels, const Eigen::VectorXd &powers)
{
    detail::check_channels(normalized_channels);
    if (k >= normalized_channels.size() || powers.size() != static_cast<Eigen::Index>(normalized_channels.size()))
        throw std::invalid_argument("lmmse_beamformer: index or power vector does not match the channels");
    if ((powers.array() < 0.0).any())
        throw std::invalid_argument("lmmse_beamformer: negative power");
    const cvec x = detail::regularized_solve(k, normalized_channels, powers);
    const std::complex<double> denom = normalized_channels[k].dot(x); // h^H A^{-1} h, real positive
    return x / std::conj(denom);
}

struct PowerSolveOptions
{
    int max_iterations = 500;
    double tolerance = 1e-8;          // largest relative change of any uplink power
    std::optional<double> power_cap;  // total power (W) treated as divergence; default 1e6 x K x EIRP/N
};

enum class PowerStatus { converged, infeasible, not_converged };

struct PowerSolution
{
    PowerStatus status = PowerStatus::not_converged;
    std::vector<cvec> beamformers;  // w_k = sqrt(downlink_k) * receiver_k
    std::vector<cvec> receivers;    // LMMSE directions, receiver_k^H h~_k = 1
    Eigen::VectorXd uplink_powers;  // fixed point of the power update
    Eigen::VectorXd downlink_powers;
    Eigen::VectorXd transmit_powers; // ||w_k||^2
    int iterations = 0;

    bool feasible() const { return status == PowerStatus::converged; }
    double total_power() const { return transmit_powers.size() ? transmit_powers.sum() : 0.0; }
};

namespace detail {

// One sweep of the uplink power update for all users, from the same previous iterate.
inline Eigen::VectorXd power_update(const std::vector<cvec> &h, const Eigen::VectorXd &p, double gamma,
                                    std::vector<cvec> &receivers)
{
    const std::size_t K = h.size();
    Eigen::VectorXd next(static_cast<Eigen::Index>(K));
    receivers.resize(K);
    for (std::size_t k = 0; k < K; ++k)
    {
        receivers[k] = lmmse_beamformer(k, h, p);
        double acc = receivers[k].squaredNorm();
        for (std::size_t j = 0; j < K; ++j)
            if (j != k)
                acc += p(static_cast<Eigen::Index>(j)) * std::norm(receivers[k].dot(h[j]));
        next(static_cast<Eigen::Index>(k)) = gamma * acc;
    }
    return next;
}

// Downlink powers meeting SINR == gamma exactly for fixed unit-response receivers:
// q_k = gamma * (sum_{i != k} q_i |r_i^H h~_k|^2 + 1).
inline std::optional<Eigen::VectorXd> downlink_powers(const std::vector<cvec> &h, const std::vector<cvec> &receivers,
                                                      double gamma)
{
    const auto K = static_cast<Eigen::Index>(h.size());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(K, K);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index i = 0; i < K; ++i)
            if (i != k)
                system(k, i) = -gamma * std::norm(receivers[static_cast<std::size_t>(i)].dot(h[static_cast<std::size_t>(k)]));
    const Eigen::VectorXd q = system.partialPivLu().solve(Eigen::VectorXd::Constant(K, gamma));
    if (!q.allFinite() || (q.array() <= 0.0).any())
        return std::nullopt;
    return q;
}

} // namespace detail

/// Minimum total transmit power such that every user reaches SINR >= gamma.
inline PowerSolution solve_power_problem(const std::vector<cvec> &channels, const std::vector<double> &noise,
                                         double gamma, const Eigen::VectorXd &init_powers,
                                         const PowerSolveOptions &options, double eirp_watts)
{
    detail::check_channels(channels);
    if (!(gamma > 0.0))
        throw std::invalid_argument("solve_power_problem: gamma must be positive");
    const std::size_t K = channels.size();
    if (init_powers.size() != static_cast<Eigen::Index>(K) || (init_powers.array() < 0.0).any())
        throw std::invalid_argument("solve_power_problem: bad initial powers");
    const std::vector<cvec> h = detail::normalize_channels(channels, noise);
    const double N = static_cast<double>(channels.front().size());
    const double cap = options.power_cap.value_or(1e6 * static_cast<double>(K) * eirp_watts / N);

    PowerSolution out;
    Eigen::VectorXd p = init_powers;
    for (int n = 1; n <= options.max_iterations; ++n)
    {
        const Eigen::VectorXd next = detail::power_update(h, p, gamma, out.receivers);
        out.iterations = n;
        if (!next.allFinite() || next.sum() > cap)
        {
            out.status = PowerStatus::infeasible;
            out.uplink_powers = next;
            return out;
        }
        const double change = ((next - p).array().abs() / next.array().max(1e-300)).maxCoeff();
        p = next;
        if (change < options.tolerance)
        {
            out.status = PowerStatus::converged;
            break;
        }
    }
    out.uplink_powers = p;
    if (out.status != PowerStatus::converged)
        return out;

    // receivers from the converged powers
    detail::power_update(h, p, gamma, out.receivers);
    const auto q = detail::downlink_powers(h, out.receivers, gamma);
    if (!q)
    {
        out.status = PowerStatus::infeasible;
        return out;
    }
    out.downlink_powers = *q;
    out.transmit_powers.resize(static_cast<Eigen::Index>(K));
    out.beamformers.resize(K);
    for (std::size_t k = 0; k < K; ++k)
    {
        out.beamformers[k] = std::sqrt((*q)(static_cast<Eigen::Index>(k))) * out.receivers[k];
        out.transmit_powers(static_cast<Eigen::Index>(k)) = out.beamformers[k].squaredNorm();
    }
    return out;
}

inline PowerSolution solve_power_problem(const std::vector<cvec> &channels, const std::vector<double> &noise,
                                         double gamma, const Eigen::VectorXd &init_powers,
                                         const PowerSolveOptions &options = {}, const RfConstants &rf = {})
{
    return solve_power_problem(channels, noise, gamma, init_powers, options, rf.eirp_watts());
}

struct MaxMinOptions
{
    double step_db = 0.1;       // multiplicative SINR step
    double gamma_floor = 1e-3;  // first SINR target tried
    double gamma_ceiling = 1e12;
    PowerSolveOptions inner;
};

/// Largest common SINR on the grid gamma_floor * 10^(j * step_db / 10) such that every
/// subarray stays within the EIRP limit, G_max ||w_k||^2 <= EIRP with G_max = N.
inline BeamformerSolution solve_maxmin_sinr(const std::vector<cvec> &channels, const std::vector<double> &noise,
                                            const RfConstants &rf, const MaxMinOptions &options = {})
{
    detail::check_channels(channels);
    if (!(options.step_db > 0.0))
        throw std::invalid_argument("solve_maxmin_sinr: step must be positive");
    const std::size_t K = channels.size();
    const auto Ke = static_cast<Eigen::Index>(K);
    const double N = static_cast<double>(channels.front().size());
    const double eirp = rf.eirp_watts();
    const double per_subarray = eirp / N;

    const auto gamma_at = [&](long j) { return options.gamma_floor * std::pow(10.0, static_cast<double>(j) * options.step_db / 10.0); };

    std::optional<PowerSolution> best;
    long best_j = -1;
    int total_iterations = 0;

    auto attempt = [&](long j) -> bool {
        PowerSolveOptions inner = options.inner;
        Eigen::VectorXd init;
        if (best)
        {
            // warm start below the new fixed point: the uplink iterates then rise monotonically,
            // and a total above the EIRP-implied budget proves the target unreachable
            init = best->uplink_powers;
            inner.power_cap = static_cast<double>(K) * per_subarray;
        }
        else
        {
            init = Eigen::VectorXd::Constant(Ke, per_subarray);
        }
        PowerSolution sol = solve_power_problem(channels, noise, gamma_at(j), init, inner, eirp);
        total_iterations += sol.iterations;
        if (!sol.feasible() || sol.transmit_powers.maxCoeff() * N > eirp)
            return false;
        best = std::move(sol);
        best_j = j;
        return true;
    };

    BeamformerSolution out;
    if (!attempt(0))
    {
        out.beamformers.assign(K, cvec::Zero(channels.front().size()));
        out.powers = Eigen::VectorXd::Zero(Ke);
        out.per_user_sinr = Eigen::VectorXd::Zero(Ke);
        out.converged = false;
        out.iterations = total_iterations;
        return out;
    }
    // feasibility is monotone in gamma, so bracket and bisect over the grid index
    long lo = 0, hi = 1;
    while (gamma_at(hi) <= options.gamma_ceiling && attempt(hi))
    {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1)
    {
        const long mid = lo + (hi - lo) / 2;
        if (gamma_at(mid) <= options.gamma_ceiling && attempt(mid))
            lo = mid;
        else
            hi = mid;
    }
    if (best_j != lo)
        throw std::logic_error("solve_maxmin_sinr: bisection lost the feasible solution");

    out.beamformers = best->beamformers;
    out.powers = best->transmit_powers;
    out.achieved_gamma = gamma_at(lo);
    out.per_user_sinr = compute_sinr(out.beamformers, channels, noise);
    out.converged = true;
    out.iterations = total_iterations;
    return out;
}

/// Max-min SINR under a total power budget, computed independently of the fixed-point power
/// iteration: alternate MMSE receivers with the Perron root of the extended uplink coupling
/// matrix, then map the uplink powers to the downlink through the transposed coupling.
inline BeamformerSolution solve_maxmin_sum_power(const std::vector<cvec> &channels, const std::vector<double> &noise,
                                                 double total_power, int max_iterations = 2000,
                                                 double tolerance = 1e-14)
{
    detail::check_channels(channels);
    if (!(total_power > 0.0))
        throw std::invalid_argument("solve_maxmin_sum_power: power budget must be positive");
    const std::vector<cvec> h = detail::normalize_channels(channels, noise);
    const auto K = static_cast<Eigen::Index>(h.size());

    Eigen::VectorXd p = Eigen::VectorXd::Constant(K, total_power / static_cast<double>(K));
    std::vector<cvec> u(h.size());
    Eigen::MatrixXd coupling(K, K);
    Eigen::VectorXd inv_gain(K);
    double gamma = 0.0;
    BeamformerSolution out;

    for (int it = 1; it <= max_iterations; ++it)
    {
        for (Eigen::Index k = 0; k < K; ++k)
            u[static_cast<std::size_t>(k)] = detail::regularized_solve(static_cast<std::size_t>(k), h, p).normalized();
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const cvec &uk = u[static_cast<std::size_t>(k)];
            inv_gain(k) = 1.0 / std::norm(uk.dot(h[static_cast<std::size_t>(k)]));
            for (Eigen::Index j = 0; j < K; ++j)
                coupling(k, j) = (j == k) ? 0.0 : std::norm(uk.dot(h[static_cast<std::size_t>(j)]));
        }
        Eigen::MatrixXd ext(K + 1, K + 1);
        ext.topLeftCorner(K, K) = inv_gain.asDiagonal() * coupling;
        ext.topRightCorner(K, 1) = inv_gain;
        ext.bottomLeftCorner(1, K) = (Eigen::RowVectorXd::Ones(K) * inv_gain.asDiagonal() * coupling) / total_power;
        ext(K, K) = inv_gain.sum() / total_power;

        Eigen::EigenSolver<Eigen::MatrixXd> es(ext);
        Eigen::Index idx = 0;
        for (Eigen::Index i = 1; i < K + 1; ++i)
            if (es.eigenvalues()(i).real() > es.eigenvalues()(idx).real())
                idx = i;
        const double lambda = es.eigenvalues()(idx).real();
        Eigen::VectorXd vec = es.eigenvectors().col(idx).real();
        vec /= vec(K);
        p = vec.head(K).cwiseMax(0.0);

        const double next_gamma = 1.0 / lambda;
        out.iterations = it;
        const bool done = gamma > 0.0 && std::abs(next_gamma - gamma) <= tolerance * next_gamma;
        gamma = next_gamma;
        if (done)
        {
            out.converged = true;
            break;
        }
    }

    // downlink: q = gamma * D (Psi^T q + 1)
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(K, K) - gamma * inv_gain.asDiagonal() * coupling.transpose();
    const Eigen::VectorXd q = system.partialPivLu().solve(gamma * inv_gain);
    out.beamformers.resize(h.size());
    out.powers.resize(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        out.beamformers[static_cast<std::size_t>(k)] = std::sqrt(std::max(q(k), 0.0)) * u[static_cast<std::size_t>(k)];
        out.powers(k) = out.beamformers[static_cast<std::size_t>(k)].squaredNorm();
    }
    out.achieved_gamma = gamma;
    out.per_user_sinr = compute_sinr(out.beamformers, channels, noise);
    return out;
}

/// Transmit pattern |w^H a(direction)|^2 of a beamformer.
inline double transmit_pattern(const cvec &beamformer, const cvec &steering)
{
    return std::norm(steering.dot(beamformer));
}

} // namespace canyon

#endif // CANYON_BEAMFORMING_HPP
