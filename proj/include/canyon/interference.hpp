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

#ifndef CANYON_INTERFERENCE_HPP
#define CANYON_INTERFERENCE_HPP

#include "beamforming.hpp"
#include "channel.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace canyon {

/// Beams that one neighbouring face is radiating during the snapshot.
struct InterferingAssignment
{
    Face face;
    std::vector<Position3D> users;   // the users it is serving
    std::vector<cvec> beamformers;   // one per active subarray
};

struct SourceContribution
{
    Face face;
    bool in_band = true;
    double los_watts = 0.0;   // LoS ray alone
    double nlos_watts = 0.0;  // reflected rays alone
    double total_watts = 0.0; // all rays combined coherently, summed over the face's subarrays
};

struct InterferenceBreakdown
{
    std::vector<SourceContribution> sources;

    double total() const
    {
        return std::accumulate(sources.begin(), sources.end(), 0.0,
                               [](double acc, const SourceContribution &c) { return acc + c.total_watts; });
    }
};

/// Base stations share a sub-band when their indices agree modulo F (both faces of a BS alike).
inline bool same_band(int bs_a, int bs_b, int reuse)
{
    return ((bs_a - bs_b) % reuse + reuse) % reuse == 0;
}

/// The inter-cell sources around a face: the two nearest BSs behind it radiating in the same
/// direction, and the two nearest BSs ahead of it radiating back toward it.
inline std::vector<Face> neighbour_sources(const CanyonScenario &s, const Face &target)
{
    const int count = picocell_count(s) + 1;
    const int b = target.bs_index;
    const int sign = target.facing == Facing::east ? 1 : -1;
    const Facing back = target.facing == Facing::east ? Facing::west : Facing::east;
    std::vector<Face> out;
    const std::pair<int, Facing> offsets[] = {{-2 * sign, target.facing}, {-1 * sign, target.facing}, {1 * sign, back}, {2 * sign, back}};
    for (auto [offset, facing] : offsets)
    {
        const int idx = b + offset;
        if (idx < 0 || idx >= count)
            continue;
        const Face f = face_of(s, idx, facing);
        if (f.picocell() < 0 || f.picocell() >= picocell_count(s))
            continue;
        out.push_back(f);
    }
    return out;
}

/// A neighbouring face serving min(K, Q) of its own randomly dropped users with max-min beams.
template <class Rng>
InterferingAssignment draw_assignment(const CanyonScenario &s, const Face &face, Rng &rng,
                                      const MaxMinOptions &options = {})
{
    InterferingAssignment a;
    a.face = face;
    std::vector<Position3D> users = drop_served_users(s, face, rng);
    std::shuffle(users.begin(), users.end(), rng);
    users.resize(static_cast<std::size_t>(std::min(s.subarrays_per_face, s.users_per_picocell)));
    a.users = users;
    const double sigma2 = noise_power(s.rf, s.reuse_factor);
    std::vector<cvec> h;
    for (const Position3D &u : users)
        h.push_back(effective_channel(s, face, make_link(s, face, u), true));
    a.beamformers = solve_maxmin_sinr(h, std::vector<double>(h.size(), sigma2), s.rf, options).beamformers;
    return a;
}

/// Inter-cell interference at one user, per source. Out-of-band sources contribute exactly zero.
inline InterferenceBreakdown intercell_interference(const CanyonScenario &s, const UserLink &link,
                                                   const Face &serving, const std::vector<InterferingAssignment> &assignments)
{
    InterferenceBreakdown out;
    for (const InterferingAssignment &a : assignments)
    {
        SourceContribution c;
        c.face = a.face;
        c.in_band = same_band(a.face.bs_index, serving.bs_index, s.reuse_factor);
        if (c.in_band && !a.beamformers.empty())
        {
            const ArrayGeometry tx = tx_array_of(s, a.face);
            const std::vector<PropagationPath> paths = trace_paths(a.face.position, link.user, s);
            const cvec h_los = receive_beamform(channel_matrix({paths.front()}, tx, link.rx_array, s.rf), link.combiner);
            cvec h_nlos = cvec::Zero(h_los.size());
            if (paths.size() > 1)
                h_nlos = receive_beamform(channel_matrix({paths.begin() + 1, paths.end()}, tx, link.rx_array, s.rf),
                                          link.combiner);
            for (const cvec &w : a.beamformers)
            {
                const std::complex<double> los = w.dot(h_los);
                const std::complex<double> nlos = w.dot(h_nlos);
                c.los_watts += std::norm(los);
                c.nlos_watts += std::norm(nlos);
                c.total_watts += std::norm(los + nlos);
            }
        }
        out.sources.push_back(c);
    }
    return out;
}

/// Smallest desired power inside a picocell: EIRP-limited transmitter, full array gains at both
/// ends, the longest link the picocell allows.
inline double worst_case_desired_power(const CanyonScenario &s)
{
    const double dz = s.bs_height - s.user_height_min;
    const double L = std::sqrt(s.picocell_width * s.picocell_width + s.street_width * s.street_width + dz * dz);
    const double spread = s.rf.wavelength / (4.0 * pi * L);
    return s.rf.tx_power_watts() * s.tx_array.size() * s.rx_array.size() * spread * spread *
           std::pow(10.0, -s.rf.oxygen_absorption_db_per_km * (L / 1000.0) / 10.0);
}

inline int center_bs_index(const CanyonScenario &s) { return picocell_count(s) / 2; }

/// Matched LoS beam toward `user` at the nominal per-subarray transmit power.
inline cvec matched_beam(const CanyonScenario &s, const Face &face, const Position3D &user)
{
    const Vec3 dir = (user - face.position).normalized();
    return std::sqrt(s.rf.tx_power_watts() / s.tx_array.size()) * steering_vector(tx_array_of(s, face), dir);
}

/// Received interference from every base station in one snapshot, indexed by BS offset from the
/// serving BS (entry `offset + center`). Each face points K matched beams at its own random users.
template <class Rng>
std::vector<double> interference_by_offset(const CanyonScenario &s, Rng &rng)
{
    const int count = picocell_count(s) + 1;
    const int b = center_bs_index(s);
    CanyonScenario single = s;
    single.users_per_picocell = 1;
    const Face serving = face_of(s, b, Facing::east);
    const UserLink link = make_link(s, serving, drop_served_users(single, serving, rng).front());

    CanyonScenario own = s;
    own.users_per_picocell = s.subarrays_per_face;
    std::vector<double> by_bs(static_cast<std::size_t>(count), 0.0);
    for (int n = 0; n < count; ++n)
    {
        if (n == b)
            continue;
        for (const Face &f : {face_of(s, n, Facing::east), face_of(s, n, Facing::west)})
        {
            if (f.picocell() < 0 || f.picocell() >= picocell_count(s))
                continue;
            const cvec h = receive_beamform(
                channel_matrix(trace_paths(f.position, link.user, s), tx_array_of(s, f), link.rx_array, s.rf),
                link.combiner);
            for (const Position3D &u : drop_served_users(own, f, rng))
                by_bs[static_cast<std::size_t>(n)] += std::norm(matched_beam(s, f, u).dot(h));
        }
    }
    return by_bs;
}

/// alpha_1 .. alpha_{c_max}: mean interference from in-band BSs at offset |n| >= c over the
/// worst-case desired power. The infinite tails are cut at the street ends.
template <class Rng>
std::vector<double> estimate_alpha_curve(const CanyonScenario &s, int c_max, int num_trials, Rng &rng)
{
    s.validate();
    if (c_max < 1 || num_trials < 1)
        throw std::invalid_argument("estimate_alpha_curve: c and trial count must be >= 1");
    const int count = picocell_count(s) + 1;
    const int b = center_bs_index(s);
    if (b - c_max < 0 || b + c_max > count - 1)
        throw InvalidScenario("street too short to host base stations at the requested offset");
    std::vector<double> tail(static_cast<std::size_t>(c_max), 0.0);
    for (int t = 0; t < num_trials; ++t)
    {
        const std::vector<double> by_bs = interference_by_offset(s, rng);
        for (int c = 1; c <= c_max; ++c)
            for (int n = 0; n < count; ++n)
                if (std::abs(n - b) >= c && same_band(n, b, s.reuse_factor))
                    tail[static_cast<std::size_t>(c - 1)] += by_bs[static_cast<std::size_t>(n)];
    }
    const double P = worst_case_desired_power(s);
    for (double &v : tail)
        v /= num_trials * P;
    return tail;
}

template <class Rng>
double estimate_alpha_c(const CanyonScenario &s, int c, int num_trials, Rng &rng)
{
    return estimate_alpha_curve(s, c, num_trials, rng).back();
}

struct LosNlosSplit
{
    double los_watts = 0.0;
    double nlos_watts = 0.0;
};

/// Intra-cell leakage of a beam aimed at `target` into `victim`, served by the same face.
inline LosNlosSplit intracell_los_nlos(const CanyonScenario &s, const Face &face, const Position3D &target,
                                       const Position3D &victim)
{
    const cvec w = matched_beam(s, face, target);
    const UserLink link = make_link(s, face, victim);
    const ArrayGeometry tx = tx_array_of(s, face);
    LosNlosSplit out;
    out.los_watts = std::norm(w.dot(receive_beamform(channel_matrix({link.paths.front()}, tx, link.rx_array, s.rf), link.combiner)));
    if (link.paths.size() > 1)
        out.nlos_watts = std::norm(w.dot(receive_beamform(
            channel_matrix({link.paths.begin() + 1, link.paths.end()}, tx, link.rx_array, s.rf), link.combiner)));
    return out;
}

} // namespace canyon

#endif // CANYON_INTERFERENCE_HPP
