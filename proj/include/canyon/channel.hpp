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

#ifndef CANYON_CHANNEL_HPP
#define CANYON_CHANNEL_HPP

#include "geometry.hpp"
#include "types.hpp"

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace canyon {

/// In-plane unit axes (u, v) of a planar array with the given normal.
inline std::pair<Vec3, Vec3> array_axes(const Vec3 &normal)
{
    const Vec3 n = normal.normalized();
    Vec3 u = Vec3::UnitZ().cross(n);
    if (u.norm() < 1e-9)
        u = Vec3::UnitX().cross(n); // normal along z
    u.normalize();
    const Vec3 v = n.cross(u);
    return {u, v};
}

// Element (r, c) sits at (c * spacing) along u and (r * spacing) along v, in wavelengths.
inline cvec steering_vector(const ArrayGeometry &array, const Vec3 &direction)
{
    const auto [u_axis, v_axis] = array_axes(array.normal);
    const Vec3 dir = direction.normalized();
    const double u = dir.dot(u_axis);
    const double v = dir.dot(v_axis);
    cvec a(array.size());
    for (int r = 0; r < array.rows; ++r)
        for (int c = 0; c < array.cols; ++c)
            a(r * array.cols + c) = std::polar(1.0, 2.0 * pi * array.element_spacing * (c * u + r * v));
    return a;
}

/// Complex amplitude of one ray: free-space spreading, oxygen absorption and per-bounce reflection loss.
inline std::complex<double> path_gain(const PropagationPath &path, const RfConstants &rf)
{
    const double L = path.total_length;
    const double amplitude = rf.wavelength / (4.0 * pi * L) *
                             std::pow(10.0, -rf.oxygen_absorption_db_per_km * (L / 1000.0) / 20.0) *
                             std::pow(10.0, -rf.reflection_loss_db * path.num_reflections / 20.0);
    return std::polar(amplitude, -2.0 * pi * L / rf.wavelength);
}

/// Narrowband MIMO channel (rx elements x tx elements) as a sum of ray outer products.
inline cmat channel_matrix(const std::vector<PropagationPath> &paths, const ArrayGeometry &tx_array,
                           const ArrayGeometry &rx_array, const RfConstants &rf)
{
    if (paths.empty())
        throw std::invalid_argument("channel_matrix: no propagation paths");
    cmat H = cmat::Zero(rx_array.size(), tx_array.size());
    for (const PropagationPath &p : paths)
        H.noalias() += path_gain(p, rf) * steering_vector(rx_array, p.arrival_dir) *
                       steering_vector(tx_array, p.departure_dir).adjoint();
    return H;
}

inline cvec receive_combiner(const ArrayGeometry &rx_array, const Vec3 &arrival_dir)
{
    return steering_vector(rx_array, arrival_dir) / std::sqrt(static_cast<double>(rx_array.size()));
}

// The user keeps this combiner fixed for every incident signal, wanted or not. Returns h with
// h^H = w^H H, so that the received amplitude for a transmit vector x is h^H x.
inline cvec receive_beamform(const cmat &H, const ArrayGeometry &rx_array, const PropagationPath &serving_path)
{
    return H.adjoint() * receive_combiner(rx_array, serving_path.arrival_dir);
}

inline cvec receive_beamform(const cmat &H, const cvec &combiner) { return H.adjoint() * combiner; }

/// Thermal noise over one reuse sub-band, in watts.
inline double noise_power(const RfConstants &rf, int reuse)
{
    if (reuse < 1)
        throw std::invalid_argument("noise_power: reuse factor must be >= 1");
    return std::pow(10.0, (rf.noise_psd_dbm_hz + rf.noise_figure_db) / 10.0) * (rf.bandwidth_hz / reuse) * 1e-3;
}

/// Link from one face to one user: receive array turned toward the face, combiner fixed on the LoS.
struct UserLink
{
    Position3D user = Position3D::Zero();
    ArrayGeometry rx_array;
    cvec combiner;
    std::vector<PropagationPath> paths; // paths[0] is the LoS
};

inline UserLink make_link(const CanyonScenario &s, const Face &serving, const Position3D &user)
{
    UserLink link;
    link.user = user;
    link.paths = trace_paths(serving.position, user, s);
    link.rx_array = s.rx_array.facing(link.paths.front().arrival_dir);
    link.combiner = receive_combiner(link.rx_array, link.paths.front().arrival_dir);
    return link;
}

inline ArrayGeometry tx_array_of(const CanyonScenario &s, const Face &face)
{
    return s.tx_array.facing(face.normal());
}

/// Effective channel from `face` to a user whose combiner is fixed by `link`.
/// With los_only the reflections are dropped.
inline cvec effective_channel(const CanyonScenario &s, const Face &face, const UserLink &link, bool los_only = false)
{
    std::vector<PropagationPath> paths = trace_paths(face.position, link.user, s);
    if (los_only)
        paths.resize(1);
    return receive_beamform(channel_matrix(paths, tx_array_of(s, face), link.rx_array, s.rf), link.combiner);
}

} // namespace canyon

#endif // CANYON_CHANNEL_HPP
