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

#ifndef CANYON_GEOMETRY_HPP
#define CANYON_GEOMETRY_HPP

#include "types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace canyon {

enum class Facing { east, west };

/// One antenna face of a base station. All K subarrays of a face share its position.
struct Face
{
    int bs_index = 0;
    Facing facing = Facing::east;
    Position3D position = Position3D::Zero();

    Vec3 normal() const { return facing == Facing::east ? Vec3::UnitX() : Vec3(-Vec3::UnitX()); }

    /// Index of the picocell this face illuminates.
    int picocell() const { return facing == Facing::east ? bs_index : bs_index - 1; }
};

struct BaseStation
{
    int index = 0;
    Position3D position = Position3D::Zero();

    Face east() const { return {index, Facing::east, position}; }
    Face west() const { return {index, Facing::west, position}; }
    std::array<Face, 2> faces() const { return {east(), west()}; }
};

// Zig-zag deployment: BS i sits at x = i*d on the y = 0 wall for even i and on y = W for odd i.
inline std::vector<BaseStation> place_base_stations(const CanyonScenario &s)
{
    s.validate();
    const int count = static_cast<int>(std::floor(s.street_length / s.picocell_width + 1e-9)) + 1;
    std::vector<BaseStation> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back({i, Position3D(i * s.picocell_width, (i % 2 == 0) ? 0.0 : s.street_width, s.bs_height)});
    return out;
}

inline int picocell_count(const CanyonScenario &s)
{
    return static_cast<int>(std::floor(s.street_length / s.picocell_width + 1e-9));
}

inline Face face_of(const CanyonScenario &s, int bs_index, Facing facing)
{
    const Position3D p(bs_index * s.picocell_width, (bs_index % 2 == 0) ? 0.0 : s.street_width, s.bs_height);
    return {bs_index, facing, p};
}

/// Q users uniform over the picocell footprint and the allowed height band.
template <class Rng>
std::vector<Position3D> drop_users(const CanyonScenario &s, int picocell_index, Rng &rng)
{
    if (picocell_index < 0 || picocell_index >= picocell_count(s))
        throw std::out_of_range("picocell index outside the street");
    const double x0 = picocell_index * s.picocell_width;
    std::uniform_real_distribution<double> ux(x0, x0 + s.picocell_width);
    std::uniform_real_distribution<double> uy(0.0, s.street_width);
    std::uniform_real_distribution<double> uz(s.user_height_min, s.user_height_max);
    std::vector<Position3D> users;
    users.reserve(static_cast<std::size_t>(s.users_per_picocell));
    for (int q = 0; q < s.users_per_picocell; ++q)
    {
        const double x = ux(rng);
        const double y = uy(rng);
        const double z = uz(rng);
        users.emplace_back(x, y, z);
    }
    return users;
}

/// Q users served by one face: uniform over the whole picocell the face illuminates, so the two
/// faces sharing a picocell each serve their own Q users across its full width.
template <class Rng>
std::vector<Position3D> drop_served_users(const CanyonScenario &s, const Face &face, Rng &rng)
{
    const int cell = face.picocell();
    if (cell < 0 || cell >= picocell_count(s))
        throw std::out_of_range("face does not illuminate a picocell inside the street");
    return drop_users(s, cell, rng);
}

enum class PathKind { los, wall_bounce, ground_bounce };

struct PropagationPath
{
    PathKind kind = PathKind::los;
    double total_length = 0.0;
    std::optional<Position3D> bounce_point;
    Vec3 departure_dir = Vec3::UnitX(); // unit, leaving the transmitter
    Vec3 arrival_dir = Vec3::UnitX();   // unit, from the receiver back toward the last hop
    int num_reflections = 0;
};

namespace detail {

// Single reflection off the plane {p[axis] == value} by the image method.
inline std::optional<PropagationPath> image_path(const Position3D &tx, const Position3D &rx, int axis, double value,
                                                 PathKind kind, const CanyonScenario &s)
{
    constexpr double on_plane = 1e-9;
    if (std::abs(tx[axis] - value) < on_plane || std::abs(rx[axis] - value) < on_plane)
        return std::nullopt; // an endpoint on the plane merges the bounce with the direct ray
    Position3D image = rx;
    image[axis] = 2.0 * value - rx[axis];
    const double t = (value - tx[axis]) / (image[axis] - tx[axis]);
    if (!(t > 0.0 && t < 1.0))
        return std::nullopt;
    const Position3D bounce = tx + t * (image - tx);
    if (bounce.x() < 0.0 || bounce.x() > s.street_length)
        return std::nullopt;
    if (bounce.y() < -on_plane || bounce.y() > s.street_width + on_plane || bounce.z() < -on_plane)
        return std::nullopt;
    PropagationPath p;
    p.kind = kind;
    p.total_length = (image - tx).norm();
    p.bounce_point = bounce;
    p.departure_dir = (bounce - tx).normalized();
    p.arrival_dir = (bounce - rx).normalized();
    p.num_reflections = 1;
    return p;
}

} // namespace detail

/// LoS plus the first-order reflections off both walls and the ground.
inline std::vector<PropagationPath> trace_paths(const Position3D &tx, const Position3D &rx, const CanyonScenario &s)
{
    const Vec3 delta = rx - tx;
    if (!(delta.norm() > 0.0))
        throw std::invalid_argument("trace_paths: transmitter and receiver coincide");
    std::vector<PropagationPath> paths;
    paths.reserve(4);
    PropagationPath los;
    los.kind = PathKind::los;
    los.total_length = delta.norm();
    los.departure_dir = delta.normalized();
    los.arrival_dir = -los.departure_dir;
    paths.push_back(los);
    if (auto p = detail::image_path(tx, rx, 1, 0.0, PathKind::wall_bounce, s))
        paths.push_back(*p);
    if (auto p = detail::image_path(tx, rx, 1, s.street_width, PathKind::wall_bounce, s))
        paths.push_back(*p);
    if (auto p = detail::image_path(tx, rx, 2, 0.0, PathKind::ground_bounce, s))
        paths.push_back(*p);
    return paths;
}

struct EscapeRange
{
    double range = 0.0; // m along the street
    int n_max = 0;      // neighbouring BSs reachable by the main beam
};

inline EscapeRange main_beam_escape_range(double bs_height, double user_height_max, double picocell_width)
{
    if (!(bs_height > user_height_max))
        throw InvalidScenario("main_beam_escape_range: bs_height must exceed user_height_max");
    const double ratio = (bs_height + user_height_max) / (bs_height - user_height_max);
    return {picocell_width * ratio, static_cast<int>(std::ceil(ratio - 1e-12))};
}

struct BeamTrace
{
    std::vector<Position3D> bounces;
    bool escaped = false;           // left through the canyon top
    bool left_street = false;       // crossed x = 0 or x = street_length
    double max_forward_range = 0.0; // largest |x - x_tx| at which the ray is at or below h_max
};

/// Follows a pencil beam through specular reflections off the walls and the ground. A ray that
/// is climbing and above both the BS height and h_max can never come back down, so it is
/// reported as escaped at that point.
inline BeamTrace trace_beam_forward(const Position3D &tx, const Vec3 &direction, const CanyonScenario &s,
                                    int max_bounces)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double tiny = 1e-12;
    const double h_max = s.user_height_max;
    const double top = std::max(s.bs_height, h_max);

    BeamTrace out;
    Position3D pos = tx;
    Vec3 dir = direction.normalized();

    auto accumulate = [&](const Position3D &a, const Position3D &b) {
        const double za = a.z(), zb = b.z();
        if (za > h_max && zb > h_max)
            return;
        auto reach = [&](const Position3D &p) {
            out.max_forward_range = std::max(out.max_forward_range, std::abs(p.x() - tx.x()));
        };
        if (za <= h_max)
            reach(a);
        if (zb <= h_max)
            reach(b);
        if ((za - h_max) * (zb - h_max) < 0.0)
            reach(a + (h_max - za) / (zb - za) * (b - a));
    };

    for (int bounce = 0;; ++bounce)
    {
        if (dir.z() > 0.0 && pos.z() >= top - tiny)
        {
            out.escaped = true;
            break;
        }
        double t = inf;
        int hit = -1; // 0: y=0, 1: y=W, 2: ground, 3: street end, 4: canyon top
        auto consider = [&](double cand, int what) {
            if (cand > tiny && cand < t)
            {
                t = cand;
                hit = what;
            }
        };
        if (dir.y() < 0.0)
            consider(-pos.y() / dir.y(), 0);
        if (dir.y() > 0.0)
            consider((s.street_width - pos.y()) / dir.y(), 1);
        if (dir.z() < 0.0)
            consider(-pos.z() / dir.z(), 2);
        if (dir.z() > 0.0)
            consider((top - pos.z()) / dir.z(), 4);
        if (dir.x() < 0.0)
            consider(-pos.x() / dir.x(), 3);
        if (dir.x() > 0.0)
            consider((s.street_length - pos.x()) / dir.x(), 3);
        if (hit < 0)
            break;

        const Position3D next = pos + t * dir;
        accumulate(pos, next);
        pos = next;
        if (hit == 4)
        {
            out.escaped = true;
            break;
        }
        if (hit == 3)
        {
            out.left_street = true;
            break;
        }
        if (bounce >= max_bounces)
            break;
        out.bounces.push_back(pos);
        if (hit == 2)
            dir.z() = -dir.z();
        else
            dir.y() = -dir.y();
    }
    return out;
}

} // namespace canyon

#endif // CANYON_GEOMETRY_HPP
