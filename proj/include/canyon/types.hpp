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

#ifndef CANYON_TYPES_HPP
#define CANYON_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace canyon {

using Vec3 = Eigen::Vector3d;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/// Point in the canyon frame: x along the street, y across it (0..W), z height above ground.
using Position3D = Vec3;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;

class InvalidScenario : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Uniform rectangular array. Elements lie in the plane orthogonal to `normal`; the in-plane axes
// are the horizontal direction (z x normal) and the direction completing a right-handed frame.
struct ArrayGeometry
{
    int rows = 8;
    int cols = 8;
    double element_spacing = 0.5; // wavelengths
    Vec3 normal = Vec3::UnitX();

    int size() const { return rows * cols; }

    ArrayGeometry facing(const Vec3 &direction) const
    {
        ArrayGeometry copy = *this;
        copy.normal = direction.normalized();
        return copy;
    }
};

struct RfConstants
{
    double wavelength = speed_of_light / 60.0e9;   // m
    double oxygen_absorption_db_per_km = 16.0;
    double reflection_loss_db = 10.0;              // per bounce
    double tx_power_dbm = 21.938200260161128;      // per subarray, EIRP 40 dBm over an 8x8 array
    double eirp_dbm = 40.0;
    double noise_psd_dbm_hz = -174.0;
    double noise_figure_db = 6.0;
    double bandwidth_hz = 2.0e9;
    double max_spectral_efficiency = 6.0;          // bits/s/Hz, uncoded 64-QAM

    double eirp_watts() const { return dbm_to_watts(eirp_dbm); }
    double tx_power_watts() const { return dbm_to_watts(tx_power_dbm); }

    void validate() const
    {
        const double all[] = {wavelength, oxygen_absorption_db_per_km, reflection_loss_db, tx_power_dbm, eirp_dbm,
                              noise_psd_dbm_hz, noise_figure_db, bandwidth_hz, max_spectral_efficiency};
        for (double v : all)
            if (!std::isfinite(v))
                throw InvalidScenario("RF constants must be finite");
        if (wavelength <= 0.0)
            throw InvalidScenario("wavelength must be positive");
        if (bandwidth_hz <= 0.0)
            throw InvalidScenario("bandwidth must be positive");
        if (max_spectral_efficiency <= 0.0)
            throw InvalidScenario("maximum spectral efficiency must be positive");
    }
};

struct CanyonScenario
{
    double street_length = 1000.0;  // m
    double street_width = 20.0;     // W, m
    double picocell_width = 20.0;   // d, m
    double bs_height = 6.0;         // H_BS, m
    double user_height_max = 2.0;   // h_max, m
    double user_height_min = 1.0;   // m
    int subarrays_per_face = 2;     // K
    int users_per_picocell = 6;     // Q, users served per face
    ArrayGeometry tx_array{8, 8, 0.5, Vec3::UnitX()};
    ArrayGeometry rx_array{4, 4, 0.5, Vec3::UnitX()};
    RfConstants rf;
    int reuse_factor = 2;           // F
    std::uint64_t seed = 1;

    void validate() const
    {
        if (!(bs_height > user_height_max))
            throw InvalidScenario("bs_height must exceed user_height_max");
        if (!(user_height_max >= user_height_min))
            throw InvalidScenario("user_height_max must be >= user_height_min");
        if (!(user_height_min > 0.0))
            throw InvalidScenario("user_height_min must be positive");
        if (!(picocell_width > 0.0))
            throw InvalidScenario("picocell_width must be positive");
        if (!(street_width > 0.0))
            throw InvalidScenario("street_width must be positive");
        if (!(street_length >= picocell_width))
            throw InvalidScenario("street_length must be at least one picocell");
        if (subarrays_per_face < 1 || users_per_picocell < 1 || reuse_factor < 1)
            throw InvalidScenario("K, Q and F must be at least 1");
        for (const ArrayGeometry *a : {&tx_array, &rx_array})
            if (a->rows < 1 || a->cols < 1 || !(a->element_spacing > 0.0))
                throw InvalidScenario("array dimensions and spacing must be positive");
        rf.validate();
    }
};

} // namespace canyon

#endif // CANYON_TYPES_HPP
