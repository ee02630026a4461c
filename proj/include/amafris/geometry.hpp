// amafris - array-fed RIS hybrid MU-MIMO simulation library
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include "amafris/types.hpp"

#include <utility>
#include <vector>

namespace amafris {

/// Carrier, bandwidth and OFDM subcarrier grid. Frequencies inside the band
/// are baseband offsets f in [-W/2, W/2] from the carrier f0.
struct CarrierConfig {
    double f0 = 100e9;
    double bandwidth = 5e9;
    int n_sub = 64;

    double lambda0() const { return speed_of_light / f0; }
    double wavelength(double f) const { return speed_of_light / (f0 + f); }
    // Uniform grid over [-W/2, W/2] with both endpoints; a single subcarrier sits at 0.
    std::vector<double> subcarriers() const;
    // Beam squint is negligible for W <= 0.05 f0.
    bool squint_safe() const { return bandwidth <= 0.05 * f0; }
    void validate() const;
};

/// Square RIS of n_p x n_p passive elements fed by a co-axial n_a x n_a AMAF.
/// Element spacing is half the carrier wavelength on both arrays.
struct ArrayGeometry {
    int n_p = 40;
    int n_a = 2;
    double focal_ratio = 0.2;

    double spacing(const CarrierConfig &carrier) const { return 0.5 * carrier.lambda0(); }
    double aperture(const CarrierConfig &carrier) const { return n_p * spacing(carrier); }
    double focal_length(const CarrierConfig &carrier) const { return focal_ratio * aperture(carrier); }
    void validate() const;
};

/// Cell sector served by the BS. Ground frame S1: x to the right, y along the
/// sector bisector, z up, origin on the ground below the BS.
struct SectorGeometry {
    double bs_height = 20.0;
    double downtilt = deg2rad(37.37);
    double range_min = 17.0;
    double range_max = 100.0;
    double az_min = deg2rad(-60.0);
    double az_max = deg2rad(60.0);

    bool contains(const Vec2 &ground_xy) const;
    void validate() const;
};

/// Module centres in the RIS frame S2, in units of half the carrier wavelength.
struct ModuleLayout {
    std::vector<Vec3> positions;

    int size() const { return static_cast<int>(positions.size()); }
    // k modules stacked along z with gap_units empty half-wavelength slots between RIS edges.
    static ModuleLayout vertical_stack(int k, int n_p, double gap_units = 1.0);
    void validate() const;
};

/// Patch element power pattern 4 (cos az cos el)^2, zero outside the front hemisphere.
double patch_gain(double az, double el);

/// ULA steering vector exp(-j pi (lambda0/lambda) n sin_psi), n = 0..n_p-1.
CVec ula_steering(int n_p, double sin_psi, double f, const CarrierConfig &carrier);

/// Separable planar steering a(phi) x a(theta); row index runs along x (azimuth),
/// column index along z (elevation).
CMat planar_steering(int n_p, double phi, double theta, double f, const CarrierConfig &carrier);

// Angle convention in S2 (x horizontal, y boresight, z up the RIS):
//   n = (cos(theta) sin(phi), cos(theta) cos(phi), sin(theta)).
Vec3 direction_from_angles(double phi, double theta);
std::pair<double, double> angles_from_direction(const Vec3 &dir);

/// Rotations between the ground frame S1 and the down-tilted RIS frame S2.
Vec3 s1_to_s2(const Vec3 &v, const SectorGeometry &sector);
Vec3 s2_to_s1(const Vec3 &v, const SectorGeometry &sector);

/// Ground point at a given ground range and azimuth (azimuth measured from the sector bisector).
Vec2 ground_point(double range, double azimuth);

struct Aod {
    double phi = 0.0;
    double theta = 0.0;
    double distance = 0.0;
};

/// Angle of departure in S2 and BS-to-user 3D distance for a user on the ground.
/// Throws std::invalid_argument when the user lies behind the RIS plane.
Aod ground_to_aod(const Vec2 &user_xy, const SectorGeometry &sector);

/// Inverse of ground_to_aod: intersection of the departure ray with the ground.
/// Throws std::invalid_argument when the ray does not reach the ground.
Vec2 aod_to_ground(double phi, double theta, const SectorGeometry &sector);

/// Phase displacement exp(-j pi (lambda0/lambda) n.p) of a module centred at p (half-wavelength units).
cd module_phase_offset(double phi, double theta, const Vec3 &p_l, double f, const CarrierConfig &carrier);

} // namespace amafris
