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

#include "amafris/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amafris {

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watt(double dbm) { return from_db(dbm - 30.0); }
double watt_to_dbm(double watt) { return to_db(watt) + 30.0; }

std::vector<double> CarrierConfig::subcarriers() const
{
    std::vector<double> grid(static_cast<std::size_t>(n_sub));
    if (n_sub == 1)
    {
        grid[0] = 0.0;
        return grid;
    }
    for (int nu = 0; nu < n_sub; ++nu)
        grid[nu] = -0.5 * bandwidth + bandwidth * nu / (n_sub - 1);
    // exact symmetry about zero
    for (int nu = 0; nu < n_sub / 2; ++nu)
        grid[n_sub - 1 - nu] = -grid[nu];
    if (n_sub % 2 == 1)
        grid[n_sub / 2] = 0.0;
    return grid;
}

void CarrierConfig::validate() const
{
    if (!(f0 > 0.0))
        throw std::invalid_argument("Carrier frequency must be positive.");
    if (!(bandwidth >= 0.0) || bandwidth >= 2.0 * f0)
        throw std::invalid_argument("Bandwidth must be in [0, 2 f0).");
    if (n_sub < 1)
        throw std::invalid_argument("At least one subcarrier is required.");
}

void ArrayGeometry::validate() const
{
    if (n_a < 1)
        throw std::invalid_argument("AMAF side length must be at least 1.");
    if (n_p <= n_a)
        throw std::invalid_argument("RIS side length must exceed the AMAF side length.");
    if (!(focal_ratio > 0.0))
        throw std::invalid_argument("Focal ratio F/D must be positive.");
}

bool SectorGeometry::contains(const Vec2 &ground_xy) const
{
    const double range = ground_xy.norm();
    const double az = std::atan2(ground_xy.x(), ground_xy.y());
    return range >= range_min && range <= range_max && az >= az_min && az <= az_max;
}

void SectorGeometry::validate() const
{
    if (!(bs_height > 0.0))
        throw std::invalid_argument("BS height must be positive.");
    if (!(downtilt > 0.0 && downtilt < 0.5 * pi))
        throw std::invalid_argument("Downtilt must lie in (0, pi/2).");
    if (!(range_min > 0.0 && range_min < range_max))
        throw std::invalid_argument("Sector ranges must satisfy 0 < range_min < range_max.");
    if (!(az_min < az_max) || az_min <= -0.5 * pi || az_max >= 0.5 * pi)
        throw std::invalid_argument("Sector azimuth bounds must satisfy -pi/2 < az_min < az_max < pi/2.");
}

ModuleLayout ModuleLayout::vertical_stack(int k, int n_p, double gap_units)
{
    if (k < 1)
        throw std::invalid_argument("Module count must be at least 1.");
    ModuleLayout layout;
    const double pitch = n_p + gap_units;
    for (int l = 0; l < k; ++l)
        layout.positions.emplace_back(0.0, 0.0, pitch * l);
    return layout;
}

void ModuleLayout::validate() const
{
    if (positions.empty())
        throw std::invalid_argument("Module layout is empty.");
    for (std::size_t a = 0; a < positions.size(); ++a)
        for (std::size_t b = a + 1; b < positions.size(); ++b)
            if ((positions[a] - positions[b]).norm() == 0.0)
                throw std::invalid_argument("Module positions must be distinct.");
}

double patch_gain(double az, double el)
{
    if (!(std::abs(az) < 0.5 * pi && std::abs(el) < 0.5 * pi))
        return 0.0;
    const double c = std::cos(az) * std::cos(el);
    return 4.0 * c * c;
}

CVec ula_steering(int n_p, double sin_psi, double f, const CarrierConfig &carrier)
{
    if (std::abs(sin_psi) > 1.0)
        throw std::invalid_argument("ula_steering: |sin(psi)| must not exceed 1.");
    const double step = -pi * (carrier.f0 + f) / carrier.f0 * sin_psi;
    CVec a(n_p);
    for (int n = 0; n < n_p; ++n)
        a[n] = std::polar(1.0, step * n);
    return a;
}

CMat planar_steering(int n_p, double phi, double theta, double f, const CarrierConfig &carrier)
{
    const CVec ax = ula_steering(n_p, std::sin(phi), f, carrier);
    const CVec az = ula_steering(n_p, std::sin(theta), f, carrier);
    return ax * az.transpose();
}

Vec3 direction_from_angles(double phi, double theta)
{
    return {std::cos(theta) * std::sin(phi), std::cos(theta) * std::cos(phi), std::sin(theta)};
}

std::pair<double, double> angles_from_direction(const Vec3 &dir)
{
    const Vec3 n = dir.normalized();
    return {std::atan2(n.x(), n.y()), std::asin(std::clamp(n.z(), -1.0, 1.0))};
}

// S2 axes expressed in S1: x2 = x1, y2 = (0, cos a, -sin a), z2 = (0, sin a, cos a).
Vec3 s1_to_s2(const Vec3 &v, const SectorGeometry &sector)
{
    const double ca = std::cos(sector.downtilt), sa = std::sin(sector.downtilt);
    return {v.x(), ca * v.y() - sa * v.z(), sa * v.y() + ca * v.z()};
}

Vec3 s2_to_s1(const Vec3 &v, const SectorGeometry &sector)
{
    const double ca = std::cos(sector.downtilt), sa = std::sin(sector.downtilt);
    return {v.x(), ca * v.y() + sa * v.z(), -sa * v.y() + ca * v.z()};
}

Vec2 ground_point(double range, double azimuth)
{
    return {range * std::sin(azimuth), range * std::cos(azimuth)};
}

Aod ground_to_aod(const Vec2 &user_xy, const SectorGeometry &sector)
{
    const Vec3 d1(user_xy.x(), user_xy.y(), -sector.bs_height);
    const double dist = d1.norm();
    const Vec3 n = s1_to_s2(d1 / dist, sector);
    if (n.y() <= 0.0)
        throw std::invalid_argument("ground_to_aod: user lies behind the RIS plane.");
    const auto [phi, theta] = angles_from_direction(n);
    return {phi, theta, dist};
}

Vec2 aod_to_ground(double phi, double theta, const SectorGeometry &sector)
{
    const Vec3 d1 = s2_to_s1(direction_from_angles(phi, theta), sector);
    if (d1.z() >= 0.0)
        throw std::invalid_argument("aod_to_ground: departure ray does not reach the ground.");
    const double t = sector.bs_height / -d1.z();
    return {t * d1.x(), t * d1.y()};
}

cd module_phase_offset(double phi, double theta, const Vec3 &p_l, double f, const CarrierConfig &carrier)
{
    const double proj = direction_from_angles(phi, theta).dot(p_l);
    return std::polar(1.0, -pi * (carrier.f0 + f) / carrier.f0 * proj);
}

} // namespace amafris
