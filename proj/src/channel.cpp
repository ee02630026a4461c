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

#include "amafris/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace amafris {

namespace {

double uniform01(Rng &rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Orthonormal pair spanning the plane orthogonal to m.
std::pair<Vec3, Vec3> tangent_basis(const Vec3 &m)
{
    const Vec3 helper = std::abs(m.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = m.cross(helper).normalized();
    return {e1, m.cross(e1)};
}

Vec3 bs_position(const SectorGeometry &sector) { return {0.0, 0.0, sector.bs_height}; }

} // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

Vec3 sample_vmf(const Vec3 &mean, double kappa, Rng &rng)
{
    if (!(kappa > 0.0))
        throw std::invalid_argument("sample_vmf: kappa must be positive.");
    if (std::abs(mean.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("sample_vmf: mean direction must be a unit vector.");
    const double u = 1.0 - uniform01(rng); // (0, 1]
    double w = 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * kappa)) / kappa;
    w = std::clamp(w, -1.0, 1.0);
    const double t = 2.0 * pi * uniform01(rng);
    const auto [e1, e2] = tangent_basis(mean);
    const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
    return (w * mean + s * (std::cos(t) * e1 + std::sin(t) * e2)).normalized();
}

Vec3 sample_vmf_front(const Vec3 &mean, double kappa, Rng &rng, int max_tries)
{
    for (int i = 0; i < max_tries; ++i)
    {
        const Vec3 r = sample_vmf(mean, kappa, rng);
        if (r.y() > 0.0)
            return r;
    }
    throw std::runtime_error("sample_vmf_front: no front-hemisphere draw within the retry budget.");
}

Vec3 sample_uniform_sphere(Rng &rng)
{
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double t = 2.0 * pi * uniform01(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(t), s * std::sin(t), z};
}

double vmf_mean_resultant(double kappa)
{
    if (kappa < 1e-4)
        return kappa / 3.0;
    return 1.0 / std::tanh(kappa) - 1.0 / kappa;
}

double kappa_from_range(double rho, double kappa0, double rho0, double kappa_max, KappaScaling scaling)
{
    if (!(rho > 0.0) || !(rho0 > 0.0))
        throw std::invalid_argument("kappa_from_range: ranges must be positive.");
    const double ratio = rho0 / rho;
    const double k = scaling == KappaScaling::inverse_range_squared ? kappa0 * ratio * ratio : kappa0 / (ratio * ratio);
    return std::min(k, kappa_max);
}

double ChannelModel::reference_range(const SectorGeometry &sector) const
{
    if (rho0 > 0.0)
        return rho0;
    const Vec2 g = aod_to_ground(0.0, 0.0, sector);
    return std::hypot(g.norm(), sector.bs_height);
}

ScattererCluster cluster_at(const std::string &label, double ground_range, double azimuth, int count, double h_min,
                            double h_max, const SectorGeometry &sector)
{
    const Vec2 g = ground_point(ground_range, azimuth);
    const Vec3 d = Vec3(g.x(), g.y(), 0.5 * (h_min + h_max)) - bs_position(sector);
    ScattererCluster c;
    c.label = label;
    c.mean_dir = s1_to_s2(d.normalized(), sector);
    c.range = d.norm();
    c.count = count;
    c.h_min = h_min;
    c.h_max = h_max;
    c.elevated = h_max > 0.5 * sector.bs_height;
    return c;
}

int ScatterScenario::expected_count() const
{
    int n = 0;
    for (const auto &c : clusters)
        n += c.count;
    return n;
}

std::vector<ScattererCluster> builtin_clusters(const std::string &id, const SectorGeometry &sector)
{
    struct Site {
        double range, az_deg;
        int count;
    };
    // street furniture, pedestrians, vehicles
    const std::vector<Site> street = {{30.0, -40.0, 2}, {20.0, 5.0, 1},  {80.0, -45.0, 2}, {45.0, 30.0, 3},
                                      {70.0, 15.0, 3},  {90.0, 45.0, 2}, {60.0, -15.0, 2}};
    std::vector<ScattererCluster> out;
    if (id == "los")
        return out;
    if (id != "scenario1" && id != "scenario2")
        throw std::invalid_argument("Unknown built-in scenario '" + id + "'.");
    for (std::size_t i = 0; i < street.size(); ++i)
    {
        int count = street[i].count;
        if (id == "scenario2" && i == 1)
            count += 2; // extra local scattering near the BS
        out.push_back(cluster_at("street" + std::to_string(i + 1), street[i].range, deg2rad(street[i].az_deg), count,
                                 0.5, 2.5, sector));
    }
    if (id == "scenario2")
    {
        const std::vector<Site> elevated = {{95.0, -55.0, 1}, {98.0, -20.0, 1}, {98.0, 20.0, 1}, {95.0, 55.0, 1}};
        for (std::size_t i = 0; i < elevated.size(); ++i)
            out.push_back(cluster_at("elevated" + std::to_string(i + 1), elevated[i].range,
                                     deg2rad(elevated[i].az_deg), elevated[i].count, 18.0, 22.0, sector));
    }
    return out;
}

ScatterScenario generate_scenario(const std::string &label, const std::vector<ScattererCluster> &clusters,
                                  const SectorGeometry &sector, const ChannelModel &model, Rng &rng)
{
    const double el_limit = deg2rad(26.0) + 1e-9;
    ScatterScenario sc;
    sc.label = label;
    sc.clusters = clusters;
    const Vec3 bs = bs_position(sector);
    const double rho0 = model.reference_range(sector);
    for (std::size_t ci = 0; ci < clusters.size(); ++ci)
    {
        auto &c = sc.clusters[ci];
        if (c.count < 0 || c.h_min > c.h_max)
            throw std::invalid_argument("Cluster " + c.label + " has an invalid count or height range.");
        if (std::abs(c.mean_dir.norm() - 1.0) > 1e-9 || c.mean_dir.y() <= 0.0)
            throw std::invalid_argument("Cluster " + c.label + " must point into the RIS front hemisphere.");
        const auto [phi, theta] = angles_from_direction(c.mean_dir);
        if (!c.elevated && (std::abs(theta) > el_limit || phi < sector.az_min - 1e-9 || phi > sector.az_max + 1e-9))
            throw std::invalid_argument("Cluster " + c.label + " mean direction lies outside the scattering window.");
        if (c.kappa_from_range)
        {
            if (!(c.range > 0.0))
                throw std::invalid_argument("Cluster " + c.label + " needs a range for the kappa law.");
            c.kappa = kappa_from_range(c.range, model.kappa0, rho0, model.kappa_max, model.scaling);
        }
        for (int n = 0; n < c.count; ++n)
        {
            bool placed = false;
            for (int attempt = 0; attempt < model.max_retries && !placed; ++attempt)
            {
                const Vec3 dir = sample_vmf_front(c.mean_dir, c.kappa, rng);
                const double hs = c.h_min + (c.h_max - c.h_min) * uniform01(rng);
                const Vec3 d1 = s2_to_s1(dir, sector);
                if (std::abs(d1.z()) < 1e-12)
                    continue;
                const double t = (hs - sector.bs_height) / d1.z();
                if (!(t > 0.0))
                    continue;
                const Vec3 pos = bs + t * d1;
                if (std::hypot(pos.x(), pos.y()) > model.max_range_factor * sector.range_max)
                    continue;
                Scatterer s;
                s.cluster = static_cast<int>(ci);
                s.dir = dir;
                s.position = pos;
                std::tie(s.phi, s.theta) = angles_from_direction(dir);
                s.bs_distance = t;
                s.rcs = c.rcs;
                sc.scatterers.push_back(s);
                placed = true;
            }
            if (!placed)
                throw std::runtime_error("Cluster " + c.label + ": no scatterer ray reached its height band.");
        }
    }
    return sc;
}

ScatterScenario generate_scenario(const std::string &id, const SectorGeometry &sector, const ChannelModel &model,
                                  Rng &rng)
{
    return generate_scenario(id, builtin_clusters(id, sector), sector, model, rng);
}

cd path_coefficient(const Path &p, const Vec3 &module_pos, double f, const CarrierConfig &carrier)
{
    return p.gain * std::polar(1.0, -2.0 * pi * f * p.delay) * module_phase_offset(p.phi, p.theta, module_pos, f, carrier);
}

Path los_path(const Vec2 &user, const SectorGeometry &sector, const CarrierConfig &carrier)
{
    const Aod aod = ground_to_aod(user, sector);
    const double amp = carrier.lambda0() / (4.0 * pi * aod.distance);
    Path p;
    p.phi = aod.phi;
    p.theta = aod.theta;
    p.gain = amp * std::sqrt(patch_gain(aod.phi, aod.theta));
    p.delay = aod.distance / speed_of_light;
    return p;
}

cd nlos_gamma(const Scatterer &s, const Vec2 &user, const ChannelModel &model, const CarrierConfig &carrier,
              double phase)
{
    const double d1 = s.bs_distance;
    const double d2 = (Vec3(user.x(), user.y(), 0.0) - s.position).norm();
    const double lambda0 = carrier.lambda0();
    double mag = 0.0;
    if (model.nlos_gain == NlosGain::specular)
        mag = model.reflection * lambda0 / (4.0 * pi * (d1 + d2));
    else
        mag = lambda0 * std::sqrt(s.rcs) / (std::pow(4.0 * pi, 1.5) * d1 * d2);
    return std::polar(mag, phase);
}

double nlos_delay(const Scatterer &s, const Vec2 &user, const SectorGeometry &sector)
{
    const double d1 = (s.position - bs_position(sector)).norm();
    const double d2 = (Vec3(user.x(), user.y(), 0.0) - s.position).norm();
    return (d1 + d2) / speed_of_light;
}

Path nlos_path(const Scatterer &s, int index, const Vec2 &user, const SectorGeometry &sector,
               const ChannelModel &model, const CarrierConfig &carrier, double phase)
{
    Path p;
    p.phi = s.phi;
    p.theta = s.theta;
    p.gain = std::sqrt(patch_gain(s.phi, s.theta)) * nlos_gamma(s, user, model, carrier, phase);
    p.delay = nlos_delay(s, user, sector);
    p.scatterer = index;
    return p;
}

namespace {

CVec path_vector(const Path &p, const Vec3 &module_pos, double f, int n_p, const CarrierConfig &carrier)
{
    CMat a = planar_steering(n_p, p.phi, p.theta, f, carrier);
    return Eigen::Map<CVec>(a.data(), a.size()) * path_coefficient(p, module_pos, f, carrier);
}

} // namespace

CVec los_channel(const Vec2 &user, const Vec3 &module_pos, double f, int n_p, const SectorGeometry &sector,
                 const CarrierConfig &carrier)
{
    return path_vector(los_path(user, sector, carrier), module_pos, f, n_p, carrier);
}

CVec nlos_channel(const Scatterer &s, const Vec2 &user, const Vec3 &module_pos, double f, int n_p,
                  const SectorGeometry &sector, const ChannelModel &model, const CarrierConfig &carrier,
                  double phase)
{
    return path_vector(nlos_path(s, -1, user, sector, model, carrier, phase), module_pos, f, n_p, carrier);
}

CVec ChannelRealization::vector(int k, int l, double f) const
{
    if (k < 0 || k >= static_cast<int>(users.size()) || l < 0 || l >= layout.size())
        throw std::out_of_range("ChannelRealization: user or module index out of range.");
    CVec g = CVec::Zero(static_cast<Eigen::Index>(n_p) * n_p);
    for (const Path &p : users[k].paths)
        g += path_vector(p, layout.positions[l], f, n_p, carrier);
    return g;
}

ChannelRealization assemble_channel(const std::vector<Vec2> &users, const ScatterScenario &scenario,
                                    const ModuleLayout &layout, int n_p, const SectorGeometry &sector,
                                    const ChannelModel &model, const CarrierConfig &carrier, Rng &rng)
{
    ChannelRealization ch;
    ch.n_p = n_p;
    ch.carrier = carrier;
    ch.layout = layout;
    ch.users.reserve(users.size());
    for (const Vec2 &u : users)
    {
        UserLink link;
        link.position = u;
        link.los = ground_to_aod(u, sector);
        link.los_pathloss = std::pow(carrier.lambda0() / (4.0 * pi * link.los.distance), 2);
        link.los_delay = link.los.distance / speed_of_light;
        link.paths.push_back(los_path(u, sector, carrier));
        for (std::size_t s = 0; s < scenario.scatterers.size(); ++s)
        {
            const double phase = 2.0 * pi * uniform01(rng);
            link.paths.push_back(
                nlos_path(scenario.scatterers[s], static_cast<int>(s), u, sector, model, carrier, phase));
        }
        ch.users.push_back(std::move(link));
    }
    return ch;
}

std::vector<Vec2> place_users(int count, const SectorGeometry &sector, Rng &rng)
{
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    const double r0 = sector.range_min * sector.range_min, r1 = sector.range_max * sector.range_max;
    for (int i = 0; i < count; ++i)
    {
        const double r = std::sqrt(r0 + (r1 - r0) * uniform01(rng));
        const double az = sector.az_min + (sector.az_max - sector.az_min) * uniform01(rng);
        out.push_back(ground_point(r, az));
    }
    return out;
}

void save_channel_tensor(const std::filesystem::path &path, const ChannelRealization &ch,
                         const std::vector<double> &subcarriers)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("Cannot write channel tensor to " + path.string() + ".");
    out.write("AMAFCHT1", 8);
    const std::int32_t dims[4] = {static_cast<std::int32_t>(ch.users.size()), ch.layout.size(),
                                  static_cast<std::int32_t>(subcarriers.size()), ch.n_p * ch.n_p};
    out.write(reinterpret_cast<const char *>(dims), sizeof(dims));
    for (int k = 0; k < dims[0]; ++k)
        for (int l = 0; l < dims[1]; ++l)
            for (double f : subcarriers)
            {
                const CVec g = ch.vector(k, l, f);
                out.write(reinterpret_cast<const char *>(g.data()), static_cast<std::streamsize>(g.size() * sizeof(cd)));
            }
    if (!out)
        throw std::runtime_error("Failed while writing " + path.string() + ".");
}

} // namespace amafris
