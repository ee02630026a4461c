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

#include "amafris/geometry.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace amafris {

using Rng = std::mt19937_64;

// Deterministic sub-stream for (seed, a, b).
Rng make_rng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

Vec3 sample_vmf(const Vec3 &mean, double kappa, Rng &rng);
// Draw restricted to the RIS front hemisphere (y > 0 in the tilted frame).
Vec3 sample_vmf_front(const Vec3 &mean, double kappa, Rng &rng, int max_tries = 100000);
Vec3 sample_uniform_sphere(Rng &rng);

// Mean resultant length coth(kappa) - 1/kappa.
double vmf_mean_resultant(double kappa);

enum class KappaScaling {
    range_squared,         // kappa0 (rho / rho0)^2
    inverse_range_squared, // kappa0 (rho0 / rho)^2
};

double kappa_from_range(double rho, double kappa0, double rho0, double kappa_max,
                        KappaScaling scaling = KappaScaling::inverse_range_squared);

enum class NlosGain {
    specular, // free space over the unfolded path: Gamma lambda0 / (4 pi (d1 + d2))
    bistatic, // radar equation: lambda0 sqrt(rcs) / ((4 pi)^1.5 d1 d2)
};

struct ChannelModel {
    double kappa0 = 390.0;
    double rho0 = 0.0; // 0: BS distance to the boresight ground intercept
    double kappa_max = 4000.0;
    KappaScaling scaling = KappaScaling::range_squared;
    NlosGain nlos_gain = NlosGain::specular;
    double reflection = 1.0;
    int max_retries = 1000;
    double max_range_factor = 1.2; // scatterer ground range limit relative to range_max

    double reference_range(const SectorGeometry &sector) const;
};

struct ScattererCluster {
    std::string label;
    Vec3 mean_dir{0.0, 1.0, 0.0}; // tilted frame
    double kappa = 0.0;           // used when kappa_from_range is false
    bool kappa_from_range = true;
    double range = 0.0;           // BS distance of the cluster centre, for the kappa law
    int count = 0;
    double h_min = 0.5;
    double h_max = 2.5;
    double rcs = 1.0;
    bool elevated = false;
};

// Cluster aimed at a ground point (range, azimuth) at the middle of its height band.
ScattererCluster cluster_at(const std::string &label, double ground_range, double azimuth, int count, double h_min,
                            double h_max, const SectorGeometry &sector);

struct Scatterer {
    int cluster = 0;
    Vec3 dir;      // unit, tilted frame
    Vec3 position; // metres, ground frame with the BS at (0, 0, h)
    double phi = 0.0;
    double theta = 0.0;
    double bs_distance = 0.0;
    double rcs = 1.0;
};

struct ScatterScenario {
    std::string label;
    std::vector<ScattererCluster> clusters;
    std::vector<Scatterer> scatterers;

    int expected_count() const;
};

std::vector<ScattererCluster> builtin_clusters(const std::string &id, const SectorGeometry &sector);

ScatterScenario generate_scenario(const std::string &label, const std::vector<ScattererCluster> &clusters,
                                  const SectorGeometry &sector, const ChannelModel &model, Rng &rng);
ScatterScenario generate_scenario(const std::string &id, const SectorGeometry &sector, const ChannelModel &model,
                                  Rng &rng);

// One propagation path seen from the RIS: departure angles, complex gain (element pattern
// included), delay.
struct Path {
    double phi = 0.0;
    double theta = 0.0;
    cd gain{0.0, 0.0};
    double delay = 0.0;
    int scatterer = -1; // -1 for the LOS path
};

struct UserLink {
    Vec2 position;
    Aod los;
    double los_pathloss = 0.0; // linear
    double los_delay = 0.0;
    std::vector<Path> paths;   // LOS first
};

struct ChannelRealization {
    int n_p = 0;
    CarrierConfig carrier;
    ModuleLayout layout;
    std::vector<UserLink> users;

    // g_{k,l}(f) as an n_p^2 column-stacked vector.
    CVec vector(int k, int l, double f) const;
};

// Coefficient of one path for module l at frequency f, without the steering vector.
cd path_coefficient(const Path &p, const Vec3 &module_pos, double f, const CarrierConfig &carrier);

CVec los_channel(const Vec2 &user, const Vec3 &module_pos, double f, int n_p, const SectorGeometry &sector,
                 const CarrierConfig &carrier);

cd nlos_gamma(const Scatterer &s, const Vec2 &user, const ChannelModel &model, const CarrierConfig &carrier,
              double phase);
double nlos_delay(const Scatterer &s, const Vec2 &user, const SectorGeometry &sector);

CVec nlos_channel(const Scatterer &s, const Vec2 &user, const Vec3 &module_pos, double f, int n_p,
                  const SectorGeometry &sector, const ChannelModel &model, const CarrierConfig &carrier,
                  double phase);

Path los_path(const Vec2 &user, const SectorGeometry &sector, const CarrierConfig &carrier);
Path nlos_path(const Scatterer &s, int index, const Vec2 &user, const SectorGeometry &sector,
               const ChannelModel &model, const CarrierConfig &carrier, double phase);

// Users share the scatterer set; gamma phases are drawn per (user, scatterer) from rng.
ChannelRealization assemble_channel(const std::vector<Vec2> &users, const ScatterScenario &scenario,
                                    const ModuleLayout &layout, int n_p, const SectorGeometry &sector,
                                    const ChannelModel &model, const CarrierConfig &carrier, Rng &rng);

// Area-uniform users over the annular sector.
std::vector<Vec2> place_users(int count, const SectorGeometry &sector, Rng &rng);

// Raw little-endian dump: magic, users, modules, subcarriers, n_p^2, then complex doubles.
void save_channel_tensor(const std::filesystem::path &path, const ChannelRealization &ch,
                         const std::vector<double> &subcarriers);

} // namespace amafris
