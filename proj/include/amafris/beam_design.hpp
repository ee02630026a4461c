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

#include "amafris/amaf_ris.hpp"
#include "amafris/remez.hpp"

#include <vector>

namespace amafris {

struct SeparableProfile {
    RVec q;          // marginal, sums to 1
    double eta = 0.0; // kl / (2 H(q))
    double kl = 0.0;
};

SeparableProfile separable_approximation(const RMat &amp_profile);

// Passband edge at half the target half-width (pattern at beta maps to FIR frequency beta/2).
std::vector<RemezBand> default_binary_bands(double half_width, double transition = 0.1);

RVec binary_phase_profile(int n_p, const std::vector<RemezBand> &bands);

CVec ppf(int n_p, double rho, double pi_exp);

// Element pattern on a sin-angle grid: 4 (1 - beta^2), zero outside |beta| < 1.
double element_gain_sin(double beta);

// 1D gain E(beta) |a(beta; f)^H (w .* q)|^2 in linear units.
RVec far_field_pattern(const CVec &w, const RVec &q, const std::vector<double> &beta, double f,
                       const CarrierConfig &carrier, bool include_element = true);

// 2D gain E |vec(A(phi, theta; f))^H (vec(xi) .* vec(u1))|^2, u1 given as n_p x n_p.
double far_field_gain(const CMat &xi, const CMat &u1, double phi, double theta, double f,
                      const CarrierConfig &carrier, bool include_element = true);

std::vector<double> to_db(const RVec &linear, bool normalize_peak = false);

std::vector<double> uniform_grid(double lo, double hi, int points);

struct FlatTopMetrics {
    double level = 0.0;     // min in-band gain (linear)
    double peak = 0.0;      // max in-band gain (linear)
    double ripple_db = 0.0; // peak / level
    double psl_db = 0.0;    // max gain outside band +- transition, relative to level
    double width_3db = 0.0; // contiguous -3 dB main-lobe width around the band centre, sin units
};

FlatTopMetrics measure_flat_top(const CVec &w, const RVec &q, double beta_min, double beta_max,
                                double transition = 0.1, int grid_points = 4001);

struct BeamCodeword {
    int id = 0;
    int level = 0;
    int parent = -1;
    CMat xi;   // n_p x n_p unit phasors
    CVec w_x;  // shaping along x (azimuth)
    CVec w_z;  // shaping along z (elevation)
    double steer_phi = 0.0;
    double steer_theta = 0.0;
};

BeamCodeword compose_codeword(const CVec &w_x, const CVec &w_z, double steer_phi, double steer_theta,
                              const PemConfiguration &pem_cfg, const CarrierConfig &carrier);

struct GroundGrid {
    double x_min = -90.0;
    double x_max = 90.0;
    double y_min = 0.0;
    double y_max = 100.0;
    double resolution = 1.0;

    int nx() const;
    int ny() const;
    Vec2 pixel(int ix, int iy) const;
    static GroundGrid covering(const SectorGeometry &sector, double resolution);
};

struct FootprintMap {
    GroundGrid grid;
    RMat gain_db;                // ny x nx; NaN outside the sector
};

FootprintMap ground_footprint(const BeamCodeword &cw, const CMat &u1, const SectorGeometry &sector,
                              const GroundGrid &grid, const CarrierConfig &carrier, bool distance_loss = false);

} // namespace amafris
