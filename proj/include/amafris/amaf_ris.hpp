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
#include <vector>

namespace amafris {

/// Near-field propagation matrix from the AMAF of module j to the RIS of module l
/// at baseband frequency f. Rows index RIS elements (column-stacked n_p x n_p grid,
/// row index along x), columns index AMAF elements with the same convention.
struct NearFieldMatrix {
    CMat entries;
    int source_module = 0;
    int dest_module = 0;
    double frequency = 0.0;
};

NearFieldMatrix near_field_matrix(const ArrayGeometry &geom, const ModuleLayout &layout, int l, int j, double f,
                                  const CarrierConfig &carrier);

/// Principal eigenmode feeding of one module.
struct PemConfiguration {
    CVec feeder;       // v1, unit norm
    CVec ris_profile0; // u1(0) = T(0) v1
    CMat conj_phase;   // exp(-j angle u1(0)) as n_p x n_p
    RMat amp_profile;  // conj_phase .* U1(0), real and nonnegative
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    bool degenerate = false; // top two singular values within 1e-6 relative

    int n_p() const { return static_cast<int>(amp_profile.rows()); }
};

/// Dominant right singular vector of T(0) and the RIS profile it induces.
/// The feeder phase is fixed so that its first entry is real and nonnegative.
PemConfiguration pem(const NearFieldMatrix &t0);

/// u1(f) = T(f) v1 reshaped to n_p x n_p.
CMat ris_profile(const NearFieldMatrix &t_f, const PemConfiguration &pem_cfg);

struct NextEntry {
    int dest = 0;
    int source = 0;
    std::vector<double> leakage_db; // per frequency
    double worst_db = 0.0;
};

/// Near-end crosstalk ||T_lj v1||^2 / ||T_ll v1||^2 in dB for every ordered pair l != j.
std::vector<NextEntry> next_report(const ArrayGeometry &geom, const ModuleLayout &layout,
                                   const std::vector<double> &f_grid, const CarrierConfig &carrier);

/// Worst-case leakage over a report, -inf for an empty report.
double worst_next_db(const std::vector<NextEntry> &report);

// Binary cache of T(f) matrices. The header carries a format version and the
// geometry, so a cache written for a different module is rejected on load.
void save_near_field_cache(const std::filesystem::path &path, const ArrayGeometry &geom,
                           const CarrierConfig &carrier, const std::vector<NearFieldMatrix> &mats);
std::vector<NearFieldMatrix> load_near_field_cache(const std::filesystem::path &path, const ArrayGeometry &geom,
                                                   const CarrierConfig &carrier);

} // namespace amafris
