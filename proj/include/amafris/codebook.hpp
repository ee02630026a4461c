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

#include "amafris/sca.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace amafris {

// Sector extent in (u, v) = (sin phi, sin theta) of the tilted RIS frame.
struct SinBounds {
    double u_min = 0.0;
    double u_max = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
};

SinBounds sector_sin_bounds(const SectorGeometry &sector, int samples = 721);

struct BeamSpec {
    int id = 0;
    int level = 1;
    int parent = -1;
    std::string label;
    double u_min = 0.0, u_max = 0.0; // covered rectangle
    double v_min = 0.0, v_max = 0.0;
    double half_width_x = 0.0; // flat-top half widths in sin units
    double half_width_z = 0.0;

    double steer_phi() const;
    double steer_theta() const;
};

struct HierarchySpec {
    int version = 1;
    std::vector<BeamSpec> beams;

    int leaf_level() const;
    void validate() const;
};

// Two azimuth halves, then near/far, then an azimuth split of each; the two far
// beams next to the sector centre are labelled C7 and C8.
HierarchySpec default_hierarchy(const SectorGeometry &sector);

// Single boresight pencil beam.
HierarchySpec pencil_hierarchy();

struct Codebook {
    int version = 1;
    std::vector<BeamCodeword> codewords;
    std::vector<BeamSpec> specs;                 // parallel to codewords
    std::map<double, PhaseDesign> designs;       // keyed by half width

    int leaf_level() const;
    std::vector<int> level_indices(int level) const;
    std::vector<int> leaf_indices() const;
    std::vector<int> children(int id) const;
    int index_of(int id) const;
};

Codebook build_codebook(const HierarchySpec &spec, const PemConfiguration &pem_cfg, const CarrierConfig &carrier,
                        const FlatTopOptions &opts = {});

void save_codebook(const std::filesystem::path &path, const Codebook &cb);
Codebook load_codebook(const std::filesystem::path &path, const PemConfiguration &pem_cfg,
                       const CarrierConfig &carrier);

// One row per (design, angle): half_width, beta, gain_db (peak-normalized).
void write_pattern_report(const std::filesystem::path &path, const Codebook &cb, const RVec &q, int points = 801);

} // namespace amafris
