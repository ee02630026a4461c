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

#include "amafris/beam_design.hpp"

#include <string>
#include <vector>

namespace amafris {

struct ScaOptions {
    int max_outer = 200;
    double rel_tol = 1e-6;
    double penalty_init = 0.1; // times the initial min gain
    double penalty_growth = 1.5;
    double rank_gap_tol = 1e-3;

    int inner_iterations = 600;
    double inner_tol = 1e-7;
    double admm_step = 1.0;

    int grid_factor = 4; // in-band points per element, plus endpoints

    // Optional sidelobe ceiling: gain outside band +- transition <= level * eps, softened by a slack.
    bool stopband = true;
    double transition = 0.1;
    double stopband_db = -18.0;
    double slack_weight = 100.0;
    int stop_grid_factor = 8;

    bool check_grid_doubling = true;
};

struct ScaState {
    CMat w_mat;
    double alpha = 0.0;
    double penalty = 0.0;
    CVec e_max;
    std::vector<CMat> a_beta;
};

struct ScaResult {
    CVec w;
    double min_gain_initial = 0.0;
    double min_gain = 0.0;
    double rank_gap = 1.0;
    int outer_iterations = 0;
    bool converged = false;
    bool fallback = false;
    double grid_doubling_delta_db = 0.0;
    std::vector<double> accepted_min_gain; // min gain of each accepted iterate
    std::string diagnostic;
};

// Constraint matrix E(beta) (a(beta) .* q)(a(beta) .* q)^H.
CMat gain_matrix(const RVec &q, double beta);

double min_gain_on_grid(const CVec &w, const RVec &q, const std::vector<double> &grid);

std::vector<double> sca_grid(double beta_min, double beta_max, int n_p, int grid_factor);

ScaResult sca_flat_top(const RVec &q, double beta_min, double beta_max, const CVec &w_ini,
                       const ScaOptions &opts = {});

struct FlatTopOptions {
    std::vector<double> rho_candidates{0.5, 1.0, 1.5, 2.0};
    double pi_exp = 1.0;
    double binary_transition = 0.1;
    ScaOptions sca;
    double max_ripple_db = 2.0;
    double max_psl_db = -15.0;
};

struct PhaseDesign {
    double beta_min = 0.0;
    double beta_max = 0.0;
    RVec w_binary;
    CVec w_ppf;
    CVec w_ini;
    CVec w_opt;
    double rho = 0.0;
    double pi_exp = 1.0;
    FlatTopMetrics initial;
    FlatTopMetrics optimized;
    ScaResult sca;
    bool meets_target = false;
};

// Flat-top over [-half_width, half_width]: binary profile, PPF multi-start, SCA refinement.
PhaseDesign design_flat_top(const RVec &q, double half_width, const FlatTopOptions &opts = {});

} // namespace amafris
