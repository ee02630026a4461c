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

#include "amafris/config.hpp"
#include "amafris/mumimo.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace amafris {

inline constexpr const char *version_string = "1.0.0";

struct BudgetRow {
    std::string name;
    std::string unit;
    double value = 0.0;
    double target = 0.0;
    bool ok = false;
};

struct LinkBudget {
    std::vector<BudgetRow> rows;
    double tolerance_db = 0.5;

    bool all_ok() const;
    const BudgetRow &row(const std::string &name) const;
};

LinkBudget link_budget(const SystemConfig &sys, double tolerance_db = 0.5);
void write_link_budget_csv(const std::filesystem::path &path, const LinkBudget &lb);

// Owns the PEM, the codebook and the per-subcarrier near-field bank shared by every drop.
class Simulator {
public:
    explicit Simulator(const SystemConfig &sys, const std::string &codebook_cache = {}, std::ostream *log = nullptr,
                       bool with_cross = false);

    const SystemConfig &system() const { return sys_; }
    const PemConfiguration &pem() const { return pem_; }
    const SeparableProfile &separable() const { return sep_; }
    const Codebook &codebook() const { return cb_; }
    const NearFieldBank &near_field() const { return *nf_; }
    const BeamBank &leaf_bank() const { return *leaf_bank_; }
    std::unique_ptr<BeamBank> bank_for(const std::vector<int> &codebook_indices,
                                       const std::vector<double> &subcarriers) const;
    bool codebook_from_cache() const { return from_cache_; }

private:
    SystemConfig sys_;
    PemConfiguration pem_;
    SeparableProfile sep_;
    Codebook cb_;
    bool from_cache_ = false;
    std::unique_ptr<NearFieldBank> nf_;
    std::unique_ptr<BeamBank> leaf_bank_;
};

std::vector<ScattererCluster> scenario_clusters(const ExperimentConfig &cfg, std::string *label = nullptr);

struct UserRecord {
    int drop = 0;
    int user = 0;
    Vec2 position;
    int beam = 0; // leaf index
    double rsrp_dbm = 0.0;
    int scheduled = 0;
    double sum_rate_zf = 0.0;
    double sum_rate_none = 0.0;
};

struct CdfPoint {
    double rate = 0.0;
    double prob = 0.0;
};

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

struct PowerMetrics {
    double p_rf_dbm = 0.0;
    std::vector<std::vector<double>> rates_zf;   // [beam] realized stream rates
    std::vector<std::vector<double>> rates_none; // [beam]

    static double mean(const std::vector<double> &v);
    double beam_mean_zf(int c) const { return mean(rates_zf[c]); }
    double beam_mean_none(int c) const { return mean(rates_none[c]); }
    double overall_mean_zf() const;
    double overall_mean_none() const;
};

struct MetricStore {
    int beams = 0;
    std::vector<std::string> beam_labels;
    std::vector<PowerMetrics> power; // first entry is the configured P_RF
    std::vector<UserRecord> users;
    long long slots = 0;
    long long streams = 0;
    long long regularized = 0;

    const PowerMetrics &primary() const { return power.front(); }
    double mean_group_size() const { return slots ? static_cast<double>(streams) / slots : 0.0; }
};

struct MonteCarloOptions {
    std::vector<double> extra_p_rf_dbm; // evaluated on the same slots
    int threads = 0;                    // 0: hardware concurrency
};

MetricStore run_monte_carlo(const ExperimentConfig &cfg, const Simulator &sim, const MonteCarloOptions &opts = {});

void write_per_beam_csv(const std::filesystem::path &path, const MetricStore &ms);
// One file per beam and precoder: <dir>/<label>_<precoder>.csv with columns rate,cdf.
std::vector<std::filesystem::path> write_cdf_files(const std::filesystem::path &dir, const MetricStore &ms);
void write_selection_counts_csv(const std::filesystem::path &path, const MetricStore &ms);
nlohmann::json run_manifest(const ExperimentConfig &cfg, const std::string &command);
// Writes every metric file plus manifest.json into dir.
void export_metrics(const std::filesystem::path &dir, const MetricStore &ms, const ExperimentConfig &cfg);
void write_users_csv(const std::filesystem::path &path, const MetricStore &ms);

struct SelectionMap {
    GroundGrid grid;
    Eigen::MatrixXi best;    // ny x nx, -1 outside the sector
    RMat rsrp_dbm;           // ny x nx, NaN outside
    std::vector<int> beams;  // codebook indices of the candidates
};

// Wideband RSRP argmax per ground pixel; an empty scenario gives the LOS map.
SelectionMap beam_selection_map(const Simulator &sim, const std::vector<int> &codebook_indices,
                                const ScatterScenario &scenario, double resolution, int subcarriers, Rng &rng);

struct RegionStats {
    int total = 0;
    std::vector<int> per_label; // 4-connected components per candidate
};

RegionStats count_regions(const SelectionMap &map);

// Fraction of in-sector pixels whose selection equals the leaf whose design rectangle holds the pixel AoD.
double footprint_agreement(const SelectionMap &map, const Codebook &cb, const SectorGeometry &sector);

// Fraction of pixels whose best leaf is a child of the best second-level beam.
double hierarchy_consistency(const SelectionMap &leaf_map, const SelectionMap &parent_map, const Codebook &cb);

long long map_difference(const SelectionMap &a, const SelectionMap &b);

void write_selection_map_csv(const std::filesystem::path &path, const SelectionMap &map, const Codebook &cb);


} // namespace amafris
