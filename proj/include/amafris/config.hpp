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

#include "amafris/channel.hpp"
#include "amafris/sca.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <filesystem>
#include <string>

namespace amafris {

struct PowerConfig {
    double p_rf_dbm = 32.0;
    double noise_figure_db = 5.0;
    double temperature_k = 290.0;
};

// Reference values the link budget is checked against.
struct LinkTargets {
    double thermal_noise_dbm = -77.0;
    double receive_noise_dbm = -72.0;
    double pathloss_max_db = 112.7;
    double eirp_dbm = 40.7;
    double received_dbm = -72.0;
    double snr_db = 0.0;
};

struct SystemConfig {
    CarrierConfig carrier;
    ArrayGeometry array;
    SectorGeometry sector;
    int modules = 8;
    double module_gap_units = 1.0;
    PowerConfig power;
    LinkTargets targets;
    ChannelModel channel;
    FlatTopOptions beams;

    ModuleLayout layout() const;
    double noise_watt() const; // k T W F
    double p_rf_watt() const;
    void validate() const;
};

enum class PrecoderMode { zf, none, both };

PrecoderMode parse_precoder(const std::string &s);
std::string to_string(PrecoderMode m);

struct ExperimentConfig {
    SystemConfig system;
    std::string scenario = "scenario1"; // los, scenario1, scenario2, file
    std::string scenario_file;
    int drops = 100;
    int slots_per_drop = 100;
    int users = 64;
    std::uint64_t seed = 1;
    PrecoderMode precoder = PrecoderMode::both;
    bool include_next = false;
    double pilot_snr_db = std::numeric_limits<double>::infinity();
    double map_resolution = 2.0;
    int map_subcarriers = 0; // 0 keeps the carrier grid
    std::string codebook_cache;

    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig &cfg);
// Accepts a bare config or a run manifest carrying one under "config".
ExperimentConfig experiment_from_json(const nlohmann::json &j);
ExperimentConfig load_experiment(const std::filesystem::path &path);

struct ScenarioFile {
    std::string label;
    std::vector<ScattererCluster> clusters;
};

ScenarioFile scenario_from_json(const nlohmann::json &j, const SectorGeometry &sector);
ScenarioFile load_scenario_file(const std::filesystem::path &path, const SectorGeometry &sector);
nlohmann::json scenario_to_json(const ScatterScenario &sc);

} // namespace amafris
