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

#include "amafris/config.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace amafris;
using doctest::Approx;
using nlohmann::json;

TEST_CASE("defaults survive a JSON round trip")
{
    ExperimentConfig a;
    a.seed = 77;
    a.precoder = PrecoderMode::zf;
    a.system.sector.downtilt = deg2rad(30.0);
    a.system.channel.nlos_gain = NlosGain::bistatic;
    a.system.beams.rho_candidates = {0.25, 3.0};
    a.system.beams.sca.max_outer = 9;
    a.pilot_snr_db = 15.0;
    const ExperimentConfig b = experiment_from_json(to_json(a));
    CHECK(to_json(b) == to_json(a));
    CHECK(b.system.sector.downtilt == Approx(deg2rad(30.0)));
    CHECK(b.system.beams.rho_candidates == std::vector<double>{0.25, 3.0});
    CHECK(b.precoder == PrecoderMode::zf);

    const ExperimentConfig inf = experiment_from_json(to_json(ExperimentConfig{}));
    CHECK(std::isinf(inf.pilot_snr_db));
    CHECK(to_json(ExperimentConfig{})["experiment"]["pilot_snr_db"].is_null());
}

TEST_CASE("partial documents and manifests")
{
    const ExperimentConfig p = experiment_from_json(json::parse(R"({"experiment": {"drops": 3, "scenario": "los"}})"));
    CHECK(p.drops == 3);
    CHECK(p.scenario == "los");
    CHECK(p.users == 64);
    CHECK(p.system.array.n_p == 40);

    json manifest = {{"tool", "amafris"}, {"config", to_json(p)}};
    CHECK(experiment_from_json(manifest).drops == 3);
}

TEST_CASE("invalid documents are rejected")
{
    CHECK_THROWS(experiment_from_json(json::parse(R"({"experiment": {"scenario": "city"}})")));
    CHECK_THROWS(experiment_from_json(json::parse(R"({"experiment": {"scenario": "file"}})")));
    CHECK_THROWS(experiment_from_json(json::parse(R"({"experiment": {"drops": 0}})")));
    CHECK_THROWS(experiment_from_json(json::parse(R"({"experiment": {"precoder": "mmse"}})")));
    CHECK_THROWS(experiment_from_json(json::parse(R"({"carrier": 5})")));
    CHECK_THROWS(experiment_from_json(json::parse(R"({"modules": {"count": 0}})")));
    CHECK_THROWS(experiment_from_json(json::parse(R"({"channel": {"kappa_scaling": "cubic"}})")));
    CHECK_THROWS(experiment_from_json(json::parse(R"({"channel": {"nlos_gain": "diffuse"}})")));

    const auto dir = std::filesystem::temp_directory_path();
    CHECK_THROWS(load_experiment(dir / "amafris_missing_config.json"));
    const auto bad = dir / "amafris_bad_config.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS(load_experiment(bad));
    std::filesystem::remove(bad);
}

TEST_CASE("precoder names")
{
    for (PrecoderMode m : {PrecoderMode::zf, PrecoderMode::none, PrecoderMode::both})
        CHECK(parse_precoder(to_string(m)) == m);
    CHECK_THROWS(parse_precoder("ZF"));
}

TEST_CASE("derived system quantities")
{
    SystemConfig s;
    CHECK(watt_to_dbm(s.noise_watt()) == Approx(-71.99).epsilon(1e-3));
    CHECK(s.p_rf_watt() == Approx(std::pow(10.0, 0.2) * 1.0).epsilon(1e-12));
    const ModuleLayout l = s.layout();
    CHECK(l.size() == 8);
    CHECK(l.positions[3].z() == Approx(3 * 41.0));
    s.modules = 0;
    CHECK_THROWS(s.validate());
}

TEST_CASE("scenario files")
{
    const SectorGeometry sector;
    const json j = json::parse(R"({
        "label": "plaza",
        "clusters": [
            {"label": "kiosk", "ground_range_m": 40, "ground_az_deg": 10, "count": 2},
            {"az_deg": -20, "el_deg": 5, "count": 1, "kappa": 250, "rcs_m2": 3.0, "height_m": [1, 2]},
            {"az_deg": 10, "el_deg": 30, "count": 1, "kappa": 50, "height_m": [18, 22]}
        ]})");
    const ScenarioFile f = scenario_from_json(j, sector);
    CHECK(f.label == "plaza");
    REQUIRE(f.clusters.size() == 3);
    CHECK(f.clusters[0].kappa_from_range);
    CHECK(f.clusters[0].range > 40.0);
    CHECK(f.clusters[1].label == "cluster2");
    CHECK_FALSE(f.clusters[1].kappa_from_range);
    CHECK(f.clusters[1].kappa == 250.0);
    CHECK(f.clusters[1].rcs == 3.0);
    CHECK(f.clusters[2].elevated);

    Rng rng = testgen::stream(80, 0);
    const ScatterScenario sc = generate_scenario(f.label, f.clusters, sector, ChannelModel{}, rng);
    const json dumped = scenario_to_json(sc);
    CHECK(dumped["scatterers"].size() == 4);
    CHECK(dumped["clusters"][1]["az_deg"].get<double>() == Approx(-20.0));

    CHECK_THROWS(scenario_from_json(json::parse(R"({"clusters": 3})"), sector));
    CHECK_THROWS(scenario_from_json(json::parse(R"({"clusters": [{"az_deg": 0, "el_deg": 0}]})"), sector));
    CHECK_THROWS(load_scenario_file("/nonexistent/amafris_scenario.json", sector));
}
