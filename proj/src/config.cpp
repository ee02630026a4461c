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

#include <fstream>
#include <stdexcept>

namespace amafris {

using nlohmann::json;

namespace {

template <class T>
void read(const json &j, const char *key, T &dst)
{
    if (j.contains(key) && !j.at(key).is_null())
        dst = j.at(key).get<T>();
}

void read_deg(const json &j, const char *key, double &dst)
{
    if (j.contains(key))
        dst = deg2rad(j.at(key).get<double>());
}

const json &section(const json &j, const char *key)
{
    static const json empty = json::object();
    if (!j.contains(key))
        return empty;
    if (!j.at(key).is_object())
        throw std::invalid_argument(std::string("Config section '") + key + "' must be an object.");
    return j.at(key);
}

std::string scaling_name(KappaScaling s)
{
    return s == KappaScaling::range_squared ? "range_squared" : "inverse_range_squared";
}

KappaScaling parse_scaling(const std::string &s)
{
    if (s == "range_squared")
        return KappaScaling::range_squared;
    if (s == "inverse_range_squared")
        return KappaScaling::inverse_range_squared;
    throw std::invalid_argument("Unknown kappa scaling '" + s + "'.");
}

std::string gain_name(NlosGain g) { return g == NlosGain::specular ? "specular" : "bistatic"; }

NlosGain parse_gain(const std::string &s)
{
    if (s == "specular")
        return NlosGain::specular;
    if (s == "bistatic")
        return NlosGain::bistatic;
    throw std::invalid_argument("Unknown NLOS gain model '" + s + "'.");
}

} // namespace

ModuleLayout SystemConfig::layout() const { return ModuleLayout::vertical_stack(modules, array.n_p, module_gap_units); }

double SystemConfig::noise_watt() const
{
    return boltzmann * power.temperature_k * carrier.bandwidth * from_db(power.noise_figure_db);
}

double SystemConfig::p_rf_watt() const { return dbm_to_watt(power.p_rf_dbm); }

void SystemConfig::validate() const
{
    carrier.validate();
    array.validate();
    sector.validate();
    if (modules < 1)
        throw std::invalid_argument("At least one module is required.");
    if (module_gap_units < 0.0)
        throw std::invalid_argument("Module gap must be nonnegative.");
    if (!(power.temperature_k > 0.0))
        throw std::invalid_argument("Noise temperature must be positive.");
    if (!(channel.kappa0 > 0.0) || !(channel.kappa_max > 0.0))
        throw std::invalid_argument("Concentration parameters must be positive.");
}

PrecoderMode parse_precoder(const std::string &s)
{
    if (s == "zf")
        return PrecoderMode::zf;
    if (s == "none")
        return PrecoderMode::none;
    if (s == "both")
        return PrecoderMode::both;
    throw std::invalid_argument("Unknown precoder '" + s + "' (expected zf, none or both).");
}

std::string to_string(PrecoderMode m)
{
    switch (m)
    {
    case PrecoderMode::zf:
        return "zf";
    case PrecoderMode::none:
        return "none";
    default:
        return "both";
    }
}

void ExperimentConfig::validate() const
{
    system.validate();
    if (scenario != "los" && scenario != "scenario1" && scenario != "scenario2" && scenario != "file")
        throw std::invalid_argument("Unknown scenario '" + scenario + "'.");
    if (scenario == "file" && scenario_file.empty())
        throw std::invalid_argument("Scenario 'file' needs a scenario file.");
    if (drops < 1 || slots_per_drop < 1 || users < 1)
        throw std::invalid_argument("Drops, slots per drop and users must be positive.");
    if (!(map_resolution > 0.0) || map_subcarriers < 0)
        throw std::invalid_argument("Invalid beam-map settings.");
}

json to_json(const ExperimentConfig &cfg)
{
    const SystemConfig &s = cfg.system;
    const ScaOptions &o = s.beams.sca;
    json j;
    j["carrier"] = {{"f0_hz", s.carrier.f0}, {"bandwidth_hz", s.carrier.bandwidth}, {"n_sub", s.carrier.n_sub}};
    j["array"] = {{"n_p", s.array.n_p}, {"n_a", s.array.n_a}, {"focal_ratio", s.array.focal_ratio}};
    j["sector"] = {{"bs_height_m", s.sector.bs_height},      {"downtilt_deg", rad2deg(s.sector.downtilt)},
                   {"range_min_m", s.sector.range_min},      {"range_max_m", s.sector.range_max},
                   {"az_min_deg", rad2deg(s.sector.az_min)}, {"az_max_deg", rad2deg(s.sector.az_max)}};
    j["modules"] = {{"count", s.modules}, {"gap_units", s.module_gap_units}};
    j["power"] = {{"p_rf_dbm", s.power.p_rf_dbm},
                  {"noise_figure_db", s.power.noise_figure_db},
                  {"temperature_k", s.power.temperature_k}};
    j["targets"] = {{"thermal_noise_dbm", s.targets.thermal_noise_dbm}, {"receive_noise_dbm", s.targets.receive_noise_dbm},
                    {"pathloss_max_db", s.targets.pathloss_max_db},     {"eirp_dbm", s.targets.eirp_dbm},
                    {"received_dbm", s.targets.received_dbm},           {"snr_db", s.targets.snr_db}};
    j["channel"] = {{"kappa0", s.channel.kappa0},
                    {"rho0_m", s.channel.rho0},
                    {"kappa_max", s.channel.kappa_max},
                    {"kappa_scaling", scaling_name(s.channel.scaling)},
                    {"nlos_gain", gain_name(s.channel.nlos_gain)},
                    {"reflection", s.channel.reflection},
                    {"max_retries", s.channel.max_retries},
                    {"max_range_factor", s.channel.max_range_factor}};
    j["beams"] = {{"rho_candidates", s.beams.rho_candidates},
                  {"pi_exp", s.beams.pi_exp},
                  {"binary_transition", s.beams.binary_transition},
                  {"max_ripple_db", s.beams.max_ripple_db},
                  {"max_psl_db", s.beams.max_psl_db},
                  {"sca",
                   {{"max_outer", o.max_outer},
                    {"rel_tol", o.rel_tol},
                    {"penalty_init", o.penalty_init},
                    {"penalty_growth", o.penalty_growth},
                    {"rank_gap_tol", o.rank_gap_tol},
                    {"inner_iterations", o.inner_iterations},
                    {"inner_tol", o.inner_tol},
                    {"admm_step", o.admm_step},
                    {"grid_factor", o.grid_factor},
                    {"stopband", o.stopband},
                    {"transition", o.transition},
                    {"stopband_db", o.stopband_db},
                    {"slack_weight", o.slack_weight},
                    {"stop_grid_factor", o.stop_grid_factor},
                    {"check_grid_doubling", o.check_grid_doubling}}}};
    json e = {{"scenario", cfg.scenario},
              {"scenario_file", cfg.scenario_file},
              {"drops", cfg.drops},
              {"slots_per_drop", cfg.slots_per_drop},
              {"users", cfg.users},
              {"seed", cfg.seed},
              {"precoder", to_string(cfg.precoder)},
              {"include_next", cfg.include_next},
              {"map_resolution_m", cfg.map_resolution},
              {"map_subcarriers", cfg.map_subcarriers},
              {"codebook_cache", cfg.codebook_cache}};
    if (std::isfinite(cfg.pilot_snr_db))
        e["pilot_snr_db"] = cfg.pilot_snr_db;
    else
        e["pilot_snr_db"] = nullptr;
    j["experiment"] = e;
    return j;
}

ExperimentConfig experiment_from_json(const json &root)
{
    const json &j = root.contains("config") && root.at("config").is_object() ? root.at("config") : root;
    ExperimentConfig cfg;
    SystemConfig &s = cfg.system;

    const json &c = section(j, "carrier");
    read(c, "f0_hz", s.carrier.f0);
    read(c, "bandwidth_hz", s.carrier.bandwidth);
    read(c, "n_sub", s.carrier.n_sub);

    const json &a = section(j, "array");
    read(a, "n_p", s.array.n_p);
    read(a, "n_a", s.array.n_a);
    read(a, "focal_ratio", s.array.focal_ratio);

    const json &sec = section(j, "sector");
    read(sec, "bs_height_m", s.sector.bs_height);
    read_deg(sec, "downtilt_deg", s.sector.downtilt);
    read(sec, "range_min_m", s.sector.range_min);
    read(sec, "range_max_m", s.sector.range_max);
    read_deg(sec, "az_min_deg", s.sector.az_min);
    read_deg(sec, "az_max_deg", s.sector.az_max);

    const json &m = section(j, "modules");
    read(m, "count", s.modules);
    read(m, "gap_units", s.module_gap_units);

    const json &p = section(j, "power");
    read(p, "p_rf_dbm", s.power.p_rf_dbm);
    read(p, "noise_figure_db", s.power.noise_figure_db);
    read(p, "temperature_k", s.power.temperature_k);

    const json &t = section(j, "targets");
    read(t, "thermal_noise_dbm", s.targets.thermal_noise_dbm);
    read(t, "receive_noise_dbm", s.targets.receive_noise_dbm);
    read(t, "pathloss_max_db", s.targets.pathloss_max_db);
    read(t, "eirp_dbm", s.targets.eirp_dbm);
    read(t, "received_dbm", s.targets.received_dbm);
    read(t, "snr_db", s.targets.snr_db);

    const json &ch = section(j, "channel");
    read(ch, "kappa0", s.channel.kappa0);
    read(ch, "rho0_m", s.channel.rho0);
    read(ch, "kappa_max", s.channel.kappa_max);
    if (ch.contains("kappa_scaling"))
        s.channel.scaling = parse_scaling(ch.at("kappa_scaling").get<std::string>());
    if (ch.contains("nlos_gain"))
        s.channel.nlos_gain = parse_gain(ch.at("nlos_gain").get<std::string>());
    read(ch, "reflection", s.channel.reflection);
    read(ch, "max_retries", s.channel.max_retries);
    read(ch, "max_range_factor", s.channel.max_range_factor);

    const json &b = section(j, "beams");
    read(b, "rho_candidates", s.beams.rho_candidates);
    read(b, "pi_exp", s.beams.pi_exp);
    read(b, "binary_transition", s.beams.binary_transition);
    read(b, "max_ripple_db", s.beams.max_ripple_db);
    read(b, "max_psl_db", s.beams.max_psl_db);
    const json &o = section(b, "sca");
    ScaOptions &so = s.beams.sca;
    read(o, "max_outer", so.max_outer);
    read(o, "rel_tol", so.rel_tol);
    read(o, "penalty_init", so.penalty_init);
    read(o, "penalty_growth", so.penalty_growth);
    read(o, "rank_gap_tol", so.rank_gap_tol);
    read(o, "inner_iterations", so.inner_iterations);
    read(o, "inner_tol", so.inner_tol);
    read(o, "admm_step", so.admm_step);
    read(o, "grid_factor", so.grid_factor);
    read(o, "stopband", so.stopband);
    read(o, "transition", so.transition);
    read(o, "stopband_db", so.stopband_db);
    read(o, "slack_weight", so.slack_weight);
    read(o, "stop_grid_factor", so.stop_grid_factor);
    read(o, "check_grid_doubling", so.check_grid_doubling);

    const json &e = section(j, "experiment");
    read(e, "scenario", cfg.scenario);
    read(e, "scenario_file", cfg.scenario_file);
    read(e, "drops", cfg.drops);
    read(e, "slots_per_drop", cfg.slots_per_drop);
    read(e, "users", cfg.users);
    read(e, "seed", cfg.seed);
    if (e.contains("precoder"))
        cfg.precoder = parse_precoder(e.at("precoder").get<std::string>());
    read(e, "include_next", cfg.include_next);
    read(e, "pilot_snr_db", cfg.pilot_snr_db);
    read(e, "map_resolution_m", cfg.map_resolution);
    read(e, "map_subcarriers", cfg.map_subcarriers);
    read(e, "codebook_cache", cfg.codebook_cache);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("Cannot read config " + path.string() + ".");
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (const json::parse_error &err)
    {
        throw std::runtime_error("Malformed config " + path.string() + ": " + err.what());
    }
    return experiment_from_json(j);
}

ScenarioFile scenario_from_json(const json &j, const SectorGeometry &sector)
{
    ScenarioFile sf;
    sf.label = j.value("label", std::string("custom"));
    if (!j.contains("clusters") || !j.at("clusters").is_array())
        throw std::invalid_argument("Scenario file needs a 'clusters' array.");
    int idx = 0;
    for (const auto &c : j.at("clusters"))
    {
        const std::string label = c.value("label", "cluster" + std::to_string(++idx));
        double h_min = 0.5, h_max = 2.5;
        if (c.contains("height_m"))
        {
            h_min = c.at("height_m").at(0).get<double>();
            h_max = c.at("height_m").at(1).get<double>();
        }
        const int count = c.at("count").get<int>();
        ScattererCluster cl;
        if (c.contains("ground_range_m"))
            cl = cluster_at(label, c.at("ground_range_m").get<double>(), deg2rad(c.at("ground_az_deg").get<double>()),
                            count, h_min, h_max, sector);
        else
        {
            cl.label = label;
            cl.mean_dir = direction_from_angles(deg2rad(c.at("az_deg").get<double>()), deg2rad(c.at("el_deg").get<double>()));
            cl.count = count;
            cl.h_min = h_min;
            cl.h_max = h_max;
            cl.elevated = h_max > 0.5 * sector.bs_height;
            cl.range = c.value("range_m", 0.0);
        }
        if (c.contains("kappa"))
        {
            cl.kappa = c.at("kappa").get<double>();
            cl.kappa_from_range = false;
        }
        cl.rcs = c.value("rcs_m2", 1.0);
        if (c.contains("elevated"))
            cl.elevated = c.at("elevated").get<bool>();
        sf.clusters.push_back(cl);
    }
    return sf;
}

ScenarioFile load_scenario_file(const std::filesystem::path &path, const SectorGeometry &sector)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("Cannot read scenario file " + path.string() + ".");
    return scenario_from_json(json::parse(in), sector);
}

json scenario_to_json(const ScatterScenario &sc)
{
    json j;
    j["label"] = sc.label;
    json cl = json::array();
    for (const auto &c : sc.clusters)
    {
        const auto [phi, theta] = angles_from_direction(c.mean_dir);
        cl.push_back({{"label", c.label},
                      {"az_deg", rad2deg(phi)},
                      {"el_deg", rad2deg(theta)},
                      {"range_m", c.range},
                      {"kappa", c.kappa},
                      {"count", c.count},
                      {"height_m", {c.h_min, c.h_max}},
                      {"rcs_m2", c.rcs},
                      {"elevated", c.elevated}});
    }
    j["clusters"] = cl;
    json sc_json = json::array();
    for (const auto &s : sc.scatterers)
        sc_json.push_back({{"cluster", s.cluster},
                           {"az_deg", rad2deg(s.phi)},
                           {"el_deg", rad2deg(s.theta)},
                           {"position_m", {s.position.x(), s.position.y(), s.position.z()}},
                           {"bs_distance_m", s.bs_distance}});
    j["scatterers"] = sc_json;
    return j;
}

} // namespace amafris
