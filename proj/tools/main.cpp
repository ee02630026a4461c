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

#include "amafris/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

using namespace amafris;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string scenario;
    std::string scenario_file;
    std::string precoder;
    std::string out = "out";
    std::string codebook;
    int drops = 0;
    int slots = 0;
    int users = 0;
    double p_rf_dbm = std::numeric_limits<double>::quiet_NaN();
};

void add_common(CLI::App *app, Common &c)
{
    app->add_option("--config", c.config, "JSON configuration or run manifest")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "RNG seed");
    app->add_option("--scenario", c.scenario, "Scattering scenario")
        ->check(CLI::IsMember({"los", "scenario1", "scenario2", "file"}));
    app->add_option("--scenario-file", c.scenario_file, "Cluster description for --scenario file")
        ->check(CLI::ExistingFile);
    app->add_option("--precoder", c.precoder, "Precoding mode")->check(CLI::IsMember({"zf", "none", "both"}));
    app->add_option("--out", c.out, "Output directory");
    app->add_option("--codebook", c.codebook, "Codebook cache (default <out>/codebook.json)");
    app->add_option("--drops", c.drops, "Monte Carlo drops")->check(CLI::PositiveNumber);
    app->add_option("--slots", c.slots, "Scheduled slots per drop")->check(CLI::PositiveNumber);
    app->add_option("--users", c.users, "Users per drop")->check(CLI::PositiveNumber);
    app->add_option("--p-rf-dbm", c.p_rf_dbm, "RF power per AMAF port");
}

ExperimentConfig resolve(const Common &c, CLI::App *app)
{
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_experiment(c.config);
    if (app->count("--seed"))
        cfg.seed = c.seed;
    if (!c.scenario.empty())
        cfg.scenario = c.scenario;
    if (!c.scenario_file.empty())
    {
        cfg.scenario_file = c.scenario_file;
        if (c.scenario.empty())
            cfg.scenario = "file";
    }
    if (!c.precoder.empty())
        cfg.precoder = parse_precoder(c.precoder);
    if (c.drops > 0)
        cfg.drops = c.drops;
    if (c.slots > 0)
        cfg.slots_per_drop = c.slots;
    if (c.users > 0)
        cfg.users = c.users;
    if (std::isfinite(c.p_rf_dbm))
        cfg.system.power.p_rf_dbm = c.p_rf_dbm;
    if (!c.codebook.empty())
        cfg.codebook_cache = c.codebook;
    else if (cfg.codebook_cache.empty())
        cfg.codebook_cache = (std::filesystem::path(c.out) / "codebook.json").string();
    cfg.validate();
    return cfg;
}

void write_json(const std::filesystem::path &path, const json &j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("Cannot write " + path.string() + ".");
    out << j.dump(2) << '\n';
}

json metrics_json(const FlatTopMetrics &m)
{
    return {{"level_db", to_db(m.level)}, {"ripple_db", m.ripple_db}, {"psl_db", m.psl_db}, {"width_3db", m.width_3db}};
}

int cmd_design_beams(const ExperimentConfig &cfg, const std::filesystem::path &out)
{
    const Simulator sim(cfg.system, cfg.codebook_cache, &std::cerr);
    const Codebook &cb = sim.codebook();
    save_codebook(out / "codebook.json", cb);
    write_pattern_report(out / "patterns.csv", cb, sim.separable().q);

    json designs = json::array();
    for (const auto &[hw, d] : cb.designs)
        designs.push_back({{"half_width", hw},
                           {"band", {d.beta_min, d.beta_max}},
                           {"rho", d.rho},
                           {"meets_target", d.meets_target},
                           {"initial", metrics_json(d.initial)},
                           {"optimized", metrics_json(d.optimized)},
                           {"sca_outer_iterations", d.sca.outer_iterations},
                           {"sca_fallback", d.sca.fallback}});
    json beams = json::array();
    for (std::size_t i = 0; i < cb.specs.size(); ++i)
    {
        const BeamSpec &s = cb.specs[i];
        beams.push_back({{"id", s.id},
                         {"label", s.label},
                         {"level", s.level},
                         {"parent", s.parent},
                         {"steer_az_deg", rad2deg(s.steer_phi())},
                         {"steer_el_deg", rad2deg(s.steer_theta())},
                         {"half_width_x", s.half_width_x},
                         {"half_width_z", s.half_width_z}});
    }
    json summary = {{"separability_eta", sim.separable().eta},
                    {"pem_sigma1", sim.pem().sigma1},
                    {"pem_sigma2", sim.pem().sigma2},
                    {"designs", designs},
                    {"beams", beams}};
    write_json(out / "design_summary.json", summary);
    write_json(out / "manifest.json", run_manifest(cfg, "design-beams"));
    bool ok = true;
    for (const auto &[hw, d] : cb.designs)
    {
        std::cout << "half width " << hw << ": ripple " << d.optimized.ripple_db << " dB, PSL " << d.optimized.psl_db
                  << " dB" << (d.meets_target ? "" : " (target missed)") << '\n';
        ok = ok && d.meets_target;
    }
    if (!ok)
        std::cerr << "warning: some flat-top designs miss the ripple/sidelobe target\n";
    return 0;
}

int cmd_link_budget(const ExperimentConfig &cfg, const std::filesystem::path &out)
{
    const LinkBudget lb = link_budget(cfg.system);
    write_link_budget_csv(out / "link_budget.csv", lb);
    write_json(out / "manifest.json", run_manifest(cfg, "link-budget"));
    std::cout << std::fixed << std::setprecision(2);
    for (const auto &r : lb.rows)
        std::cout << std::left << std::setw(16) << r.name << std::right << std::setw(9) << r.value << ' '
                  << std::left << std::setw(4) << r.unit << " target " << r.target << (r.ok ? "  ok" : "  MISMATCH")
                  << '\n';
    return 0;
}

int cmd_beam_map(const ExperimentConfig &cfg, const std::filesystem::path &out)
{
    const Simulator sim(cfg.system, cfg.codebook_cache, &std::cerr);
    const Codebook &cb = sim.codebook();
    const std::vector<int> leaves = cb.leaf_indices();
    const std::vector<int> parents = cb.level_indices(cb.leaf_level() - 1);
    const ScatterScenario los{"los", {}, {}};
    Rng rng_los = make_rng(cfg.seed, 0, 10);
    const SelectionMap leaf_los = beam_selection_map(sim, leaves, los, cfg.map_resolution, cfg.map_subcarriers, rng_los);
    Rng rng_par = make_rng(cfg.seed, 0, 11);
    const SelectionMap par_los = beam_selection_map(sim, parents, los, cfg.map_resolution, cfg.map_subcarriers, rng_par);
    write_selection_map_csv(out / "beam_map_los.csv", leaf_los, cb);
    write_selection_map_csv(out / "beam_map_los_parent.csv", par_los, cb);

    const RegionStats rs = count_regions(leaf_los);
    json summary = {{"leaf_beams", leaves.size()},
                    {"los_regions", rs.total},
                    {"los_regions_per_beam", rs.per_label},
                    {"footprint_agreement", footprint_agreement(leaf_los, cb, cfg.system.sector)},
                    {"hierarchy_consistency", hierarchy_consistency(leaf_los, par_los, cb)}};
    if (cfg.scenario != "los")
    {
        std::string label;
        const auto clusters = scenario_clusters(cfg, &label);
        Rng rng_sc = make_rng(cfg.seed, 0, 12);
        const ScatterScenario sc = generate_scenario(label, clusters, cfg.system.sector, cfg.system.channel, rng_sc);
        Rng rng_ph = make_rng(cfg.seed, 0, 13);
        const SelectionMap mp = beam_selection_map(sim, leaves, sc, cfg.map_resolution, cfg.map_subcarriers, rng_ph);
        write_selection_map_csv(out / ("beam_map_" + label + ".csv"), mp, cb);
        summary["scenario"] = label;
        summary["scenario_regions"] = count_regions(mp).total;
        summary["pixels_changed_vs_los"] = map_difference(leaf_los, mp);
    }
    write_json(out / "beam_map_summary.json", summary);
    write_json(out / "manifest.json", run_manifest(cfg, "beam-map"));
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_run(const ExperimentConfig &cfg, const std::filesystem::path &out, const std::vector<double> &extra,
            int threads)
{
    const Simulator sim(cfg.system, cfg.codebook_cache, &std::cerr, cfg.include_next);
    MonteCarloOptions opts;
    opts.extra_p_rf_dbm = extra;
    opts.threads = threads;
    const MetricStore ms = run_monte_carlo(cfg, sim, opts);
    export_metrics(out, ms, cfg);
    std::cout << std::fixed << std::setprecision(3);
    for (const auto &pm : ms.power)
        std::cout << "P_RF " << pm.p_rf_dbm << " dBm: mean rate ZF " << pm.overall_mean_zf() << ", none "
                  << pm.overall_mean_none() << " bit/s/Hz\n";
    if (ms.regularized)
        std::cerr << "warning: " << ms.regularized << " subcarrier precoders used the Tikhonov fallback\n";
    return 0;
}

int cmd_scenario_dump(const ExperimentConfig &cfg, const std::filesystem::path &out, int drop, bool tensor)
{
    std::string label;
    const auto clusters = scenario_clusters(cfg, &label);
    const auto d = static_cast<std::uint64_t>(drop);
    Rng rng_users = make_rng(cfg.seed, d, 1);
    Rng rng_scen = make_rng(cfg.seed, d, 2);
    Rng rng_phase = make_rng(cfg.seed, d, 3);
    const SystemConfig &sys = cfg.system;
    const auto users = place_users(cfg.users, sys.sector, rng_users);
    const ScatterScenario sc = generate_scenario(label, clusters, sys.sector, sys.channel, rng_scen);
    json j = scenario_to_json(sc);
    j["drop"] = drop;
    json u = json::array();
    for (const auto &p : users)
        u.push_back({p.x(), p.y()});
    j["users_m"] = u;
    write_json(out / "scenario.json", j);
    if (tensor)
    {
        const ChannelRealization ch =
            assemble_channel(users, sc, sys.layout(), sys.array.n_p, sys.sector, sys.channel, sys.carrier, rng_phase);
        save_channel_tensor(out / "channel.bin", ch, sys.carrier.subcarriers());
    }
    write_json(out / "manifest.json", run_manifest(cfg, "scenario-dump"));
    std::cout << label << ": " << sc.clusters.size() << " clusters, " << sc.scatterers.size() << " scatterers\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"AMAF-RIS hybrid digital-analog MU-MIMO simulator"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    Common c_design, c_budget, c_map, c_run, c_dump;
    CLI::App *design = app.add_subcommand("design-beams", "Design the flat-top codebook and pattern reports");
    CLI::App *budget = app.add_subcommand("link-budget", "Evaluate the link budget");
    CLI::App *map = app.add_subcommand("beam-map", "Ground beam-selection maps");
    CLI::App *run = app.add_subcommand("run", "Monte Carlo rate evaluation");
    CLI::App *dump = app.add_subcommand("scenario-dump", "Write one scatterer/user drop");
    add_common(design, c_design);
    add_common(budget, c_budget);
    add_common(map, c_map);
    add_common(run, c_run);
    add_common(dump, c_dump);
    std::vector<double> extra_power;
    int threads = 0;
    run->add_option("--extra-p-rf-dbm", extra_power, "Additional RF powers evaluated on the same slots");
    run->add_option("--threads", threads, "Worker threads (0: all cores)");
    int drop = 0;
    bool tensor = false;
    dump->add_option("--drop", drop, "Drop index");
    dump->add_flag("--channel-tensor", tensor, "Also write the per-user channel tensor");

    CLI11_PARSE(app, argc, argv);

    try
    {
        auto prepare = [](const Common &c, CLI::App *sub) {
            ExperimentConfig cfg = resolve(c, sub);
            std::filesystem::create_directories(c.out);
            return cfg;
        };
        if (*design)
            return cmd_design_beams(prepare(c_design, design), c_design.out);
        if (*budget)
            return cmd_link_budget(prepare(c_budget, budget), c_budget.out);
        if (*map)
            return cmd_beam_map(prepare(c_map, map), c_map.out);
        if (*run)
            return cmd_run(prepare(c_run, run), c_run.out, extra_power, threads);
        if (*dump)
            return cmd_scenario_dump(prepare(c_dump, dump), c_dump.out, drop, tensor);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
