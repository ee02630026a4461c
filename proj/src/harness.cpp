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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <thread>

namespace amafris {

using nlohmann::json;

bool LinkBudget::all_ok() const
{
    return std::all_of(rows.begin(), rows.end(), [](const BudgetRow &r) { return r.ok; });
}

const BudgetRow &LinkBudget::row(const std::string &name) const
{
    for (const auto &r : rows)
        if (r.name == name)
            return r;
    throw std::out_of_range("No budget row '" + name + "'.");
}

LinkBudget link_budget(const SystemConfig &sys, double tolerance_db)
{
    const double thermal = watt_to_dbm(boltzmann * sys.power.temperature_k * sys.carrier.bandwidth);
    const double receive = thermal + sys.power.noise_figure_db;
    const double d = std::hypot(sys.sector.range_max, sys.sector.bs_height);
    const double pl = 20.0 * std::log10(4.0 * pi * d / sys.carrier.lambda0());
    const double eirp = receive + pl + sys.targets.snr_db;
    const double received = eirp - pl;
    const double snr = received - receive;

    LinkBudget lb;
    lb.tolerance_db = tolerance_db;
    auto add = [&](const char *name, const char *unit, double v, double t) {
        lb.rows.push_back({name, unit, v, t, std::abs(v - t) <= tolerance_db});
    };
    const LinkTargets &t = sys.targets;
    add("thermal_noise", "dBm", thermal, t.thermal_noise_dbm);
    add("receive_noise", "dBm", receive, t.receive_noise_dbm);
    add("pathloss_max", "dB", pl, t.pathloss_max_db);
    add("eirp", "dBm", eirp, t.eirp_dbm);
    add("received_power", "dBm", received, t.received_dbm);
    add("snr_edge", "dB", snr, t.snr_db);
    return lb;
}

void write_link_budget_csv(const std::filesystem::path &path, const LinkBudget &lb)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("Cannot write " + path.string() + ".");
    out << std::setprecision(6) << std::fixed;
    out << "quantity,unit,value,target,ok\n";
    for (const auto &r : lb.rows)
        out << r.name << ',' << r.unit << ',' << r.value << ',' << r.target << ',' << (r.ok ? 1 : 0) << '\n';
}

namespace {

json cache_key(const SystemConfig &sys)
{
    ExperimentConfig e;
    e.system = sys;
    json j = to_json(e);
    json k;
    k["array"] = j["array"];
    k["sector"] = j["sector"];
    k["beams"] = j["beams"];
    k["f0_hz"] = sys.carrier.f0;
    return k;
}

} // namespace

Simulator::Simulator(const SystemConfig &sys, const std::string &codebook_cache, std::ostream *log, bool with_cross)
    : sys_(sys)
{
    sys_.validate();
    const ModuleLayout layout = sys_.layout();
    pem_ = amafris::pem(near_field_matrix(sys_.array, layout, 0, 0, 0.0, sys_.carrier));
    sep_ = separable_approximation(pem_.amp_profile);

    const std::filesystem::path cache(codebook_cache);
    const std::filesystem::path key_path = cache.string() + ".key";
    const json key = cache_key(sys_);
    if (!codebook_cache.empty() && std::filesystem::exists(cache) && std::filesystem::exists(key_path))
    {
        std::ifstream kin(key_path);
        json stored;
        try
        {
            stored = json::parse(kin);
        }
        catch (const json::parse_error &)
        {
            stored = nullptr;
        }
        if (stored == key)
        {
            cb_ = load_codebook(cache, pem_, sys_.carrier);
            from_cache_ = true;
        }
    }
    if (!from_cache_)
    {
        if (log)
            *log << "designing flat-top codebook" << std::endl;
        cb_ = build_codebook(default_hierarchy(sys_.sector), pem_, sys_.carrier, sys_.beams);
        if (!codebook_cache.empty())
        {
            if (cache.has_parent_path())
                std::filesystem::create_directories(cache.parent_path());
            save_codebook(cache, cb_);
            std::ofstream(key_path) << key.dump(2) << '\n';
        }
    }
    nf_ = std::make_unique<NearFieldBank>(sys_.array, layout, sys_.carrier, pem_, sys_.carrier.subcarriers(),
                                          with_cross);
    leaf_bank_ = std::make_unique<BeamBank>(cb_, cb_.leaf_indices(), *nf_);
}

std::unique_ptr<BeamBank> Simulator::bank_for(const std::vector<int> &codebook_indices,
                                              const std::vector<double> &subcarriers) const
{
    if (subcarriers == nf_->subcarriers())
        return std::make_unique<BeamBank>(cb_, codebook_indices, *nf_);
    NearFieldBank nf(sys_.array, sys_.layout(), sys_.carrier, pem_, subcarriers);
    return std::make_unique<BeamBank>(cb_, codebook_indices, nf);
}

std::vector<ScattererCluster> scenario_clusters(const ExperimentConfig &cfg, std::string *label)
{
    if (cfg.scenario == "file")
    {
        ScenarioFile sf = load_scenario_file(cfg.scenario_file, cfg.system.sector);
        if (label)
            *label = sf.label;
        return sf.clusters;
    }
    if (label)
        *label = cfg.scenario;
    return builtin_clusters(cfg.scenario, cfg.system.sector);
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples)
{
    std::sort(samples.begin(), samples.end());
    std::vector<CdfPoint> out;
    out.reserve(samples.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i])
            continue;
        out.push_back({samples[i], static_cast<double>(i + 1) / n});
    }
    return out;
}

double PowerMetrics::mean(const std::vector<double> &v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

namespace {

double pooled_mean(const std::vector<std::vector<double>> &per_beam)
{
    double s = 0.0;
    std::size_t n = 0;
    for (const auto &v : per_beam)
    {
        for (double x : v)
            s += x;
        n += v.size();
    }
    return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

struct DropResult {
    std::vector<PowerMetrics> power;
    std::vector<UserRecord> users;
    long long slots = 0, streams = 0, regularized = 0;
};

DropResult run_drop(int d, const ExperimentConfig &cfg, const Simulator &sim, const std::string &label,
                    const std::vector<ScattererCluster> &clusters, const std::vector<double> &powers_dbm)
{
    const SystemConfig &sys = sim.system();
    const BeamBank &bank = sim.leaf_bank();
    const int nb = bank.size();
    const int k_mod = sys.modules;
    const auto du = static_cast<std::uint64_t>(d);

    Rng rng_users = make_rng(cfg.seed, du, 1);
    Rng rng_scen = make_rng(cfg.seed, du, 2);
    Rng rng_phase = make_rng(cfg.seed, du, 3);
    Rng rng_sched = make_rng(cfg.seed, du, 4);
    Rng rng_est = make_rng(cfg.seed, du, 5);

    const std::vector<Vec2> pos = place_users(cfg.users, sys.sector, rng_users);
    const ScatterScenario sc = generate_scenario(label, clusters, sys.sector, sys.channel, rng_scen);
    const ChannelRealization ch =
        assemble_channel(pos, sc, sys.layout(), sys.array.n_p, sys.sector, sys.channel, sys.carrier, rng_phase);
    const DropResponses resp(ch, bank, k_mod);
    const BeamAssignment asg = rsrp_assign(resp);

    DropResult out;
    out.power.resize(powers_dbm.size());
    for (std::size_t p = 0; p < powers_dbm.size(); ++p)
    {
        out.power[p].p_rf_dbm = powers_dbm[p];
        out.power[p].rates_zf.resize(static_cast<std::size_t>(nb));
        out.power[p].rates_none.resize(static_cast<std::size_t>(nb));
    }
    const double p0 = sys.p_rf_watt();
    const double ns = static_cast<double>(bank.n_sub());
    for (int k = 0; k < cfg.users; ++k)
    {
        UserRecord r;
        r.drop = d;
        r.user = k;
        r.position = pos[static_cast<std::size_t>(k)];
        r.beam = asg.beam[static_cast<std::size_t>(k)];
        r.rsrp_dbm = watt_to_dbm(p0 * asg.rsrp[k][r.beam] / ns);
        out.users.push_back(r);
    }

    std::vector<int> beam_to_codeword(static_cast<std::size_t>(nb));
    for (int c = 0; c < nb; ++c)
        beam_to_codeword[static_cast<std::size_t>(c)] = bank.codebook_index(c);
    const double noise = sys.noise_watt();
    const bool do_zf = cfg.precoder != PrecoderMode::none;
    const bool do_none = cfg.precoder != PrecoderMode::zf;
    const bool estimate = std::isfinite(cfg.pilot_snr_db);

    for (int s = 0; s < cfg.slots_per_drop; ++s)
    {
        const UserGroup g = schedule_group(asg, nb, k_mod, rng_sched);
        const EffectiveChannel h = cfg.include_next
                                       ? effective_channel(g, ch, sim.codebook(), beam_to_codeword, sim.near_field(), true)
                                       : effective_channel(g, resp);
        EffectiveChannel h_est;
        if (estimate && do_zf)
            h_est = estimate_effective_channel(h, cfg.pilot_snr_db, rng_est);
        ++out.slots;
        out.streams += g.size();
        for (std::size_t p = 0; p < powers_dbm.size(); ++p)
        {
            const double pw = dbm_to_watt(powers_dbm[p]);
            PowerMetrics &pm = out.power[p];
            if (do_zf)
            {
                const PrecodedLink zf = sinr_rates(h, Precoding::zf, pw, noise, estimate ? &h_est : nullptr);
                if (p == 0)
                    out.regularized += zf.regularized;
                for (int i = 0; i < g.size(); ++i)
                {
                    pm.rates_zf[g.beams[i]].push_back(zf.rate[i]);
                    if (p == 0)
                        out.users[g.users[i]].sum_rate_zf += zf.rate[i];
                }
            }
            if (do_none)
            {
                const PrecodedLink nz = sinr_rates(h, Precoding::none, pw, noise);
                for (int i = 0; i < g.size(); ++i)
                {
                    pm.rates_none[g.beams[i]].push_back(nz.rate[i]);
                    if (p == 0)
                        out.users[g.users[i]].sum_rate_none += nz.rate[i];
                }
            }
        }
        for (int i = 0; i < g.size(); ++i)
            ++out.users[g.users[i]].scheduled;
    }
    return out;
}

} // namespace

double PowerMetrics::overall_mean_zf() const { return pooled_mean(rates_zf); }
double PowerMetrics::overall_mean_none() const { return pooled_mean(rates_none); }

MetricStore run_monte_carlo(const ExperimentConfig &cfg, const Simulator &sim, const MonteCarloOptions &opts)
{
    cfg.validate();
    std::string label;
    const std::vector<ScattererCluster> clusters = scenario_clusters(cfg, &label);
    std::vector<double> powers{sim.system().power.p_rf_dbm};
    powers.insert(powers.end(), opts.extra_p_rf_dbm.begin(), opts.extra_p_rf_dbm.end());

    std::vector<DropResult> results(static_cast<std::size_t>(cfg.drops));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int d = next++; d < cfg.drops; d = next++)
        {
            try
            {
                results[static_cast<std::size_t>(d)] = run_drop(d, cfg, sim, label, clusters, powers);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, cfg.drops);
    if (threads == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    MetricStore ms;
    const BeamBank &bank = sim.leaf_bank();
    ms.beams = bank.size();
    for (int c = 0; c < ms.beams; ++c)
        ms.beam_labels.push_back(sim.codebook().specs[static_cast<std::size_t>(bank.codebook_index(c))].label);
    ms.power.resize(powers.size());
    for (std::size_t p = 0; p < powers.size(); ++p)
    {
        ms.power[p].p_rf_dbm = powers[p];
        ms.power[p].rates_zf.resize(static_cast<std::size_t>(ms.beams));
        ms.power[p].rates_none.resize(static_cast<std::size_t>(ms.beams));
    }
    for (auto &r : results)
    {
        for (std::size_t p = 0; p < powers.size(); ++p)
            for (int c = 0; c < ms.beams; ++c)
            {
                auto &dz = ms.power[p].rates_zf[c];
                auto &dn = ms.power[p].rates_none[c];
                dz.insert(dz.end(), r.power[p].rates_zf[c].begin(), r.power[p].rates_zf[c].end());
                dn.insert(dn.end(), r.power[p].rates_none[c].begin(), r.power[p].rates_none[c].end());
            }
        ms.users.insert(ms.users.end(), r.users.begin(), r.users.end());
        ms.slots += r.slots;
        ms.streams += r.streams;
        ms.regularized += r.regularized;
    }
    return ms;
}

namespace {

std::ofstream open_out(const std::filesystem::path &path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("Cannot write " + path.string() + ".");
    out << std::setprecision(10);
    return out;
}

} // namespace

void write_per_beam_csv(const std::filesystem::path &path, const MetricStore &ms)
{
    std::ofstream out = open_out(path);
    out << "p_rf_dbm,beam,label,samples,mean_rate_zf,mean_rate_none,zf_gain\n";
    for (const auto &pm : ms.power)
        for (int c = 0; c < ms.beams; ++c)
            out << pm.p_rf_dbm << ',' << c << ',' << ms.beam_labels[c] << ','
                << std::max(pm.rates_zf[c].size(), pm.rates_none[c].size()) << ',' << pm.beam_mean_zf(c) << ','
                << pm.beam_mean_none(c) << ',' << pm.beam_mean_zf(c) - pm.beam_mean_none(c) << '\n';
}

std::vector<std::filesystem::path> write_cdf_files(const std::filesystem::path &dir, const MetricStore &ms)
{
    std::vector<std::filesystem::path> files;
    if (ms.power.empty())
        return files;
    const PowerMetrics &pm = ms.primary();
    for (int c = 0; c < ms.beams; ++c)
        for (const auto &[name, data] : {std::pair{"zf", &pm.rates_zf[c]}, std::pair{"none", &pm.rates_none[c]}})
        {
            const auto path = dir / (ms.beam_labels[c] + "_" + name + ".csv");
            std::ofstream out = open_out(path);
            out << "rate,cdf\n";
            const auto cdf = empirical_cdf(*data);
            // thin long curves to about 500 points, always keeping the last one
            const std::size_t step = std::max<std::size_t>(1, cdf.size() / 500);
            for (std::size_t i = 0; i < cdf.size(); ++i)
                if (i % step == 0 || i + 1 == cdf.size())
                    out << cdf[i].rate << ',' << cdf[i].prob << '\n';
            files.push_back(path);
        }
    return files;
}

void write_selection_counts_csv(const std::filesystem::path &path, const MetricStore &ms)
{
    std::ofstream out = open_out(path);
    out << "beam,label,assigned_users,scheduled_streams\n";
    std::vector<long long> assigned(static_cast<std::size_t>(ms.beams), 0), scheduled(assigned);
    for (const auto &u : ms.users)
    {
        ++assigned[static_cast<std::size_t>(u.beam)];
        scheduled[static_cast<std::size_t>(u.beam)] += u.scheduled;
    }
    for (int c = 0; c < ms.beams; ++c)
        out << c << ',' << ms.beam_labels[c] << ',' << assigned[c] << ',' << scheduled[c] << '\n';
}

json run_manifest(const ExperimentConfig &cfg, const std::string &command)
{
    json m;
    m["tool"] = "amafris";
    m["version"] = version_string;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    m["command"] = command;
    m["seed"] = cfg.seed;
    m["config"] = to_json(cfg);
    return m;
}

void export_metrics(const std::filesystem::path &dir, const MetricStore &ms, const ExperimentConfig &cfg)
{
    write_per_beam_csv(dir / "per_beam.csv", ms);
    write_cdf_files(dir / "cdf", ms);
    write_users_csv(dir / "users.csv", ms);
    write_selection_counts_csv(dir / "selection_counts.csv", ms);
    json summary;
    summary["slots"] = ms.slots;
    summary["streams"] = ms.streams;
    summary["mean_group_size"] = ms.mean_group_size();
    summary["regularized_subcarriers"] = ms.regularized;
    for (const auto &pm : ms.power)
    {
        json p;
        p["p_rf_dbm"] = pm.p_rf_dbm;
        const double z = pm.overall_mean_zf(), n = pm.overall_mean_none();
        p["mean_rate_zf"] = std::isfinite(z) ? json(z) : json(nullptr);
        p["mean_rate_none"] = std::isfinite(n) ? json(n) : json(nullptr);
        summary["power"].push_back(p);
    }
    std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
    std::ofstream(dir / "manifest.json") << run_manifest(cfg, "run").dump(2) << '\n';
}

void write_users_csv(const std::filesystem::path &path, const MetricStore &ms)
{
    std::ofstream out = open_out(path);
    out << "drop,user,x_m,y_m,beam,label,rsrp_dbm,scheduled,mean_rate_zf,mean_rate_none,throughput_zf,"
           "throughput_none\n";
    const double slots_per_drop = ms.slots && !ms.users.empty()
                                      ? static_cast<double>(ms.slots) /
                                            static_cast<double>(ms.users.back().drop + 1)
                                      : 1.0;
    for (const auto &u : ms.users)
    {
        const double n = u.scheduled ? static_cast<double>(u.scheduled) : std::numeric_limits<double>::quiet_NaN();
        out << u.drop << ',' << u.user << ',' << u.position.x() << ',' << u.position.y() << ',' << u.beam << ','
            << ms.beam_labels[u.beam] << ',' << u.rsrp_dbm << ',' << u.scheduled << ',' << u.sum_rate_zf / n << ','
            << u.sum_rate_none / n << ',' << u.sum_rate_zf / slots_per_drop << ','
            << u.sum_rate_none / slots_per_drop << '\n';
    }
}

SelectionMap beam_selection_map(const Simulator &sim, const std::vector<int> &codebook_indices,
                                const ScatterScenario &scenario, double resolution, int subcarriers, Rng &rng)
{
    const SystemConfig &sys = sim.system();
    SelectionMap map;
    map.grid = GroundGrid::covering(sys.sector, resolution);
    map.beams = codebook_indices;
    const int nx = map.grid.nx(), ny = map.grid.ny();
    map.best = Eigen::MatrixXi::Constant(ny, nx, -1);
    map.rsrp_dbm = RMat::Constant(ny, nx, std::numeric_limits<double>::quiet_NaN());

    std::vector<Vec2> pix;
    std::vector<std::pair<int, int>> where;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
        {
            const Vec2 p = map.grid.pixel(ix, iy);
            if (sys.sector.contains(p))
            {
                pix.push_back(p);
                where.emplace_back(iy, ix);
            }
        }
    if (pix.empty())
        return map;

    CarrierConfig carrier = sys.carrier;
    if (subcarriers > 0)
        carrier.n_sub = subcarriers;
    const auto bank = sim.bank_for(codebook_indices, carrier.subcarriers());
    const ChannelRealization ch =
        assemble_channel(pix, scenario, sys.layout(), sys.array.n_p, sys.sector, sys.channel, carrier, rng);
    const DropResponses resp(ch, *bank, 1);
    const BeamAssignment asg = rsrp_assign(resp);
    const double p0 = sys.p_rf_watt();
    for (std::size_t i = 0; i < pix.size(); ++i)
    {
        const int c = asg.beam[i];
        map.best(where[i].first, where[i].second) = c;
        map.rsrp_dbm(where[i].first, where[i].second) = watt_to_dbm(p0 * asg.rsrp[i][c] / bank->n_sub());
    }
    return map;
}

RegionStats count_regions(const SelectionMap &map)
{
    RegionStats st;
    st.per_label.assign(map.beams.size(), 0);
    const int ny = static_cast<int>(map.best.rows()), nx = static_cast<int>(map.best.cols());
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(ny, nx);
    std::queue<std::pair<int, int>> q;
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
        {
            const int lab = map.best(y, x);
            if (lab < 0 || seen(y, x))
                continue;
            ++st.total;
            ++st.per_label[static_cast<std::size_t>(lab)];
            seen(y, x) = 1;
            q.emplace(y, x);
            while (!q.empty())
            {
                const auto [cy, cx] = q.front();
                q.pop();
                const int dy[4] = {1, -1, 0, 0}, dx[4] = {0, 0, 1, -1};
                for (int n = 0; n < 4; ++n)
                {
                    const int yy = cy + dy[n], xx = cx + dx[n];
                    if (yy < 0 || yy >= ny || xx < 0 || xx >= nx || seen(yy, xx) || map.best(yy, xx) != lab)
                        continue;
                    seen(yy, xx) = 1;
                    q.emplace(yy, xx);
                }
            }
        }
    return st;
}

double footprint_agreement(const SelectionMap &map, const Codebook &cb, const SectorGeometry &sector)
{
    long long total = 0, hit = 0;
    for (int y = 0; y < map.best.rows(); ++y)
        for (int x = 0; x < map.best.cols(); ++x)
        {
            const int lab = map.best(y, x);
            if (lab < 0)
                continue;
            const Aod a = ground_to_aod(map.grid.pixel(x, y), sector);
            const double u = std::sin(a.phi), v = std::sin(a.theta);
            int owner = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < map.beams.size(); ++c)
            {
                const BeamSpec &s = cb.specs[static_cast<std::size_t>(map.beams[c])];
                // distance outside the rectangle, zero inside
                const double du = std::max({s.u_min - u, 0.0, u - s.u_max});
                const double dv = std::max({s.v_min - v, 0.0, v - s.v_max});
                const double dist = std::hypot(du, dv);
                if (dist < best_d)
                {
                    best_d = dist;
                    owner = static_cast<int>(c);
                }
            }
            ++total;
            hit += owner == lab ? 1 : 0;
        }
    return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

double hierarchy_consistency(const SelectionMap &leaf_map, const SelectionMap &parent_map, const Codebook &cb)
{
    if (leaf_map.best.rows() != parent_map.best.rows() || leaf_map.best.cols() != parent_map.best.cols())
        throw std::invalid_argument("hierarchy_consistency: maps on different grids.");
    long long total = 0, hit = 0;
    for (int y = 0; y < leaf_map.best.rows(); ++y)
        for (int x = 0; x < leaf_map.best.cols(); ++x)
        {
            const int l = leaf_map.best(y, x), p = parent_map.best(y, x);
            if (l < 0 || p < 0)
                continue;
            const BeamSpec &leaf = cb.specs[static_cast<std::size_t>(leaf_map.beams[l])];
            const BeamSpec &par = cb.specs[static_cast<std::size_t>(parent_map.beams[p])];
            ++total;
            hit += leaf.parent == par.id ? 1 : 0;
        }
    return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

long long map_difference(const SelectionMap &a, const SelectionMap &b)
{
    if (a.best.rows() != b.best.rows() || a.best.cols() != b.best.cols())
        throw std::invalid_argument("map_difference: maps on different grids.");
    long long n = 0;
    for (int y = 0; y < a.best.rows(); ++y)
        for (int x = 0; x < a.best.cols(); ++x)
            if (a.best(y, x) >= 0 && b.best(y, x) >= 0 && a.best(y, x) != b.best(y, x))
                ++n;
    return n;
}

void write_selection_map_csv(const std::filesystem::path &path, const SelectionMap &map, const Codebook &cb)
{
    std::ofstream out = open_out(path);
    out << "x_m,y_m,beam,label,rsrp_dbm\n";
    for (int y = 0; y < map.best.rows(); ++y)
        for (int x = 0; x < map.best.cols(); ++x)
        {
            const int lab = map.best(y, x);
            if (lab < 0)
                continue;
            const Vec2 p = map.grid.pixel(x, y);
            out << p.x() << ',' << p.y() << ',' << lab << ',' << cb.specs[static_cast<std::size_t>(map.beams[lab])].label
                << ',' << map.rsrp_dbm(y, x) << '\n';
        }
}

} // namespace amafris
