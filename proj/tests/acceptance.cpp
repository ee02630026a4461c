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

// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.

#include "amafris/harness.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

using namespace amafris;
namespace fs = std::filesystem;

namespace {

constexpr double eta_target = 0.007, eta_tol = 0.002, eta_max = 0.018;
constexpr double budget_tol_db = 0.5;
constexpr double zf_offdiag_tol = 1e-9, zf_binding_tol = 1e-12, zf_max_cond = 100.0;
constexpr double los_rel_tol = 0.05;
constexpr double contrast_min = 2.0, none_gain_max = 0.25, zf_gain_min = 0.8, zf_spread_max = 1.5;
constexpr double ripple_max_db = 2.0, psl_max_db = -15.0;
constexpr double vmf_se_tol = 3.0;
constexpr double footprint_min = 0.9;
constexpr double contrast_power_dbm = 42.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4)
{
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

const fs::path work_dir = AMAFRIS_WORK_DIR;

const Simulator &simulator()
{
    static const Simulator sim(SystemConfig{}, (work_dir / "codebook.json").string(), &std::cerr);
    return sim;
}

// 1
Outcome separability()
{
    const auto t0 = Clock::now();
    const CarrierConfig carrier;
    double eta02 = 0.0, worst = 0.0;
    std::string table;
    for (double fd : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6})
    {
        ArrayGeometry g;
        g.focal_ratio = fd;
        const PemConfiguration p = pem(near_field_matrix(g, ModuleLayout::vertical_stack(1, g.n_p), 0, 0, 0.0, carrier));
        const double eta = separable_approximation(p.amp_profile).eta;
        if (fd == 0.2)
            eta02 = eta;
        worst = std::max(worst, eta);
        table += " " + fmt(fd, 2) + ":" + fmt(eta, 3);
    }
    const double t = seconds_since(t0);
    return {std::abs(eta02 - eta_target) <= eta_tol && worst <= eta_max && t < 10.0,
            "eta(0.2)=" + fmt(eta02) + " max=" + fmt(worst) + " [" + table + " ] " + fmt(t, 3) + " s"};
}

// 2
Outcome budget()
{
    const auto t0 = Clock::now();
    const LinkBudget lb = link_budget(SystemConfig{}, budget_tol_db);
    const double t = seconds_since(t0);
    std::string d;
    for (const auto &r : lb.rows)
        d += r.name + "=" + fmt(r.value, 5) + (r.ok ? " " : "(!) ");
    return {lb.all_ok() && t < 1.0, d + fmt(t, 3) + " s"};
}

// 3
Outcome zero_forcing()
{
    const auto t0 = Clock::now();
    Rng rng = make_rng(2024, 3, 0);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 8);
    double worst_off = 0.0, worst_port = 0.0, worst_bind = 0.0;
    int cases = 0;
    while (cases < 1000)
    {
        const int k = size(rng);
        CMat h(k, k);
        for (int c = 0; c < k; ++c)
            for (int r = 0; r < k; ++r)
                h(r, c) = cd(n(rng), n(rng));
        const RVec sv = Eigen::JacobiSVD<CMat>(h).singularValues();
        if (sv[k - 1] <= 0.0 || sv[0] / sv[k - 1] > zf_max_cond)
            continue;
        ++cases;
        const ZfResult z = zf_precoder(h);
        const CMat hg = h * z.g;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j)
                    worst_off = std::max(worst_off, std::abs(hg(i, j)) / std::abs(hg(i, i)));
        const RVec port = z.g.rowwise().squaredNorm();
        worst_port = std::max(worst_port, port.maxCoeff());
        worst_bind = std::max(worst_bind, std::abs(port.maxCoeff() - 1.0));
    }
    const double t = seconds_since(t0);
    return {worst_off <= zf_offdiag_tol && worst_port <= 1.0 + zf_binding_tol && worst_bind <= zf_binding_tol && t < 5.0,
            "max offdiag/diag=" + fmt(worst_off, 3) + " max port power=" + fmt(worst_port, 17) +
                " binding gap=" + fmt(worst_bind, 3) + " " + fmt(t, 3) + " s"};
}

// 4
Outcome los_control()
{
    const Simulator &sim = simulator();
    ExperimentConfig cfg;
    cfg.scenario = "los";
    cfg.drops = 20;
    const auto t0 = Clock::now();
    const MetricStore ms = run_monte_carlo(cfg, sim);
    const double t = seconds_since(t0);
    bool ok = sim.system().carrier.n_sub == 64 && t < 300.0;
    double worst = 0.0;
    std::string d;
    for (int c = 0; c < ms.beams; ++c)
    {
        if (ms.primary().rates_zf[c].empty())
            continue;
        const double zf = ms.primary().beam_mean_zf(c), none = ms.primary().beam_mean_none(c);
        const double rel = std::abs(none - zf) / zf;
        worst = std::max(worst, rel);
        ok = ok && rel <= los_rel_tol;
        d += ms.beam_labels[c] + ":" + fmt(none, 3) + "/" + fmt(zf, 3) + " ";
    }
    return {ok, "none/zf per beam " + d + "worst rel diff=" + fmt(worst, 3) + " " + fmt(t, 4) + " s"};
}

// 5
Outcome multipath_contrast()
{
    const Simulator &sim = simulator();
    bool ok = true;
    std::string d;
    double total = 0.0;
    for (const char *scenario : {"scenario1", "scenario2"})
    {
        ExperimentConfig cfg;
        cfg.scenario = scenario;
        cfg.drops = 100;
        MonteCarloOptions opts;
        opts.extra_p_rf_dbm = {contrast_power_dbm};
        const auto t0 = Clock::now();
        const MetricStore ms = run_monte_carlo(cfg, sim, opts);
        total += seconds_since(t0);
        const PowerMetrics &lo = ms.power[0], &hi = ms.power[1];
        const double zf = lo.overall_mean_zf(), none = lo.overall_mean_none();
        const double none_gain = (hi.overall_mean_none() - none) / none;
        const double zf_gain = hi.overall_mean_zf() - zf;
        double bmin = 1e300, bmax = -1e300;
        for (int c = 0; c < ms.beams; ++c)
            if (!lo.rates_zf[c].empty())
            {
                bmin = std::min(bmin, lo.beam_mean_zf(c));
                bmax = std::max(bmax, lo.beam_mean_zf(c));
            }
        const double spread = bmax - bmin;
        const bool a = zf - none >= contrast_min;
        const bool b = none_gain < none_gain_max && zf_gain >= zf_gain_min;
        const bool c = spread <= zf_spread_max;
        ok = ok && a && b && c;
        d += std::string(scenario) + ": zf=" + fmt(zf) + " none=" + fmt(none) + " (a)" + (a ? "ok" : "NO") +
             " none gain=" + fmt(100.0 * none_gain, 3) + "% zf gain=" + fmt(zf_gain) + " (b)" + (b ? "ok" : "NO") +
             " spread=" + fmt(spread) + " (c)" + (c ? "ok" : "NO") + "; ";
    }
    ok = ok && total < 1800.0;
    return {ok, d + fmt(total, 4) + " s"};
}

// 6
Outcome flat_top()
{
    const SystemConfig sys;
    const RVec q = separable_approximation(simulator().pem().amp_profile).q;
    std::vector<double> widths;
    for (const auto &b : default_hierarchy(sys.sector).beams)
        for (double hw : {b.half_width_x, b.half_width_z})
            if (std::find(widths.begin(), widths.end(), hw) == widths.end())
                widths.push_back(hw);
    std::sort(widths.begin(), widths.end());
    bool ok = widths.size() >= 2;
    std::string d;
    for (double hw : widths)
    {
        const auto t0 = Clock::now();
        const PhaseDesign p = design_flat_top(q, hw, sys.beams);
        const double t = seconds_since(t0);
        const bool good = p.optimized.ripple_db <= ripple_max_db && p.optimized.psl_db <= psl_max_db &&
                          p.optimized.level > p.initial.level && t < 300.0;
        ok = ok && good;
        d += "hw=" + fmt(hw) + ": ripple=" + fmt(p.optimized.ripple_db, 3) + " dB psl=" + fmt(p.optimized.psl_db, 3) +
             " dB level " + fmt(to_db(p.initial.level), 3) + "->" + fmt(to_db(p.optimized.level), 3) + " dB " +
             fmt(t, 3) + " s; ";
    }
    return {ok, d};
}

// 7
Outcome vmf()
{
    const auto t0 = Clock::now();
    bool ok = true;
    std::string d;
    const int n = 100000;
    Rng rng = make_rng(2024, 7, 0);
    for (double kappa : {10.0, 100.0, 1000.0})
    {
        const Vec3 mu = Vec3(0.3, 0.5, -0.2).normalized();
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const double t = sample_vmf(mu, kappa, rng).dot(mu);
            s += t;
            s2 += t * t;
        }
        const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
        const double z = (mean - vmf_mean_resultant(kappa)) / se;
        ok = ok && std::abs(z) <= vmf_se_tol;
        d += "k=" + fmt(kappa) + " z=" + fmt(z, 3) + " ";
    }
    long long front = 0, total = 0;
    for (double kappa : {0.5, 10.0, 100.0})
        for (int i = 0; i < n / 3; ++i)
        {
            const Vec3 mu = Vec3(1.0, 0.02, 0.1).normalized();
            front += sample_vmf_front(mu, kappa, rng).y() > 0.0 ? 1 : 0;
            ++total;
        }
    const double t = seconds_since(t0);
    ok = ok && front == total && t < 10.0;
    return {ok, d + "front " + std::to_string(front) + "/" + std::to_string(total) + " " + fmt(t, 3) + " s"};
}

// 8
Outcome beam_map()
{
    const Simulator &sim = simulator();
    const ExperimentConfig cfg;
    const auto t0 = Clock::now();
    const std::vector<int> leaves = sim.codebook().leaf_indices();
    Rng rng_los = make_rng(cfg.seed, 0, 10);
    const SelectionMap los =
        beam_selection_map(sim, leaves, ScatterScenario{"los", {}, {}}, cfg.map_resolution, cfg.map_subcarriers, rng_los);
    const RegionStats rs = count_regions(los);
    const double agree = footprint_agreement(los, sim.codebook(), cfg.system.sector);
    Rng rng_sc = make_rng(cfg.seed, 0, 12);
    const ScatterScenario sc = generate_scenario("scenario2", cfg.system.sector, cfg.system.channel, rng_sc);
    Rng rng_ph = make_rng(cfg.seed, 0, 13);
    const SelectionMap s2 = beam_selection_map(sim, leaves, sc, cfg.map_resolution, cfg.map_subcarriers, rng_ph);
    const long long changed = map_difference(los, s2);
    const double t = seconds_since(t0);
    bool ok = rs.total == static_cast<int>(leaves.size()) && agree >= footprint_min && changed > 0 && t < 120.0;
    std::string per;
    for (int r : rs.per_label)
    {
        ok = ok && r == 1;
        per += std::to_string(r);
    }
    return {ok, "regions=" + std::to_string(rs.total) + " per leaf=" + per + " footprint agreement=" + fmt(agree, 3) +
                    " scenario2 pixels changed=" + std::to_string(changed) + " " + fmt(t, 3) + " s"};
}

// 9
std::string sha256_file(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

std::map<std::string, std::string> digest_tree(const fs::path &dir)
{
    std::map<std::string, std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            out[fs::relative(e.path(), dir).string()] = sha256_file(e.path());
    return out;
}

std::string quote(const std::string &s) { return "'" + s + "'"; }

Outcome determinism()
{
    const auto t0 = Clock::now();
    const fs::path root = work_dir / "determinism";
    fs::remove_all(root);
    const std::string cli = AMAFRIS_CLI;
    const std::string shared = quote((work_dir / "codebook.json").string());
    struct Cmd {
        std::string name;
        std::string args;
        bool own_codebook;
    };
    const std::vector<Cmd> cmds = {
        {"design-beams", "design-beams --seed 11", true},
        {"link-budget", "link-budget --seed 11", false},
        {"beam-map", "beam-map --seed 11 --scenario scenario2", false},
        {"run", "run --seed 11 --scenario scenario1 --drops 3 --slots 20 --extra-p-rf-dbm 42", false},
        {"scenario-dump", "scenario-dump --seed 11 --scenario scenario2 --drop 4 --channel-tensor --users 4", false},
    };
    bool ok = true;
    std::string d;
    for (const auto &c : cmds)
    {
        std::map<std::string, std::string> digests[2];
        bool ran = true;
        for (int rep = 0; rep < 2; ++rep)
        {
            // identical command line both times; the directory is wiped in between
            const fs::path out = root / c.name;
            fs::remove_all(out);
            const std::string cb = c.own_codebook ? quote((out / "codebook.json").string()) : shared;
            const std::string line = quote(cli) + " " + c.args + " --out " + quote(out.string()) + " --codebook " + cb +
                                     " > " + quote((root / (c.name + "_" + std::to_string(rep) + ".log")).string()) +
                                     " 2>&1";
            fs::create_directories(out);
            ran = ran && std::system(line.c_str()) == 0;
            digests[rep] = digest_tree(out);
        }
        const bool same = ran && !digests[0].empty() && digests[0] == digests[1];
        ok = ok && same;
        d += c.name + (same ? " identical(" + std::to_string(digests[0].size()) + " files) " : " DIFFERS ");
    }
    return {ok, d + fmt(seconds_since(t0), 4) + " s"};
}

} // namespace

int main()
{
    fs::create_directories(work_dir);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"separability", separability},
        {"link budget", budget},
        {"zero-forcing correctness", zero_forcing},
        {"LOS control", los_control},
        {"multipath contrast", multipath_contrast},
        {"flat-top quality", flat_top},
        {"vMF statistics", vmf},
        {"beam-map contrast", beam_map},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << "CRITERION " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
