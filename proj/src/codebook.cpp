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

#include "amafris/codebook.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace amafris {

using nlohmann::json;

namespace {

void widen(SinBounds &b, const Vec2 &p, const SectorGeometry &sector)
{
    const Aod aod = ground_to_aod(p, sector);
    const double u = std::sin(aod.phi), v = std::sin(aod.theta);
    b.u_min = std::min(b.u_min, u);
    b.u_max = std::max(b.u_max, u);
    b.v_min = std::min(b.v_min, v);
    b.v_max = std::max(b.v_max, v);
}

BeamSpec rect(int id, int level, int parent, std::string label, double u0, double u1, double v0, double v1)
{
    BeamSpec b;
    b.id = id;
    b.level = level;
    b.parent = parent;
    b.label = std::move(label);
    b.u_min = u0;
    b.u_max = u1;
    b.v_min = v0;
    b.v_max = v1;
    return b;
}

json phases(const CVec &w)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i)
        a.push_back(std::arg(w[i]));
    return a;
}

CVec phasors(const json &a)
{
    CVec w(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        w[static_cast<Eigen::Index>(i)] = std::polar(1.0, a[i].get<double>());
    return w;
}

json metrics_json(const FlatTopMetrics &m)
{
    return {{"ripple_db", m.ripple_db}, {"psl_db", m.psl_db}, {"level", m.level}, {"width_3db", m.width_3db}};
}

FlatTopMetrics metrics_from(const json &j)
{
    FlatTopMetrics m;
    m.ripple_db = j.at("ripple_db").get<double>();
    m.psl_db = j.at("psl_db").get<double>();
    m.level = j.at("level").get<double>();
    m.width_3db = j.at("width_3db").get<double>();
    return m;
}

} // namespace

SinBounds sector_sin_bounds(const SectorGeometry &sector, int samples)
{
    sector.validate();
    SinBounds b{1.0, -1.0, 1.0, -1.0};
    const std::vector<double> az = uniform_grid(sector.az_min, sector.az_max, samples);
    const std::vector<double> rg = uniform_grid(sector.range_min, sector.range_max, samples);
    for (double a : az)
    {
        widen(b, ground_point(sector.range_min, a), sector);
        widen(b, ground_point(sector.range_max, a), sector);
    }
    for (double r : rg)
    {
        widen(b, ground_point(r, sector.az_min), sector);
        widen(b, ground_point(r, sector.az_max), sector);
    }
    return b;
}

double BeamSpec::steer_phi() const { return std::asin(0.5 * (u_min + u_max)); }
double BeamSpec::steer_theta() const { return std::asin(0.5 * (v_min + v_max)); }

int HierarchySpec::leaf_level() const
{
    int l = 0;
    for (const auto &b : beams)
        l = std::max(l, b.level);
    return l;
}

void HierarchySpec::validate() const
{
    if (beams.empty())
        throw std::invalid_argument("Hierarchy has no beams.");
    std::set<int> ids;
    for (const auto &b : beams)
        if (!ids.insert(b.id).second)
            throw std::invalid_argument("Hierarchy has duplicate beam id " + std::to_string(b.id) + ".");
    for (const auto &b : beams)
    {
        if (!(b.half_width_x > 0.0 && b.half_width_x < 1.0 && b.half_width_z > 0.0 && b.half_width_z < 1.0))
            throw std::invalid_argument("Beam " + std::to_string(b.id) + " has an invalid flat-top width.");
        if (b.level < 1)
            throw std::invalid_argument("Beam levels start at 1.");
        if (b.level == 1)
        {
            if (b.parent != -1)
                throw std::invalid_argument("Top-level beams have no parent.");
            continue;
        }
        const auto it = std::find_if(beams.begin(), beams.end(), [&](const BeamSpec &p) { return p.id == b.parent; });
        if (it == beams.end() || it->level != b.level - 1)
            throw std::invalid_argument("Beam " + std::to_string(b.id) + " needs a parent one level up.");
    }
}

HierarchySpec default_hierarchy(const SectorGeometry &sector)
{
    const SinBounds s = sector_sin_bounds(sector);
    const double um = 0.5 * (s.u_min + s.u_max);
    const double vm = 0.0; // boresight ground intercept
    const double ul = 0.5 * (s.u_min + um), ur = 0.5 * (um + s.u_max);

    HierarchySpec h;
    auto &b = h.beams;
    b.push_back(rect(0, 1, -1, "L", s.u_min, um, s.v_min, s.v_max));
    b.push_back(rect(1, 1, -1, "R", um, s.u_max, s.v_min, s.v_max));
    b.push_back(rect(2, 2, 0, "LN", s.u_min, um, s.v_min, vm));
    b.push_back(rect(3, 2, 0, "LF", s.u_min, um, vm, s.v_max));
    b.push_back(rect(4, 2, 1, "RN", um, s.u_max, s.v_min, vm));
    b.push_back(rect(5, 2, 1, "RF", um, s.u_max, vm, s.v_max));
    b.push_back(rect(6, 3, 2, "C1", s.u_min, ul, s.v_min, vm));
    b.push_back(rect(7, 3, 2, "C2", ul, um, s.v_min, vm));
    b.push_back(rect(8, 3, 4, "C3", um, ur, s.v_min, vm));
    b.push_back(rect(9, 3, 4, "C4", ur, s.u_max, s.v_min, vm));
    b.push_back(rect(10, 3, 3, "C5", s.u_min, ul, vm, s.v_max));
    b.push_back(rect(11, 3, 5, "C6", ur, s.u_max, vm, s.v_max));
    b.push_back(rect(12, 3, 3, "C7", ul, um, vm, s.v_max));
    b.push_back(rect(13, 3, 5, "C8", um, ur, vm, s.v_max));

    // two flat-top widths shared by all beams
    double narrow = 0.0, wide = 0.0;
    for (const auto &x : b)
    {
        const double hu = 0.5 * (x.u_max - x.u_min), hv = 0.5 * (x.v_max - x.v_min);
        if (x.level == 3)
            narrow = std::max({narrow, hu, hv});
        else
            wide = std::max(wide, hu);
        if (x.level == 1)
            wide = std::max(wide, hv);
    }
    for (auto &x : b)
    {
        x.half_width_x = x.level == 3 ? narrow : wide;
        x.half_width_z = x.level == 1 ? wide : narrow;
    }
    return h;
}

HierarchySpec pencil_hierarchy()
{
    HierarchySpec h;
    BeamSpec b = rect(0, 1, -1, "P", -0.01, 0.01, -0.01, 0.01);
    b.half_width_x = b.half_width_z = 0.01;
    h.beams.push_back(b);
    return h;
}

int Codebook::leaf_level() const
{
    int l = 0;
    for (const auto &c : codewords)
        l = std::max(l, c.level);
    return l;
}

std::vector<int> Codebook::level_indices(int level) const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < codewords.size(); ++i)
        if (codewords[i].level == level)
            out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> Codebook::leaf_indices() const { return level_indices(leaf_level()); }

std::vector<int> Codebook::children(int id) const
{
    std::vector<int> out;
    for (const auto &c : codewords)
        if (c.parent == id)
            out.push_back(c.id);
    return out;
}

int Codebook::index_of(int id) const
{
    for (std::size_t i = 0; i < codewords.size(); ++i)
        if (codewords[i].id == id)
            return static_cast<int>(i);
    throw std::out_of_range("Codebook has no beam with id " + std::to_string(id) + ".");
}

Codebook build_codebook(const HierarchySpec &spec, const PemConfiguration &pem_cfg, const CarrierConfig &carrier,
                        const FlatTopOptions &opts)
{
    spec.validate();
    const RVec q = separable_approximation(pem_cfg.amp_profile).q;
    Codebook cb;
    cb.version = spec.version;
    for (const auto &b : spec.beams)
        for (double hw : {b.half_width_x, b.half_width_z})
            if (!cb.designs.count(hw))
                cb.designs.emplace(hw, design_flat_top(q, hw, opts));
    for (const auto &b : spec.beams)
    {
        BeamCodeword cw = compose_codeword(cb.designs.at(b.half_width_x).w_opt, cb.designs.at(b.half_width_z).w_opt,
                                           b.steer_phi(), b.steer_theta(), pem_cfg, carrier);
        cw.id = b.id;
        cw.level = b.level;
        cw.parent = b.parent;
        cb.codewords.push_back(std::move(cw));
        cb.specs.push_back(b);
    }
    return cb;
}

void save_codebook(const std::filesystem::path &path, const Codebook &cb)
{
    json j;
    j["format"] = "amafris-codebook";
    j["version"] = cb.version;
    j["n_p"] = cb.codewords.empty() ? 0 : cb.codewords.front().xi.rows();
    json designs = json::array();
    for (const auto &[hw, d] : cb.designs)
        designs.push_back({{"half_width", hw},
                           {"rho", d.rho},
                           {"pi_exp", d.pi_exp},
                           {"meets_target", d.meets_target},
                           {"initial", metrics_json(d.initial)},
                           {"optimized", metrics_json(d.optimized)},
                           {"binary", phases(d.w_binary.cast<cd>())},
                           {"initial_phase", phases(d.w_ini)},
                           {"phase", phases(d.w_opt)}});
    j["designs"] = designs;
    json beams = json::array();
    for (std::size_t i = 0; i < cb.codewords.size(); ++i)
    {
        const auto &c = cb.codewords[i];
        const auto &s = cb.specs[i];
        beams.push_back({{"id", c.id},
                         {"level", c.level},
                         {"parent", c.parent},
                         {"label", s.label},
                         {"u_range", {s.u_min, s.u_max}},
                         {"v_range", {s.v_min, s.v_max}},
                         {"half_width", {s.half_width_x, s.half_width_z}},
                         {"steer_deg", {rad2deg(c.steer_phi), rad2deg(c.steer_theta)}},
                         {"phase_x", phases(c.w_x)},
                         {"phase_z", phases(c.w_z)}});
    }
    j["codewords"] = beams;
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("Cannot write codebook to " + path.string() + ".");
    out << j.dump(1) << '\n';
}

Codebook load_codebook(const std::filesystem::path &path, const PemConfiguration &pem_cfg,
                       const CarrierConfig &carrier)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("Cannot read codebook from " + path.string() + ".");
    const json j = json::parse(in);
    if (j.value("format", "") != "amafris-codebook")
        throw std::runtime_error(path.string() + " is not a codebook file.");
    if (j.at("n_p").get<int>() != pem_cfg.n_p())
        throw std::runtime_error("Codebook array size does not match the configuration.");
    Codebook cb;
    cb.version = j.at("version").get<int>();
    for (const auto &d : j.at("designs"))
    {
        PhaseDesign pd;
        const double hw = d.at("half_width").get<double>();
        pd.beta_min = -hw;
        pd.beta_max = hw;
        pd.rho = d.at("rho").get<double>();
        pd.pi_exp = d.at("pi_exp").get<double>();
        pd.meets_target = d.at("meets_target").get<bool>();
        pd.initial = metrics_from(d.at("initial"));
        pd.optimized = metrics_from(d.at("optimized"));
        pd.w_binary = phasors(d.at("binary")).real();
        pd.w_ini = phasors(d.at("initial_phase"));
        pd.w_opt = phasors(d.at("phase"));
        cb.designs.emplace(hw, std::move(pd));
    }
    HierarchySpec spec;
    spec.version = cb.version;
    for (const auto &b : j.at("codewords"))
    {
        BeamSpec s = rect(b.at("id"), b.at("level"), b.at("parent"), b.at("label"), b.at("u_range")[0],
                          b.at("u_range")[1], b.at("v_range")[0], b.at("v_range")[1]);
        s.half_width_x = b.at("half_width")[0];
        s.half_width_z = b.at("half_width")[1];
        spec.beams.push_back(s);
        BeamCodeword cw = compose_codeword(phasors(b.at("phase_x")), phasors(b.at("phase_z")), s.steer_phi(),
                                           s.steer_theta(), pem_cfg, carrier);
        cw.id = s.id;
        cw.level = s.level;
        cw.parent = s.parent;
        cb.codewords.push_back(std::move(cw));
        cb.specs.push_back(s);
    }
    spec.validate();
    return cb;
}

void write_pattern_report(const std::filesystem::path &path, const Codebook &cb, const RVec &q, int points)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("Cannot write pattern report to " + path.string() + ".");
    out << "half_width,beta,gain_db,initial_gain_db\n";
    out.precision(10);
    const std::vector<double> beta = uniform_grid(-0.999, 0.999, points);
    const CarrierConfig carrier;
    for (const auto &[hw, d] : cb.designs)
    {
        const auto g = to_db(far_field_pattern(d.w_opt, q, beta, 0.0, carrier), true);
        const auto g0 = to_db(far_field_pattern(d.w_ini, q, beta, 0.0, carrier), true);
        for (std::size_t i = 0; i < beta.size(); ++i)
            out << hw << ',' << beta[i] << ',' << g[i] << ',' << g0[i] << '\n';
    }
}

} // namespace amafris
