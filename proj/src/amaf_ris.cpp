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

#include "amafris/amaf_ris.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <algorithm>
#include <stdexcept>

namespace amafris {

namespace {

struct ElementGrid {
    std::vector<Vec3> pos; // metres, S2 frame
};

ElementGrid square_grid(int side, double spacing, const Vec3 &centre)
{
    ElementGrid g;
    g.pos.reserve(static_cast<std::size_t>(side) * side);
    const double half = 0.5 * (side - 1);
    // column-stacked: x index runs fastest
    for (int iz = 0; iz < side; ++iz)
        for (int ix = 0; ix < side; ++ix)
            g.pos.emplace_back(centre.x() + (ix - half) * spacing, centre.y(), centre.z() + (iz - half) * spacing);
    return g;
}

} // namespace

NearFieldMatrix near_field_matrix(const ArrayGeometry &geom, const ModuleLayout &layout, int l, int j, double f,
                                  const CarrierConfig &carrier)
{
    if (l < 0 || j < 0 || l >= layout.size() || j >= layout.size())
        throw std::invalid_argument("near_field_matrix: module index out of range.");
    const double s = geom.spacing(carrier);
    const double lambda = carrier.wavelength(f);
    const Vec3 ris_centre = layout.positions[l] * s;
    const Vec3 amaf_centre = layout.positions[j] * s + Vec3(0.0, geom.focal_length(carrier), 0.0);
    const ElementGrid ris = square_grid(geom.n_p, s, ris_centre);
    const ElementGrid amaf = square_grid(geom.n_a, s, amaf_centre);

    NearFieldMatrix t;
    t.source_module = j;
    t.dest_module = l;
    t.frequency = f;
    t.entries.resize(static_cast<Eigen::Index>(ris.pos.size()), static_cast<Eigen::Index>(amaf.pos.size()));
    for (std::size_t a = 0; a < amaf.pos.size(); ++a)
    {
        for (std::size_t p = 0; p < ris.pos.size(); ++p)
        {
            const Vec3 d = ris.pos[p] - amaf.pos[a];
            const double dist = d.norm();
            if (dist == 0.0)
                throw std::invalid_argument("near_field_matrix: coincident AMAF and RIS elements.");
            // AMAF faces -y, RIS faces +y; both see the link at the same off-boresight angles.
            const double az = std::atan2(d.x(), -d.y());
            const double el = std::asin(d.z() / dist);
            const double g_tx = patch_gain(az, el);
            const double g_rx = patch_gain(az, el);
            const double amp = lambda / (4.0 * pi * dist) * std::sqrt(g_tx * g_rx);
            t.entries(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(a)) =
                std::polar(amp, -2.0 * pi * dist / lambda);
        }
    }
    return t;
}

PemConfiguration pem(const NearFieldMatrix &t0)
{
    const CMat &t = t0.entries;
    Eigen::JacobiSVD<CMat> svd(t, Eigen::ComputeThinV);
    const RVec sv = svd.singularValues();

    PemConfiguration cfg;
    cfg.sigma1 = sv[0];
    cfg.sigma2 = sv.size() > 1 ? sv[1] : 0.0;
    cfg.degenerate = sv.size() > 1 && (cfg.sigma1 - cfg.sigma2) <= 1e-6 * cfg.sigma1;

    CVec v1 = svd.matrixV().col(0);
    // nonnegative real first entry fixes the global phase
    const cd lead = v1[0];
    if (std::abs(lead) > 0.0)
        v1 *= std::conj(lead) / std::abs(lead);
    v1.normalize();
    cfg.feeder = v1;
    cfg.ris_profile0 = t * v1;

    const int n_p = static_cast<int>(std::lround(std::sqrt(static_cast<double>(t.rows()))));
    if (n_p * n_p != t.rows())
        throw std::invalid_argument("pem: RIS dimension is not a perfect square.");
    cfg.conj_phase.resize(n_p, n_p);
    cfg.amp_profile.resize(n_p, n_p);
    for (int iz = 0; iz < n_p; ++iz)
        for (int ix = 0; ix < n_p; ++ix)
        {
            const cd u = cfg.ris_profile0[ix + n_p * iz];
            const cd ph = std::polar(1.0, -std::arg(u));
            cfg.conj_phase(ix, iz) = ph;
            cfg.amp_profile(ix, iz) = (ph * u).real();
        }
    return cfg;
}

CMat ris_profile(const NearFieldMatrix &t_f, const PemConfiguration &pem_cfg)
{
    const int n_p = pem_cfg.n_p();
    CVec u = t_f.entries * pem_cfg.feeder;
    return Eigen::Map<CMat>(u.data(), n_p, n_p);
}

std::vector<NextEntry> next_report(const ArrayGeometry &geom, const ModuleLayout &layout,
                                   const std::vector<double> &f_grid, const CarrierConfig &carrier)
{
    std::vector<NextEntry> report;
    if (layout.size() < 2)
        return report;
    const PemConfiguration cfg = pem(near_field_matrix(geom, layout, 0, 0, 0.0, carrier));
    for (int l = 0; l < layout.size(); ++l)
        for (int j = 0; j < layout.size(); ++j)
        {
            if (l == j)
                continue;
            NextEntry e;
            e.dest = l;
            e.source = j;
            e.worst_db = -std::numeric_limits<double>::infinity();
            for (double f : f_grid)
            {
                const double own = (near_field_matrix(geom, layout, l, l, f, carrier).entries * cfg.feeder).squaredNorm();
                const double leak = (near_field_matrix(geom, layout, l, j, f, carrier).entries * cfg.feeder).squaredNorm();
                e.leakage_db.push_back(to_db(leak / own));
                e.worst_db = std::max(e.worst_db, e.leakage_db.back());
            }
            report.push_back(std::move(e));
        }
    return report;
}

double worst_next_db(const std::vector<NextEntry> &report)
{
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto &e : report)
        worst = std::max(worst, e.worst_db);
    return worst;
}

namespace {

constexpr char cache_magic[8] = {'A', 'M', 'A', 'F', 'T', 'F', 'C', '1'};
constexpr std::uint32_t cache_version = 1;

template <typename T>
void put(std::ofstream &out, const T &v)
{
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream &in)
{
    T v{};
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in)
        throw std::runtime_error("near-field cache: truncated file.");
    return v;
}

} // namespace

void save_near_field_cache(const std::filesystem::path &path, const ArrayGeometry &geom,
                           const CarrierConfig &carrier, const std::vector<NearFieldMatrix> &mats)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("near-field cache: cannot open " + path.string() + " for writing.");
    out.write(cache_magic, sizeof(cache_magic));
    put(out, cache_version);
    put(out, static_cast<std::int32_t>(geom.n_p));
    put(out, static_cast<std::int32_t>(geom.n_a));
    put(out, geom.focal_ratio);
    put(out, carrier.f0);
    put(out, static_cast<std::uint64_t>(mats.size()));
    for (const auto &m : mats)
    {
        put(out, m.frequency);
        put(out, static_cast<std::int32_t>(m.dest_module));
        put(out, static_cast<std::int32_t>(m.source_module));
        put(out, static_cast<std::int64_t>(m.entries.rows()));
        put(out, static_cast<std::int64_t>(m.entries.cols()));
        out.write(reinterpret_cast<const char *>(m.entries.data()),
                  static_cast<std::streamsize>(sizeof(cd) * m.entries.size()));
    }
}

std::vector<NearFieldMatrix> load_near_field_cache(const std::filesystem::path &path, const ArrayGeometry &geom,
                                                   const CarrierConfig &carrier)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("near-field cache: cannot open " + path.string() + ".");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, cache_magic))
        throw std::runtime_error("near-field cache: bad magic.");
    if (get<std::uint32_t>(in) != cache_version)
        throw std::runtime_error("near-field cache: unsupported version.");
    const auto n_p = get<std::int32_t>(in);
    const auto n_a = get<std::int32_t>(in);
    const auto fd = get<double>(in);
    const auto f0 = get<double>(in);
    if (n_p != geom.n_p || n_a != geom.n_a || fd != geom.focal_ratio || f0 != carrier.f0)
        throw std::runtime_error("near-field cache: geometry mismatch.");
    const auto count = get<std::uint64_t>(in);
    std::vector<NearFieldMatrix> mats(count);
    for (auto &m : mats)
    {
        m.frequency = get<double>(in);
        m.dest_module = get<std::int32_t>(in);
        m.source_module = get<std::int32_t>(in);
        const auto rows = get<std::int64_t>(in);
        const auto cols = get<std::int64_t>(in);
        m.entries.resize(rows, cols);
        in.read(reinterpret_cast<char *>(m.entries.data()), static_cast<std::streamsize>(sizeof(cd) * m.entries.size()));
        if (!in)
            throw std::runtime_error("near-field cache: truncated matrix data.");
    }
    return mats;
}

} // namespace amafris
