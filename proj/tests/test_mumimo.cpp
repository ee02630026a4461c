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

#include "amafris/mumimo.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace amafris;
using doctest::Approx;

namespace {

struct Setup {
    CarrierConfig carrier;
    ArrayGeometry geom;
    ModuleLayout layout;
    PemConfiguration pem_cfg;
    Codebook cb;
    std::unique_ptr<NearFieldBank> nf;
    std::unique_ptr<BeamBank> bank;
    ChannelRealization ch;
};

const Setup &setup()
{
    static const Setup s = [] {
        Setup out;
        out.geom.n_p = 8;
        out.layout = ModuleLayout::vertical_stack(3, 8);
        out.pem_cfg = pem(near_field_matrix(out.geom, out.layout, 0, 0, 0.0, out.carrier));
        Rng rng = testgen::stream(70, 0);
        for (int c = 0; c < 3; ++c)
        {
            BeamCodeword cw;
            cw.id = c;
            cw.xi = testgen::complex_matrix(rng, 8, 8).unaryExpr([](cd z) { return z / std::abs(z); });
            out.cb.codewords.push_back(cw);
        }
        out.nf = std::make_unique<NearFieldBank>(out.geom, out.layout, out.carrier, out.pem_cfg,
                                                 std::vector<double>{-1e8, 0.0, 2e8}, true);
        out.bank = std::make_unique<BeamBank>(out.cb, std::vector<int>{0, 1, 2}, *out.nf);
        const SectorGeometry sector;
        const ChannelModel model;
        const ScatterScenario sc = generate_scenario("scenario1", sector, model, rng);
        out.ch = assemble_channel(place_users(4, sector, rng), sc, out.layout, 8, sector, model, out.carrier, rng);
        return out;
    }();
    return s;
}

cd direct(const Setup &s, int k, int l, int c, int nu)
{
    const CVec g = s.ch.vector(k, l, s.nf->subcarriers()[nu]);
    CMat x = s.cb.codewords[c].xi.cwiseProduct(s.nf->profile(l, l, nu));
    return g.dot(Eigen::Map<CVec>(x.data(), x.size()));
}

} // namespace

TEST_CASE("zero forcing diagonalizes with unit peak port power")
{
    for (std::uint64_t i = 0; i < 300; ++i)
    {
        Rng rng = testgen::stream(71, i);
        const int k = testgen::integer(rng, 1, 8);
        const CMat h = testgen::well_conditioned(rng, k);
        const ZfResult z = zf_precoder(h);
        CHECK_FALSE(z.regularized);
        CHECK(z.condition <= 50.0 + 1e-9);
        const CMat hg = h * z.g;
        for (int r = 0; r < k; ++r)
        {
            CHECK(hg(r, r).real() == Approx(z.gain).epsilon(1e-10));
            for (int c = 0; c < k; ++c)
                if (r != c)
                    CHECK(std::abs(hg(r, c)) <= 1e-9 * std::abs(hg(r, r)));
        }
        const RVec rows = z.g.rowwise().squaredNorm();
        CHECK(rows.maxCoeff() <= 1.0 + 1e-12);
        CHECK(std::abs(rows.maxCoeff() - 1.0) <= 1e-12);
    }
}

TEST_CASE("zero forcing fallback and validation")
{
    CMat h(2, 2);
    h << 1.0, 2.0, 2.0, 4.0;
    const ZfResult z = zf_precoder(h);
    CHECK(z.regularized);
    CHECK(z.g.rowwise().norm().maxCoeff() == Approx(1.0));
    CHECK_THROWS(zf_precoder(CMat::Ones(2, 3)));
    CHECK_THROWS(zf_precoder(CMat(0, 0)));
}

TEST_CASE("SINR and rates")
{
    EffectiveChannel e;
    CMat d = CMat::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = cd(0.0, 1.0);
    e.h = {d, d};
    const PrecodedLink none = sinr_rates(e, Precoding::none, 1.0, 0.5);
    CHECK(none.sinr[0][1] == Approx(8.0));
    CHECK(none.rate[1] == Approx(std::log2(3.0)));

    // equal-gain zero forcing gives every stream the same rate
    for (std::uint64_t i = 0; i < 50; ++i)
    {
        Rng rng = testgen::stream(72, i);
        const int k = testgen::integer(rng, 2, 6);
        EffectiveChannel r;
        r.h = {testgen::well_conditioned(rng, k), testgen::well_conditioned(rng, k)};
        const PrecodedLink zf = sinr_rates(r, Precoding::zf, 2.0, 0.1);
        double expect = 0.0;
        for (const auto &h : r.h)
            expect += std::log2(1.0 + std::pow(zf_precoder(h).gain, 2) * 2.0 / 0.1) / 2.0;
        for (int s = 0; s < k; ++s)
            CHECK(zf.rate[s] == Approx(expect).epsilon(1e-9));
        const PrecodedLink plain = sinr_rates(r, Precoding::none, 2.0, 0.1);
        for (int s = 0; s < k; ++s)
        {
            const CMat &h = r.h[0];
            const double intf = h.row(s).squaredNorm() - std::norm(h(s, s));
            CHECK(plain.sinr[s][0] == Approx(std::norm(h(s, s)) * 2.0 / (0.1 + 2.0 * intf)));
        }
    }
    CHECK_THROWS(sinr_rates(EffectiveChannel{}, Precoding::zf, 1.0, 1.0));
}

TEST_CASE("channel estimation noise")
{
    Rng rng = testgen::stream(73, 0);
    EffectiveChannel e;
    e.h = {testgen::complex_matrix(rng, 4, 4)};
    const EffectiveChannel same = estimate_effective_channel(e, std::numeric_limits<double>::infinity(), rng);
    CHECK(same.h[0] == e.h[0]);
    double mse = 0.0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t)
        mse += (estimate_effective_channel(e, 10.0, rng).h[0] - e.h[0]).squaredNorm();
    const double expect = e.h[0].squaredNorm() / 10.0;
    CHECK(mse / trials == Approx(expect).epsilon(0.05));
}

TEST_CASE("scheduling")
{
    for (std::uint64_t i = 0; i < 200; ++i)
    {
        Rng rng = testgen::stream(74, i);
        const int beams = testgen::integer(rng, 1, 12);
        const int modules = testgen::integer(rng, 1, 8);
        const int users = testgen::integer(rng, 1, 30);
        BeamAssignment a;
        for (int k = 0; k < users; ++k)
            a.beam.push_back(testgen::integer(rng, 0, beams - 1));
        const std::set<int> nonempty(a.beam.begin(), a.beam.end());
        const UserGroup g = schedule_group(a, beams, modules, rng);
        CHECK(g.size() == std::min(static_cast<int>(nonempty.size()), modules));
        std::set<int> seen_beams, seen_modules;
        for (int s = 0; s < g.size(); ++s)
        {
            CHECK(a.beam[g.users[s]] == g.beams[s]);
            CHECK(g.modules[s] < modules);
            if (beams <= modules)
                CHECK(g.modules[s] == g.beams[s]);
            seen_beams.insert(g.beams[s]);
            seen_modules.insert(g.modules[s]);
        }
        CHECK(static_cast<int>(seen_beams.size()) == g.size());
        CHECK(static_cast<int>(seen_modules.size()) == g.size());
    }
    Rng rng = testgen::stream(74, 999);
    CHECK_THROWS(schedule_group(BeamAssignment{}, 3, 3, rng));
    BeamAssignment bad;
    bad.beam = {5};
    CHECK_THROWS(schedule_group(bad, 3, 3, rng));
}

TEST_CASE("beam assignment takes the strongest beam")
{
    const BeamAssignment a = assign_from_rsrp({{1.0, 3.0, 2.0}, {4.0, 4.0, 1.0}});
    CHECK(a.beam == std::vector<int>{1, 0});
    CHECK_THROWS(assign_from_rsrp({{}}));
}

TEST_CASE("tabulated responses match the explicit channel")
{
    const Setup &s = setup();
    const DropResponses full(s.ch, *s.bank);
    const DropResponses partial(s.ch, *s.bank, 1);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 3; ++l)
            for (int c = 0; c < 3; ++c)
                for (int nu = 0; nu < 3; ++nu)
                {
                    const cd ref = direct(s, k, l, c, nu);
                    CHECK(std::abs(full.effective(k, l, c, nu) - ref) <= 1e-9 * std::abs(ref));
                    CHECK(std::abs(partial.effective(k, l, c, nu) - ref) <= 1e-9 * std::abs(ref));
                }

    const BeamAssignment a = rsrp_assign(full);
    for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 3; ++c)
            CHECK(a.rsrp[k][c] == Approx(rsrp_direct(s.ch, k, s.cb.codewords[c], *s.nf)).epsilon(1e-9));

    UserGroup g;
    g.users = {3, 1, 0};
    g.beams = {2, 0, 1};
    g.modules = {0, 2, 1};
    const EffectiveChannel fast = effective_channel(g, full);
    const EffectiveChannel slow = effective_channel(g, s.ch, s.cb, {0, 1, 2}, *s.nf, false);
    const EffectiveChannel next = effective_channel(g, s.ch, s.cb, {0, 1, 2}, *s.nf, true);
    CHECK(next.include_next);
    for (int nu = 0; nu < 3; ++nu)
    {
        CHECK((fast.h[nu] - slow.h[nu]).norm() <= 1e-9 * slow.h[nu].norm());
        CHECK((next.h[nu] - slow.h[nu]).norm() > 0.0);
        CHECK((next.h[nu] - slow.h[nu]).norm() < slow.h[nu].norm());
    }
    CHECK_THROWS(BeamBank(s.cb, {}, *s.nf));
    CHECK_THROWS(BeamBank(s.cb, {3}, *s.nf));
}
