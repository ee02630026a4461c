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
#include "support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace amafris;
using doctest::Approx;

namespace {

bool inside(const BeamSpec &b, double u, double v)
{
    return u >= b.u_min && u <= b.u_max && v >= b.v_min && v <= b.v_max;
}

struct Small {
    CarrierConfig carrier;
    PemConfiguration pem_cfg;
    Codebook cb;
};

const Small &small_codebook()
{
    static const Small s = [] {
        Small out;
        ArrayGeometry g;
        g.n_p = 16;
        out.pem_cfg = pem(near_field_matrix(g, ModuleLayout::vertical_stack(1, 16), 0, 0, 0.0, out.carrier));
        FlatTopOptions o;
        o.rho_candidates = {1.0};
        o.sca.max_outer = 10;
        o.sca.inner_iterations = 150;
        out.cb = build_codebook(default_hierarchy(SectorGeometry{}), out.pem_cfg, out.carrier, o);
        return out;
    }();
    return s;
}

} // namespace

TEST_CASE("sector bounds in sine space")
{
    const SectorGeometry s;
    const SinBounds b = sector_sin_bounds(s);
    CHECK(b.u_min == Approx(-b.u_max).epsilon(1e-9));
    CHECK(b.u_max > 0.8);
    CHECK(b.u_max < 0.9);
    CHECK(b.v_min == Approx(-0.41).epsilon(0.02));
    CHECK(b.v_max == Approx(0.44).epsilon(0.02));
    for (std::uint64_t i = 0; i < 200; ++i)
    {
        Rng rng = testgen::stream(50, i);
        const Aod a = ground_to_aod(testgen::sector_point(rng, s), s);
        CHECK(std::sin(a.phi) >= b.u_min - 1e-9);
        CHECK(std::sin(a.phi) <= b.u_max + 1e-9);
        CHECK(std::sin(a.theta) >= b.v_min - 1e-9);
        CHECK(std::sin(a.theta) <= b.v_max + 1e-9);
    }
}

TEST_CASE("default hierarchy tiles the sector at every level")
{
    const SectorGeometry s;
    const HierarchySpec h = default_hierarchy(s);
    h.validate();
    CHECK(h.beams.size() == 14);
    CHECK(h.leaf_level() == 3);
    for (std::uint64_t i = 0; i < 300; ++i)
    {
        Rng rng = testgen::stream(51, i);
        const Aod a = ground_to_aod(testgen::sector_point(rng, s), s);
        const double u = std::sin(a.phi), v = std::sin(a.theta);
        for (int level = 1; level <= 3; ++level)
        {
            int hits = 0;
            const BeamSpec *leaf = nullptr;
            for (const auto &b : h.beams)
                if (b.level == level && inside(b, u, v))
                {
                    ++hits;
                    leaf = &b;
                }
            CHECK(hits >= 1);
            // a child rectangle lies inside its parent
            if (leaf && leaf->parent >= 0)
                CHECK(inside(h.beams[leaf->parent], u, v));
        }
    }
    for (const auto &b : h.beams)
    {
        CHECK(b.half_width_x >= 0.5 * (b.u_max - b.u_min) - 1e-12);
        CHECK(b.half_width_z >= 0.5 * (b.v_max - b.v_min) - 1e-12);
    }
}

TEST_CASE("hierarchy validation")
{
    HierarchySpec h = pencil_hierarchy();
    h.validate();
    h.beams.push_back(h.beams.front());
    CHECK_THROWS(h.validate());
    HierarchySpec orphan = pencil_hierarchy();
    orphan.beams.front().level = 2;
    CHECK_THROWS(orphan.validate());
    CHECK_THROWS(HierarchySpec{}.validate());
}

TEST_CASE("codebook structure")
{
    const Codebook &cb = small_codebook().cb;
    CHECK(cb.codewords.size() == 14);
    CHECK(cb.designs.size() == 2);
    CHECK(cb.leaf_indices().size() == 8);
    CHECK(cb.level_indices(1).size() == 2);
    CHECK(cb.children(0) == std::vector<int>{2, 3});
    CHECK(cb.children(2) == std::vector<int>{6, 7});
    CHECK(cb.index_of(13) == 13);
    CHECK_THROWS(cb.index_of(99));
    for (const auto &c : cb.codewords)
        CHECK((c.xi.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("codebook save and load round trip")
{
    const Small &s = small_codebook();
    const auto path = std::filesystem::temp_directory_path() / "amafris_test_codebook.json";
    save_codebook(path, s.cb);
    const Codebook back = load_codebook(path, s.pem_cfg, s.carrier);
    REQUIRE(back.codewords.size() == s.cb.codewords.size());
    for (std::size_t i = 0; i < back.codewords.size(); ++i)
    {
        CHECK(back.codewords[i].id == s.cb.codewords[i].id);
        CHECK(back.codewords[i].parent == s.cb.codewords[i].parent);
        CHECK(back.specs[i].label == s.cb.specs[i].label);
        CHECK((back.codewords[i].xi - s.cb.codewords[i].xi).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (const auto &[hw, d] : s.cb.designs)
    {
        REQUIRE(back.designs.count(hw) == 1);
        CHECK(back.designs.at(hw).optimized.ripple_db == d.optimized.ripple_db);
    }

    ArrayGeometry g;
    g.n_p = 12;
    const PemConfiguration other = pem(near_field_matrix(g, ModuleLayout::vertical_stack(1, 12), 0, 0, 0.0, s.carrier));
    CHECK_THROWS(load_codebook(path, other, s.carrier));
    std::filesystem::remove(path);
    CHECK_THROWS(load_codebook(path, s.pem_cfg, s.carrier));
}
