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

#include "amafris/sca.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace amafris;
using doctest::Approx;

namespace {

RVec hann_taper(int n)
{
    RVec q(n);
    for (int i = 0; i < n; ++i)
        q[i] = 0.2 + std::sin(pi * (i + 0.5) / n);
    return q / q.sum();
}

ScaOptions quick()
{
    ScaOptions o;
    o.max_outer = 25;
    o.inner_iterations = 200;
    return o;
}

} // namespace

TEST_CASE("gain matrix is the rank-one quadratic form of the far-field pattern")
{
    CarrierConfig c;
    for (std::uint64_t i = 0; i < 40; ++i)
    {
        Rng rng = testgen::stream(40, i);
        const int n = testgen::integer(rng, 3, 20);
        RVec q(n);
        for (int k = 0; k < n; ++k)
            q[k] = testgen::uniform(rng, 0.1, 1.0);
        const CVec w = testgen::complex_matrix(rng, n, 1).col(0);
        const double beta = testgen::uniform(rng, -0.95, 0.95);
        const CMat a = gain_matrix(q, beta);
        CHECK((a - a.adjoint()).norm() <= 1e-12 * a.norm());
        const double quad = (w.adjoint() * a * w)(0, 0).real();
        const double ff = far_field_pattern(w, q, {beta}, 0.0, c)[0];
        CHECK(quad == Approx(ff).epsilon(1e-10));
        Eigen::SelfAdjointEigenSolver<CMat> es(a);
        CHECK(es.eigenvalues()[n - 2] <= 1e-12 * es.eigenvalues()[n - 1]);
    }
}

TEST_CASE("target grid covers the band with its endpoints")
{
    const std::vector<double> g = sca_grid(-0.2, 0.3, 10, 4);
    REQUIRE(g.size() == 42);
    CHECK(g.front() == Approx(-0.2));
    CHECK(g.back() == Approx(0.3));
    for (std::size_t i = 1; i < g.size(); ++i)
        CHECK(g[i] > g[i - 1]);
}

TEST_CASE("SCA never lowers the worst in-band gain")
{
    for (std::uint64_t i = 0; i < 4; ++i)
    {
        Rng rng = testgen::stream(41, i);
        const int n = testgen::integer(rng, 10, 16);
        const RVec q = hann_taper(n);
        const double hw = testgen::uniform(rng, 0.15, 0.4);
        const CVec w0 = ppf(n, 1.0, 1.0).cwiseProduct(binary_phase_profile(n, default_binary_bands(hw)).cast<cd>());
        const ScaResult r = sca_flat_top(q, -hw, hw, w0, quick());
        CHECK((r.w.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK(r.min_gain >= r.min_gain_initial * (1.0 - 1e-12));
        const std::vector<double> grid = sca_grid(-hw, hw, n, quick().grid_factor);
        CHECK(min_gain_on_grid(r.w, q, grid) == Approx(r.min_gain).epsilon(1e-9));
        for (std::size_t k = 1; k < r.accepted_min_gain.size(); ++k)
            CHECK(r.accepted_min_gain[k] >= r.accepted_min_gain[k - 1] * (1.0 - 1e-12));
    }
}

TEST_CASE("SCA input validation")
{
    const RVec q = hann_taper(8);
    CHECK_THROWS(sca_flat_top(q, -0.2, 0.2, CVec::Ones(7)));
    CHECK_THROWS(sca_flat_top(q, -0.2, 1.2, CVec::Ones(8)));
    CHECK_THROWS(sca_flat_top(q, -0.2, 0.2, CVec::Constant(8, cd(2.0, 0.0))));
    CHECK_THROWS(design_flat_top(q, 0.0));
    FlatTopOptions none;
    none.rho_candidates.clear();
    CHECK_THROWS(design_flat_top(q, 0.2, none));
}

TEST_CASE("flat-top design improves on its initializer")
{
    const int n = 16;
    const RVec q = hann_taper(n);
    FlatTopOptions o;
    o.rho_candidates = {0.5, 1.0};
    o.sca = quick();
    const PhaseDesign d = design_flat_top(q, 0.3, o);
    CHECK(d.optimized.level >= d.initial.level);
    CHECK(d.optimized.ripple_db < d.initial.ripple_db);
    CHECK((d.rho == 0.5 || d.rho == 1.0));
    CHECK(d.w_ini.size() == n);
    CHECK((d.w_binary.array().abs() == 1.0).all());
}
