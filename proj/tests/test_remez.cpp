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

#include "amafris/remez.hpp"
#include "support.hpp"

#include <doctest.h>

#include <string>

using namespace amafris;
using doctest::Approx;

namespace {

std::string signs(const std::vector<double> &taps)
{
    const bool flip = taps[taps.size() / 2] < 0.0;
    std::string s;
    for (double t : taps)
        s += ((t < 0.0) != flip) ? '-' : '+';
    return s;
}

std::vector<RemezBand> lowpass(double pass, double stop) { return {{0.0, pass, 1.0, 1.0}, {stop, 0.5, 0.0, 1.0}}; }

} // namespace

TEST_CASE("sign patterns agree with a reference Parks-McClellan implementation")
{
    CHECK(signs(remez(40, lowpass(0.05, 0.1)).taps) == "-++++++------++++++++++++++------++++++-");
    CHECK(signs(remez(40, lowpass(0.11, 0.16)).taps) == "-++++----++++---++++++++---++++----++++-");
    CHECK(signs(remez(40, lowpass(0.215, 0.265)).taps) == "-++--+++--++--++--++++--++--++--+++--++-");
    CHECK(signs(remez(40, lowpass(0.11, 0.21)).taps) == "+---++++---+++---++++++---+++---++++---+");
    CHECK(signs(remez(7, lowpass(0.15, 0.25)).taps) == "-+++++-");
}

TEST_CASE("odd-length taps match reference values")
{
    const RemezResult r = remez(41, lowpass(0.1, 0.15));
    const double ref[5] = {-0.0026731108, 0.0058636362, 0.0065716184, 0.0052687645, 0.0001590007};
    for (int i = 0; i < 5; ++i)
        CHECK(r.taps[i] == Approx(ref[i]).epsilon(1e-6));
    CHECK(r.ripple > 0.0);
}

TEST_CASE("designs are linear phase")
{
    for (std::uint64_t i = 0; i < 40; ++i)
    {
        Rng rng = testgen::stream(20, i);
        const int n = testgen::integer(rng, 8, 60);
        const double pass = testgen::uniform(rng, 0.03, 0.3);
        const double stop = std::min(pass + testgen::uniform(rng, 0.04, 0.15), 0.49);
        const RemezResult r = remez(n, lowpass(pass, stop));
        REQUIRE(static_cast<int>(r.taps.size()) == n);
        double scale = 0.0;
        for (double t : r.taps)
            scale = std::max(scale, std::abs(t));
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(r.taps[k] - r.taps[n - 1 - k]) <= 1e-9 * scale);
    }
}

TEST_CASE("invalid band specifications are rejected")
{
    CHECK_THROWS(remez(2, lowpass(0.1, 0.2)));
    CHECK_THROWS(remez(20, lowpass(0.3, 0.2)));
    CHECK_THROWS(remez(20, {{0.0, 0.6, 1.0, 1.0}}));
    CHECK_THROWS(remez(20, {{0.0, 0.1, 1.0, -1.0}, {0.2, 0.5, 0.0, 1.0}}));
}
