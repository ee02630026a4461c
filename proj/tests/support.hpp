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

#pragma once

#include "amafris/channel.hpp"

#include <doctest.h>

#include <random>

namespace amafris::testgen {

// Small hand-rolled generators for property tests; every case is reproducible from its index.
inline Rng stream(std::uint64_t test, std::uint64_t i) { return make_rng(0xC0FFEE, test, i); }

inline double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int integer(Rng &rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline CMat complex_matrix(Rng &rng, int rows, int cols)
{
    std::normal_distribution<double> n(0.0, 1.0);
    CMat m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = cd(n(rng), n(rng));
    return m;
}

// Random complex matrix with condition number at most max_cond.
inline CMat well_conditioned(Rng &rng, int k, double max_cond = 50.0)
{
    for (;;)
    {
        CMat h = complex_matrix(rng, k, k);
        Eigen::JacobiSVD<CMat> svd(h);
        const RVec s = svd.singularValues();
        if (s[s.size() - 1] > 0.0 && s[0] / s[s.size() - 1] <= max_cond)
            return h;
    }
}

inline Vec3 unit_vector(Rng &rng) { return sample_uniform_sphere(rng); }

inline Vec2 sector_point(Rng &rng, const SectorGeometry &s)
{
    const double r = uniform(rng, s.range_min, s.range_max);
    const double az = uniform(rng, s.az_min, s.az_max);
    return ground_point(r, az);
}

} // namespace amafris::testgen
