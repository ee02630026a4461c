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

#include <stdexcept>
#include <string>
#include <vector>

namespace amafris {

/// One band of a linear-phase FIR specification. Edges are normalised
/// frequencies in cycles/sample on [0, 0.5].
struct RemezBand {
    double low = 0.0;
    double high = 0.0;
    double desired = 0.0;
    double weight = 1.0;
};

struct RemezResult {
    std::vector<double> taps;
    double ripple = 0.0; // |delta| of the final weighted equiripple error
    int iterations = 0;
};

class RemezError : public std::runtime_error {
public:
    RemezError(const std::string &what, double last_ripple)
        : std::runtime_error(what), last_ripple_(last_ripple)
    {
    }
    double last_ripple() const { return last_ripple_; }

private:
    double last_ripple_;
};

/// Equiripple symmetric (type I/II) FIR design by the Remez exchange algorithm.
/// Throws std::invalid_argument for malformed bands and RemezError when the
/// exchange fails to converge within max_iterations.
RemezResult remez(int numtaps, const std::vector<RemezBand> &bands, int grid_density = 16, int max_iterations = 60);

} // namespace amafris
