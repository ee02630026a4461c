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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace amafris {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct DenseGrid {
    std::vector<double> freq;
    std::vector<double> desired;
    std::vector<double> weight;
    std::vector<int> band; // band index of each grid point
};

DenseGrid make_grid(int r, bool even_length, const std::vector<RemezBand> &bands, int grid_density)
{
    DenseGrid g;
    const double delf = 0.5 / (grid_density * r);
    for (std::size_t b = 0; b < bands.size(); ++b)
    {
        double lo = bands[b].low;
        double hi = bands[b].high;
        // type II responses vanish at Nyquist
        if (even_length && hi > 0.5 - delf)
            hi = 0.5 - delf;
        if (hi < lo)
            continue;
        const int k = std::max(1, static_cast<int>(std::lround((hi - lo) / delf)));
        for (int i = 0; i <= k; ++i)
        {
            const double f = (i == k) ? hi : lo + i * delf;
            g.freq.push_back(f);
            g.desired.push_back(bands[b].desired);
            g.weight.push_back(bands[b].weight);
            g.band.push_back(static_cast<int>(b));
        }
    }
    if (even_length)
        for (std::size_t i = 0; i < g.freq.size(); ++i)
        {
            const double c = std::cos(std::numbers::pi * g.freq[i]);
            g.desired[i] /= c;
            g.weight[i] *= c;
        }
    return g;
}

// Barycentric weights 1 / prod_{j != k} (x_k - x_j) over the first n points.
std::vector<double> bary_weights(const std::vector<double> &x, std::size_t n)
{
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        double prod = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != k)
                prod *= 2.0 * (x[k] - x[j]);
        w[k] = 1.0 / prod;
    }
    return w;
}

struct Interpolant {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;

    double operator()(double freq) const
    {
        const double xf = std::cos(two_pi * freq);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
        {
            const double diff = xf - x[k];
            if (std::abs(diff) < 1e-14)
                return y[k];
            const double c = w[k] / diff;
            num += c * y[k];
            den += c;
        }
        return num / den;
    }
};

} // namespace

RemezResult remez(int numtaps, const std::vector<RemezBand> &bands, int grid_density, int max_iterations)
{
    if (numtaps < 3)
        throw std::invalid_argument("remez: at least 3 taps are required.");
    if (bands.empty())
        throw std::invalid_argument("remez: no bands given.");
    for (std::size_t b = 0; b < bands.size(); ++b)
    {
        const auto &band = bands[b];
        if (band.low < 0.0 || band.high > 0.5 || band.low > band.high || band.weight <= 0.0)
            throw std::invalid_argument("remez: band edges must satisfy 0 <= low <= high <= 0.5 with positive weight.");
        if (b > 0 && band.low <= bands[b - 1].high)
            throw std::invalid_argument("remez: bands must be increasing and non-overlapping.");
    }

    const bool even_length = numtaps % 2 == 0;
    const int r = even_length ? numtaps / 2 : (numtaps + 1) / 2;
    const DenseGrid grid = make_grid(r, even_length, bands, grid_density);
    const int n_grid = static_cast<int>(grid.freq.size());
    if (n_grid < r + 1)
        throw std::invalid_argument("remez: frequency grid too coarse for the filter length.");

    std::vector<int> ext(r + 1);
    for (int k = 0; k <= r; ++k)
        ext[k] = static_cast<int>(std::lround(static_cast<double>(k) * (n_grid - 1) / r));

    Interpolant interp;
    double delta = 0.0;
    int iter = 0;
    bool converged = false;
    std::vector<double> err(n_grid);

    for (; iter < max_iterations && !converged; ++iter)
    {
        std::vector<double> x(r + 1);
        for (int k = 0; k <= r; ++k)
            x[k] = std::cos(two_pi * grid.freq[ext[k]]);
        const std::vector<double> gam = bary_weights(x, r + 1);
        double num = 0.0, den = 0.0;
        for (int k = 0; k <= r; ++k)
        {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            num += gam[k] * grid.desired[ext[k]];
            den += sign * gam[k] / grid.weight[ext[k]];
        }
        delta = num / den;

        interp.x.assign(x.begin(), x.begin() + r);
        interp.y.resize(r);
        for (int k = 0; k < r; ++k)
        {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            interp.y[k] = grid.desired[ext[k]] - sign * delta / grid.weight[ext[k]];
        }
        interp.w = bary_weights(interp.x, r);

        for (int i = 0; i < n_grid; ++i)
            err[i] = grid.weight[i] * (grid.desired[i] - interp(grid.freq[i]));

        // local extrema of the weighted error inside each band, band ends included
        std::vector<int> cand;
        for (int i = 0; i < n_grid; ++i)
        {
            const bool left_edge = i == 0 || grid.band[i - 1] != grid.band[i];
            const bool right_edge = i == n_grid - 1 || grid.band[i + 1] != grid.band[i];
            const double e = err[i];
            const double el = left_edge ? -std::numeric_limits<double>::infinity() : std::abs(err[i - 1]);
            const double er = right_edge ? -std::numeric_limits<double>::infinity() : std::abs(err[i + 1]);
            const bool same_l = left_edge || (err[i - 1] >= 0) == (e >= 0);
            const bool same_r = right_edge || (err[i + 1] >= 0) == (e >= 0);
            const double ae = std::abs(e);
            if ((ae >= el || !same_l) && (ae > er || !same_r || (right_edge && ae >= er)))
                cand.push_back(i);
        }
        // enforce sign alternation, keeping the larger of same-sign neighbours
        std::vector<int> alt;
        for (int i : cand)
        {
            if (!alt.empty() && (err[alt.back()] >= 0) == (err[i] >= 0))
            {
                if (std::abs(err[i]) > std::abs(err[alt.back()]))
                    alt.back() = i;
                continue;
            }
            alt.push_back(i);
        }
        while (static_cast<int>(alt.size()) > r + 1)
        {
            if (std::abs(err[alt.front()]) < std::abs(err[alt.back()]))
                alt.erase(alt.begin());
            else
                alt.pop_back();
        }
        if (static_cast<int>(alt.size()) < r + 1)
            throw RemezError("remez: too few extremal frequencies", std::abs(delta));

        double emax = 0.0, emin = std::numeric_limits<double>::infinity();
        for (int i : alt)
        {
            emax = std::max(emax, std::abs(err[i]));
            emin = std::min(emin, std::abs(err[i]));
        }
        converged = alt == ext || (emax - emin) <= 1e-9 * emax;
        ext = alt;
    }
    if (!converged)
        throw RemezError("remez: exchange did not converge", std::abs(delta));

    // cosine-series coefficients from samples at DCT nodes, then taps
    const int m_half = numtaps / 2;
    Eigen::MatrixXd basis(r, r);
    Eigen::VectorXd samples(r);
    for (int m = 0; m < r; ++m)
    {
        const double w = std::numbers::pi * (m + 0.5) / r;
        const double f = w / two_pi;
        const double p = interp(f);
        samples[m] = even_length ? std::cos(0.5 * w) * p : p;
        for (int k = 0; k < r; ++k)
            basis(m, k) = even_length ? std::cos(w * (k + 0.5)) : std::cos(w * k);
    }
    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(samples);

    RemezResult res;
    res.taps.assign(numtaps, 0.0);
    if (even_length)
    {
        for (int k = 0; k < r; ++k)
        {
            res.taps[m_half - 1 - k] = 0.5 * coef[k];
            res.taps[m_half + k] = 0.5 * coef[k];
        }
    }
    else
    {
        res.taps[m_half] = coef[0];
        for (int k = 1; k < r; ++k)
        {
            res.taps[m_half - k] = 0.5 * coef[k];
            res.taps[m_half + k] = 0.5 * coef[k];
        }
    }
    res.ripple = std::abs(delta);
    res.iterations = iter;
    return res;
}

} // namespace amafris
