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

#include "amafris/beam_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amafris {

namespace {

double entropy(const double *p, Eigen::Index n)
{
    double h = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (p[i] > 0.0)
            h -= p[i] * std::log(p[i]);
    return h;
}

} // namespace

SeparableProfile separable_approximation(const RMat &amp_profile)
{
    if ((amp_profile.array() < 0.0).any())
        throw std::invalid_argument("separable_approximation: profile has negative entries.");
    const double total = amp_profile.sum();
    if (!(total > 0.0))
        throw std::invalid_argument("separable_approximation: profile is all zero.");
    const RMat p = amp_profile / total;

    SeparableProfile out;
    out.q = 0.5 * (p.rowwise().sum() + p.colwise().sum().transpose());

    double kl = 0.0;
    for (Eigen::Index c = 0; c < p.cols(); ++c)
        for (Eigen::Index r = 0; r < p.rows(); ++r)
            if (p(r, c) > 0.0)
                kl += p(r, c) * std::log(p(r, c) / (out.q[r] * out.q[c]));
    const double hq = entropy(out.q.data(), out.q.size());
    const double hp = entropy(p.data(), p.size());
    if (std::abs(kl - (2.0 * hq - hp)) > 1e-9 * std::max(1.0, 2.0 * hq))
        throw std::runtime_error("separable_approximation: entropy identity violated.");
    out.kl = std::max(0.0, kl);
    out.eta = hq > 0.0 ? out.kl / (2.0 * hq) : 0.0;
    return out;
}

std::vector<RemezBand> default_binary_bands(double half_width, double transition)
{
    if (!(half_width > 0.0) || !(transition > 0.0))
        throw std::invalid_argument("default_binary_bands: widths must be positive.");
    const double pass = 0.5 * half_width;
    const double stop = std::min(pass + 0.5 * transition, 0.499);
    if (stop <= pass)
        throw std::invalid_argument("default_binary_bands: target width too large for a lowpass design.");
    return {{0.0, pass, 1.0, 1.0}, {stop, 0.5, 0.0, 1.0}};
}

RVec binary_phase_profile(int n_p, const std::vector<RemezBand> &bands)
{
    const RemezResult res = remez(n_p, bands);
    RVec w(n_p);
    for (int n = 0; n < n_p; ++n)
        w[n] = res.taps[n] < 0.0 ? -1.0 : 1.0;
    if (w[n_p / 2] < 0.0)
        w = -w;
    return w;
}

CVec ppf(int n_p, double rho, double pi_exp)
{
    if (n_p < 2)
        throw std::invalid_argument("ppf: at least two elements are required.");
    if (rho < 0.0 || !(pi_exp > 0.0))
        throw std::invalid_argument("ppf: rho must be nonnegative and the exponent positive.");
    CVec w(n_p);
    for (int n = 0; n < n_p; ++n)
    {
        const double x = (0.5 + n - 0.5 * n_p) / (n_p - 1);
        w[n] = std::polar(1.0, 4.0 * pi * rho * std::pow(std::abs(x), pi_exp));
    }
    return w;
}

double element_gain_sin(double beta)
{
    return std::abs(beta) < 1.0 ? 4.0 * (1.0 - beta * beta) : 0.0;
}

RVec far_field_pattern(const CVec &w, const RVec &q, const std::vector<double> &beta, double f,
                       const CarrierConfig &carrier, bool include_element)
{
    if (w.size() != q.size())
        throw std::invalid_argument("far_field_pattern: weight and taper lengths differ.");
    const int n_p = static_cast<int>(w.size());
    const CVec x = w.cwiseProduct(q.cast<cd>());
    const double scale = pi * (carrier.f0 + f) / carrier.f0;
    RVec g(static_cast<Eigen::Index>(beta.size()));
    for (std::size_t i = 0; i < beta.size(); ++i)
    {
        // a(beta)^H x with a_n = exp(-j scale beta n)
        const cd step = std::polar(1.0, scale * beta[i]);
        cd ph = 1.0, acc = 0.0;
        for (int n = 0; n < n_p; ++n)
        {
            acc += ph * x[n];
            ph *= step;
        }
        const double e = include_element ? element_gain_sin(beta[i]) : 1.0;
        g[static_cast<Eigen::Index>(i)] = e * std::norm(acc);
    }
    return g;
}

double far_field_gain(const CMat &xi, const CMat &u1, double phi, double theta, double f,
                      const CarrierConfig &carrier, bool include_element)
{
    const int n_p = static_cast<int>(xi.rows());
    const CVec ax = ula_steering(n_p, std::sin(phi), f, carrier);
    const CVec az = ula_steering(n_p, std::sin(theta), f, carrier);
    const cd v = ax.adjoint() * xi.cwiseProduct(u1) * az.conjugate();
    const double e = include_element ? patch_gain(phi, theta) : 1.0;
    return e * std::norm(v);
}

std::vector<double> to_db(const RVec &linear, bool normalize_peak)
{
    const double ref = normalize_peak ? linear.maxCoeff() : 1.0;
    std::vector<double> out(static_cast<std::size_t>(linear.size()));
    for (Eigen::Index i = 0; i < linear.size(); ++i)
        out[static_cast<std::size_t>(i)] = 10.0 * std::log10(linear[i] / ref);
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, int points)
{
    if (points < 1)
        throw std::invalid_argument("uniform_grid: need at least one point.");
    std::vector<double> g(points);
    if (points == 1)
    {
        g[0] = 0.5 * (lo + hi);
        return g;
    }
    for (int i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * i / (points - 1);
    g.back() = hi;
    return g;
}

FlatTopMetrics measure_flat_top(const CVec &w, const RVec &q, double beta_min, double beta_max,
                                double transition, int grid_points)
{
    if (!(beta_max >= beta_min))
        throw std::invalid_argument("measure_flat_top: empty target interval.");
    std::vector<double> beta = uniform_grid(-1.0, 1.0, grid_points);
    // make sure both band edges are sampled
    beta.push_back(beta_min);
    beta.push_back(beta_max);
    std::sort(beta.begin(), beta.end());
    CarrierConfig carrier;
    const RVec g = far_field_pattern(w, q, beta, 0.0, carrier, true);

    FlatTopMetrics m;
    m.level = std::numeric_limits<double>::infinity();
    double side = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i)
    {
        const double gi = g[static_cast<Eigen::Index>(i)];
        if (beta[i] >= beta_min && beta[i] <= beta_max)
        {
            m.level = std::min(m.level, gi);
            m.peak = std::max(m.peak, gi);
        }
        else if (beta[i] < beta_min - transition || beta[i] > beta_max + transition)
            side = std::max(side, gi);
    }
    m.ripple_db = 10.0 * std::log10(m.peak / m.level);
    m.psl_db = side > 0.0 ? 10.0 * std::log10(side / m.level) : -std::numeric_limits<double>::infinity();

    const double centre = 0.5 * (beta_min + beta_max);
    std::size_t ic = 0;
    for (std::size_t i = 0; i < beta.size(); ++i)
        if (std::abs(beta[i] - centre) < std::abs(beta[ic] - centre))
            ic = i;
    double top = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i)
        if (beta[i] >= beta_min && beta[i] <= beta_max)
            top = std::max(top, g[static_cast<Eigen::Index>(i)]);
    const double half = 0.5 * std::max(top, g[static_cast<Eigen::Index>(ic)]);
    std::size_t lo = ic, hi = ic;
    while (lo > 0 && g[static_cast<Eigen::Index>(lo - 1)] >= half)
        --lo;
    while (hi + 1 < beta.size() && g[static_cast<Eigen::Index>(hi + 1)] >= half)
        ++hi;
    m.width_3db = beta[hi] - beta[lo];
    return m;
}

BeamCodeword compose_codeword(const CVec &w_x, const CVec &w_z, double steer_phi, double steer_theta,
                              const PemConfiguration &pem_cfg, const CarrierConfig &carrier)
{
    const int n_p = pem_cfg.n_p();
    if (w_x.size() != n_p || w_z.size() != n_p)
        throw std::invalid_argument("compose_codeword: shaping vectors must have n_p entries.");
    BeamCodeword cw;
    cw.w_x = w_x;
    cw.w_z = w_z;
    cw.steer_phi = steer_phi;
    cw.steer_theta = steer_theta;
    const CMat shaping = w_x * w_z.transpose();
    cw.xi = planar_steering(n_p, steer_phi, steer_theta, 0.0, carrier).cwiseProduct(shaping).cwiseProduct(
        pem_cfg.conj_phase);
    return cw;
}

int GroundGrid::nx() const { return static_cast<int>(std::floor((x_max - x_min) / resolution + 1e-9)) + 1; }
int GroundGrid::ny() const { return static_cast<int>(std::floor((y_max - y_min) / resolution + 1e-9)) + 1; }

Vec2 GroundGrid::pixel(int ix, int iy) const { return {x_min + ix * resolution, y_min + iy * resolution}; }

GroundGrid GroundGrid::covering(const SectorGeometry &sector, double resolution)
{
    if (!(resolution > 0.0))
        throw std::invalid_argument("GroundGrid: resolution must be positive.");
    GroundGrid g;
    const double reach = sector.range_max * std::max(std::abs(std::sin(sector.az_min)), std::abs(std::sin(sector.az_max)));
    const double near = sector.range_min * std::min(std::cos(sector.az_min), std::cos(sector.az_max));
    g.resolution = resolution;
    g.x_min = -std::ceil(reach / resolution) * resolution;
    g.x_max = -g.x_min;
    g.y_min = std::floor(std::max(0.0, near) / resolution) * resolution;
    g.y_max = std::ceil(sector.range_max / resolution) * resolution;
    return g;
}

FootprintMap ground_footprint(const BeamCodeword &cw, const CMat &u1, const SectorGeometry &sector,
                              const GroundGrid &grid, const CarrierConfig &carrier, bool distance_loss)
{
    FootprintMap map;
    map.grid = grid;
    map.gain_db = RMat::Constant(grid.ny(), grid.nx(), std::numeric_limits<double>::quiet_NaN());
    const double lambda0 = carrier.lambda0();
    for (int iy = 0; iy < grid.ny(); ++iy)
        for (int ix = 0; ix < grid.nx(); ++ix)
        {
            const Vec2 p = grid.pixel(ix, iy);
            if (!sector.contains(p))
                continue;
            const Aod aod = ground_to_aod(p, sector);
            double g = far_field_gain(cw.xi, u1, aod.phi, aod.theta, 0.0, carrier, true);
            if (distance_loss)
                g *= std::pow(lambda0 / (4.0 * pi * aod.distance), 2);
            map.gain_db(iy, ix) = 10.0 * std::log10(g);
        }
    return map;
}

} // namespace amafris
