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

#include "amafris/beam_design.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amafris {

namespace {

const double sqrt2 = std::sqrt(2.0);

// Isometric real coordinates of the strict upper triangle of a Hermitian matrix.
struct OffDiagonal {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;

    explicit OffDiagonal(int n_) : n(n_)
    {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < j; ++i)
                pairs.emplace_back(i, j);
    }
    int dim() const { return 2 * static_cast<int>(pairs.size()); }

    template <class Out>
    void embed(const CMat &a, Out &&y) const
    {
        const auto np = static_cast<Eigen::Index>(pairs.size());
        for (Eigen::Index k = 0; k < np; ++k)
        {
            const cd v = a(pairs[k].first, pairs[k].second);
            y[k] = sqrt2 * v.real();
            y[np + k] = sqrt2 * v.imag();
        }
    }

    CMat unembed(const RVec &y) const
    {
        CMat w = CMat::Identity(n, n);
        const auto np = static_cast<Eigen::Index>(pairs.size());
        for (Eigen::Index k = 0; k < np; ++k)
        {
            const cd v(y[k] / sqrt2, y[np + k] / sqrt2);
            w(pairs[k].first, pairs[k].second) = v;
            w(pairs[k].second, pairs[k].first) = std::conj(v);
        }
        return w;
    }
};

CVec steered_taper(const RVec &q, double beta)
{
    const int n = static_cast<int>(q.size());
    CVec v(n);
    for (int i = 0; i < n; ++i)
        v[i] = std::polar(q[i], -pi * beta * i);
    return v;
}

double gain(const CVec &w, const RVec &q, double beta)
{
    const CVec v = steered_taper(q, beta);
    return element_gain_sin(beta) * std::norm(v.dot(w));
}

CVec unit_phase(const CVec &v)
{
    CVec w(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        w[i] = std::abs(v[i]) > 0.0 ? v[i] / std::abs(v[i]) : cd(1.0, 0.0);
    return w;
}

struct Evaluation {
    double min_gain = 0.0;
    double stop_max = 0.0;
    double score = 0.0;
};

} // namespace

CMat gain_matrix(const RVec &q, double beta)
{
    const CVec v = steered_taper(q, beta);
    return element_gain_sin(beta) * (v * v.adjoint());
}

double min_gain_on_grid(const CVec &w, const RVec &q, const std::vector<double> &grid)
{
    double m = std::numeric_limits<double>::infinity();
    for (double b : grid)
        m = std::min(m, gain(w, q, b));
    return m;
}

std::vector<double> sca_grid(double beta_min, double beta_max, int n_p, int grid_factor)
{
    return uniform_grid(beta_min, beta_max, grid_factor * n_p + 2);
}

ScaResult sca_flat_top(const RVec &q, double beta_min, double beta_max, const CVec &w_ini, const ScaOptions &opts)
{
    const int n = static_cast<int>(q.size());
    if (w_ini.size() != n)
        throw std::invalid_argument("sca_flat_top: initializer length differs from the taper.");
    if (!(beta_max >= beta_min) || beta_min <= -1.0 || beta_max >= 1.0)
        throw std::invalid_argument("sca_flat_top: target interval must lie inside (-1, 1).");
    for (Eigen::Index i = 0; i < w_ini.size(); ++i)
        if (std::abs(std::abs(w_ini[i]) - 1.0) > 1e-9)
            throw std::invalid_argument("sca_flat_top: initializer must have unit-modulus entries.");

    const std::vector<double> band = sca_grid(beta_min, beta_max, n, opts.grid_factor);
    std::vector<double> stop;
    if (opts.stopband)
        for (double b : uniform_grid(-1.0, 1.0, opts.stop_grid_factor * n + 1))
            if (std::abs(b) < 1.0 && (b < beta_min - opts.transition || b > beta_max + opts.transition))
                stop.push_back(b);
    const double eps = from_db(opts.stopband_db);

    double scale = 0.0;
    double min_ini = std::numeric_limits<double>::infinity();
    for (double b : band)
    {
        const double g = gain(w_ini, q, b);
        scale = std::max(scale, g);
        min_ini = std::min(min_ini, g);
    }
    if (!(scale > 0.0))
        throw std::invalid_argument("sca_flat_top: initializer has zero gain over the target.");

    auto evaluate = [&](const CVec &w) {
        Evaluation e;
        e.min_gain = min_gain_on_grid(w, q, band) / scale;
        for (double b : stop)
            e.stop_max = std::max(e.stop_max, gain(w, q, b) / scale);
        e.score = e.min_gain;
        if (opts.stopband)
            e.score -= opts.slack_weight * std::max(0.0, e.stop_max - eps * e.min_gain);
        return e;
    };

    const OffDiagonal off(n);
    const int nd = off.dim();
    const int mi = static_cast<int>(band.size());
    const int ms = static_cast<int>(stop.size());
    const bool slack = opts.stopband && ms > 0;
    const int nz = nd + 1 + (slack ? 1 : 0);
    const int m = mi + (slack ? ms + 1 : 0);
    const int ia = nd, it_ = nd + 1;

    RMat mat = RMat::Zero(m, nz);
    RVec c0(m);
    for (int r = 0; r < mi; ++r)
    {
        const CMat a = gain_matrix(q, band[r]) / scale;
        off.embed(a, mat.row(r).head(nd));
        mat(r, ia) = -1.0;
        c0[r] = a.trace().real();
    }
    if (slack)
    {
        for (int r = 0; r < ms; ++r)
        {
            const CMat a = gain_matrix(q, stop[r]) / scale;
            off.embed(a, mat.row(mi + r).head(nd));
            mat.row(mi + r).head(nd) *= -1.0;
            mat(mi + r, ia) = eps;
            mat(mi + r, it_) = 1.0;
            c0[mi + r] = -a.trace().real();
        }
        mat(m - 1, it_) = 1.0;
        c0[m - 1] = 0.0;
    }
    const RMat gram = RMat::Identity(m, m) + mat * mat.transpose();
    const Eigen::LLT<RMat> chol(gram);
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("sca_flat_top: factorization failed.");

    const double step = opts.admm_step;
    CMat w_iter = w_ini * w_ini.adjoint();
    CMat x = w_iter, v = CMat::Zero(n, n);
    RVec z(nz);
    off.embed(w_iter, z.head(nd));
    z[ia] = (mat.topRows(mi).leftCols(nd) * z.head(nd) + c0.head(mi)).minCoeff();
    if (slack)
        z[it_] = std::max(0.0, -(mat.middleRows(mi, ms) * z + c0.segment(mi, ms)).minCoeff());
    RVec s = (mat * z + c0).cwiseMax(0.0);
    RVec u = RVec::Zero(m);
    RVec cvec = RVec::Zero(nz);
    RVec r(nz), xv(nd);

    ScaResult res;
    res.min_gain_initial = min_ini;
    const Evaluation ini = evaluate(w_ini);
    CVec best_w = w_ini;
    Evaluation best = ini;
    double accepted_floor = ini.min_gain;
    res.accepted_min_gain.push_back(min_ini);

    ScaState state;
    state.penalty = opts.penalty_init * ini.min_gain;
    double prev_alpha = std::numeric_limits<double>::quiet_NaN();
    const double tol = opts.inner_tol * n;
    Eigen::SelfAdjointEigenSolver<CMat> eig;

    int outer = 0;
    for (; outer < opts.max_outer; ++outer)
    {
        eig.compute(w_iter);
        state.e_max = eig.eigenvectors().col(n - 1);
        const CMat e_outer = state.e_max * state.e_max.adjoint();
        off.embed(e_outer, cvec.head(nd));
        cvec.head(nd) *= -state.penalty;
        cvec[ia] = -1.0;
        if (slack)
            cvec[it_] = opts.slack_weight;

        for (int k = 0; k < opts.inner_iterations; ++k)
        {
            off.embed(x - v, xv);
            r = -cvec / step - mat.transpose() * (c0 - s + u);
            r.head(nd) += xv;
            r.tail(nz - nd) += z.tail(nz - nd);
            z = r - mat.transpose() * chol.solve(mat * r);
            const RVec mz = mat * z + c0;
            s = (mz + u).cwiseMax(0.0);
            const CMat w = off.unembed(z.head(nd));
            eig.compute(w + v);
            const RVec ev = eig.eigenvalues().cwiseMax(0.0);
            const CMat xn = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().adjoint();
            u += mz - s;
            v += w - xn;
            const double primal = std::max((w - xn).norm(), (mz - s).norm());
            const double dual = step * (xn - x).norm();
            x = xn;
            if (primal < tol && dual < tol)
                break;
        }

        w_iter = x;
        state.alpha = z[ia];
        eig.compute(w_iter);
        const RVec ev = eig.eigenvalues();
        res.rank_gap = ev[n - 1] > 0.0 ? std::max(0.0, ev[n - 2]) / ev[n - 1] : 1.0;
        const CVec w_cand = unit_phase(eig.eigenvectors().col(n - 1));
        const Evaluation cand = evaluate(w_cand);
        if (cand.score > best.score && cand.min_gain >= accepted_floor - opts.inner_tol)
        {
            best = cand;
            best_w = w_cand;
            accepted_floor = std::max(accepted_floor, cand.min_gain);
            res.accepted_min_gain.push_back(cand.min_gain * scale);
        }

        const bool rank_one = res.rank_gap < opts.rank_gap_tol;
        const bool stalled = std::isfinite(prev_alpha) &&
                             std::abs(state.alpha - prev_alpha) <= opts.rel_tol * std::abs(state.alpha);
        prev_alpha = state.alpha;
        if (rank_one || stalled)
        {
            res.converged = rank_one;
            ++outer;
            break;
        }
        state.penalty *= opts.penalty_growth;
    }
    state.w_mat = w_iter;

    res.outer_iterations = outer;
    res.w = best_w;
    res.min_gain = best.min_gain * scale;
    if (best.min_gain * scale < min_ini)
    {
        res.w = w_ini;
        res.min_gain = min_ini;
        res.fallback = true;
        res.diagnostic = "no iterate improved on the initializer";
    }
    else if (res.w == w_ini)
    {
        res.fallback = true;
        res.diagnostic = "no accepted iterate; returning the initializer";
    }
    if (!res.converged && res.diagnostic.empty())
        res.diagnostic = "rank-one gap not reached";

    if (opts.check_grid_doubling)
    {
        const std::vector<double> fine = sca_grid(beta_min, beta_max, n, 2 * opts.grid_factor);
        const double coarse_min = min_gain_on_grid(res.w, q, band);
        const double fine_min = min_gain_on_grid(res.w, q, fine);
        res.grid_doubling_delta_db = 10.0 * std::log10(coarse_min / fine_min);
        if (res.grid_doubling_delta_db >= 0.1)
            res.diagnostic += (res.diagnostic.empty() ? "" : "; ") + std::string("target grid too coarse");
    }
    return res;
}

PhaseDesign design_flat_top(const RVec &q, double half_width, const FlatTopOptions &opts)
{
    if (!(half_width > 0.0) || half_width >= 1.0)
        throw std::invalid_argument("design_flat_top: half width must lie in (0, 1).");
    if (opts.rho_candidates.empty())
        throw std::invalid_argument("design_flat_top: no PPF candidates given.");
    const int n = static_cast<int>(q.size());
    const RVec wb = binary_phase_profile(n, default_binary_bands(half_width, opts.binary_transition));
    const double transition = opts.sca.transition;

    auto penalty = [&](const FlatTopMetrics &m) {
        return std::max(0.0, m.ripple_db - opts.max_ripple_db) + std::max(0.0, m.psl_db - opts.max_psl_db);
    };

    PhaseDesign best;
    bool have = false;
    for (double rho : opts.rho_candidates)
    {
        PhaseDesign d;
        d.beta_min = -half_width;
        d.beta_max = half_width;
        d.w_binary = wb;
        d.rho = rho;
        d.pi_exp = opts.pi_exp;
        d.w_ppf = ppf(n, rho, opts.pi_exp);
        d.w_ini = d.w_ppf.cwiseProduct(wb.cast<cd>());
        d.sca = sca_flat_top(q, -half_width, half_width, d.w_ini, opts.sca);
        d.w_opt = d.sca.w;
        d.initial = measure_flat_top(d.w_ini, q, -half_width, half_width, transition);
        d.optimized = measure_flat_top(d.w_opt, q, -half_width, half_width, transition);
        d.meets_target = penalty(d.optimized) == 0.0 && !d.sca.fallback;
        bool better = !have;
        if (have)
        {
            if (d.meets_target != best.meets_target)
                better = d.meets_target;
            else if (d.meets_target)
                better = d.optimized.level > best.optimized.level;
            else
                better = penalty(d.optimized) < penalty(best.optimized);
        }
        if (better)
        {
            best = std::move(d);
            have = true;
        }
    }
    return best;
}

} // namespace amafris
