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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace amafris {

NearFieldBank::NearFieldBank(const ArrayGeometry &geom, const ModuleLayout &layout, const CarrierConfig &carrier,
                             const PemConfiguration &pem_cfg, std::vector<double> subcarriers, bool with_cross)
    : layout_(layout), carrier_(carrier), subcarriers_(std::move(subcarriers)), with_cross_(with_cross), n_p_(geom.n_p)
{
    layout_.validate();
    for (double f : subcarriers_)
        diag_.push_back(ris_profile(near_field_matrix(geom, layout_, 0, 0, f, carrier), pem_cfg));
    if (!with_cross_)
        return;
    for (int l = 0; l < layout_.size(); ++l)
        for (int j = 0; j < layout_.size(); ++j)
        {
            if (l == j)
                continue;
            auto &v = cross_[{l, j}];
            for (double f : subcarriers_)
                v.push_back(ris_profile(near_field_matrix(geom, layout_, l, j, f, carrier), pem_cfg));
        }
}

const CMat &NearFieldBank::profile(int l, int j, int nu) const
{
    if (l == j)
        return diag_.at(static_cast<std::size_t>(nu));
    const auto it = cross_.find({l, j});
    if (it == cross_.end())
        throw std::logic_error("NearFieldBank: cross-module profiles were not built.");
    return it->second.at(static_cast<std::size_t>(nu));
}

BeamBank::BeamBank(const Codebook &cb, std::vector<int> beams, const NearFieldBank &nf)
    : beams_(std::move(beams)), subcarriers_(nf.subcarriers()), carrier_(nf.carrier()), n_p_(nf.n_p())
{
    if (beams_.empty())
        throw std::invalid_argument("BeamBank: no beams selected.");
    for (int b : beams_)
    {
        if (b < 0 || b >= static_cast<int>(cb.codewords.size()))
            throw std::out_of_range("BeamBank: codeword index out of range.");
        for (std::size_t nu = 0; nu < subcarriers_.size(); ++nu)
            x_.push_back(cb.codewords[static_cast<std::size_t>(b)].xi.cwiseProduct(nf.profile(0, 0, static_cast<int>(nu))));
    }
}

std::vector<cd> BeamBank::responses(double phi, double theta) const
{
    const int ns = n_sub();
    std::vector<cd> out(static_cast<std::size_t>(size()) * ns);
    const double su = std::sin(phi), sv = std::sin(theta);
    for (int nu = 0; nu < ns; ++nu)
    {
        const double f = subcarriers_[nu];
        const CVec ax = ula_steering(n_p_, su, f, carrier_);
        const CVec azc = ula_steering(n_p_, sv, f, carrier_).conjugate();
        for (int c = 0; c < size(); ++c)
        {
            const CMat &x = x_[static_cast<std::size_t>(c) * ns + nu];
            out[static_cast<std::size_t>(c) * ns + nu] = ax.dot(x * azc);
        }
    }
    return out;
}

DropResponses::DropResponses(const ChannelRealization &ch, const BeamBank &bank, int tabulated_modules)
    : ch_(&ch), bank_(&bank)
{
    modules_ = tabulated_modules < 0 ? ch.layout.size() : std::min(tabulated_modules, ch.layout.size());
    if (ch.users.empty())
        return;
    const auto &paths0 = ch.users.front().paths;
    for (const Path &p : paths0)
        if (p.scatterer >= 0)
        {
            if (static_cast<int>(scatterer_.size()) <= p.scatterer)
                scatterer_.resize(static_cast<std::size_t>(p.scatterer) + 1);
            scatterer_[static_cast<std::size_t>(p.scatterer)] = bank.responses(p.phi, p.theta);
        }
    los_.reserve(ch.users.size());
    for (const auto &u : ch.users)
        los_.push_back(bank.responses(u.paths.front().phi, u.paths.front().theta));

    const int nb = bank.size(), ns = bank.n_sub();
    table_.assign(ch.users.size() * static_cast<std::size_t>(modules_) * nb * ns, cd(0.0, 0.0));
    std::vector<cd> coef;
    for (int k = 0; k < users(); ++k)
    {
        const auto &link = ch.users[static_cast<std::size_t>(k)];
        for (int l = 0; l < modules_; ++l)
        {
            const Vec3 &pos = ch.layout.positions[static_cast<std::size_t>(l)];
            for (int nu = 0; nu < ns; ++nu)
            {
                const double f = bank.subcarriers()[static_cast<std::size_t>(nu)];
                coef.clear();
                for (const Path &p : link.paths)
                    coef.push_back(std::conj(path_coefficient(p, pos, f, ch.carrier)));
                for (int c = 0; c < nb; ++c)
                {
                    const std::size_t idx = static_cast<std::size_t>(c) * ns + nu;
                    cd acc = 0.0;
                    for (std::size_t pi_ = 0; pi_ < link.paths.size(); ++pi_)
                    {
                        const int s = link.paths[pi_].scatterer;
                        const cd r = s < 0 ? los_[static_cast<std::size_t>(k)][idx]
                                           : scatterer_[static_cast<std::size_t>(s)][idx];
                        acc += coef[pi_] * r;
                    }
                    table_[((static_cast<std::size_t>(k) * modules_ + l) * nb + c) * ns + nu] = acc;
                }
            }
        }
    }
}

cd DropResponses::evaluate(int k, int module, int c, int nu) const
{
    const auto &link = ch_->users[static_cast<std::size_t>(k)];
    const double f = bank_->subcarriers()[static_cast<std::size_t>(nu)];
    const Vec3 &pos = ch_->layout.positions[static_cast<std::size_t>(module)];
    const std::size_t idx = static_cast<std::size_t>(c) * bank_->n_sub() + nu;
    cd acc = 0.0;
    for (const Path &p : link.paths)
    {
        const cd r = p.scatterer < 0 ? los_[static_cast<std::size_t>(k)][idx]
                                     : scatterer_[static_cast<std::size_t>(p.scatterer)][idx];
        acc += std::conj(path_coefficient(p, pos, f, ch_->carrier)) * r;
    }
    return acc;
}

cd DropResponses::effective(int k, int module, int c, int nu) const
{
    if (module < modules_)
        return table_[((static_cast<std::size_t>(k) * modules_ + module) * bank_->size() + c) * bank_->n_sub() + nu];
    return evaluate(k, module, c, nu);
}

BeamAssignment assign_from_rsrp(std::vector<std::vector<double>> rsrp)
{
    BeamAssignment a;
    a.rsrp = std::move(rsrp);
    for (const auto &row : a.rsrp)
    {
        if (row.empty())
            throw std::invalid_argument("assign_from_rsrp: empty RSRP row.");
        // first maximum wins ties
        a.beam.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
    }
    return a;
}

BeamAssignment rsrp_assign(const DropResponses &resp)
{
    const int nb = resp.bank().size(), ns = resp.bank().n_sub();
    std::vector<std::vector<double>> rsrp(static_cast<std::size_t>(resp.users()), std::vector<double>(nb, 0.0));
    for (int k = 0; k < resp.users(); ++k)
        for (int c = 0; c < nb; ++c)
            for (int nu = 0; nu < ns; ++nu)
                rsrp[k][c] += std::norm(resp.effective(k, 0, c, nu));
    return assign_from_rsrp(std::move(rsrp));
}

double rsrp_direct(const ChannelRealization &ch, int k, const BeamCodeword &cw, const NearFieldBank &nf)
{
    double g = 0.0;
    for (std::size_t nu = 0; nu < nf.subcarriers().size(); ++nu)
    {
        const CVec gv = ch.vector(k, 0, nf.subcarriers()[nu]);
        CMat x = cw.xi.cwiseProduct(nf.profile(0, 0, static_cast<int>(nu)));
        g += std::norm(gv.dot(Eigen::Map<CVec>(x.data(), x.size())));
    }
    return g;
}

UserGroup schedule_group(const BeamAssignment &assignment, int num_beams, int num_modules, Rng &rng)
{
    if (num_beams < 1 || num_modules < 1)
        throw std::invalid_argument("schedule_group: need at least one beam and one module.");
    std::vector<std::vector<int>> pools(static_cast<std::size_t>(num_beams));
    for (std::size_t k = 0; k < assignment.beam.size(); ++k)
    {
        const int c = assignment.beam[k];
        if (c < 0 || c >= num_beams)
            throw std::out_of_range("schedule_group: beam index out of range.");
        pools[static_cast<std::size_t>(c)].push_back(static_cast<int>(k));
    }
    std::vector<int> nonempty;
    for (int c = 0; c < num_beams; ++c)
        if (!pools[c].empty())
            nonempty.push_back(c);
    if (nonempty.empty())
        throw std::invalid_argument("schedule_group: every beam pool is empty.");

    std::vector<int> chosen;
    std::vector<int> modules;
    if (num_beams <= num_modules)
    {
        chosen = nonempty;
        modules = nonempty;
    }
    else
    {
        const int take = std::min(num_modules, static_cast<int>(nonempty.size()));
        for (int i = 0; i < take; ++i)
        {
            std::uniform_int_distribution<int> pick(i, static_cast<int>(nonempty.size()) - 1);
            std::swap(nonempty[static_cast<std::size_t>(i)], nonempty[static_cast<std::size_t>(pick(rng))]);
        }
        chosen.assign(nonempty.begin(), nonempty.begin() + take);
        std::sort(chosen.begin(), chosen.end());
        modules.resize(chosen.size());
        std::iota(modules.begin(), modules.end(), 0);
    }

    UserGroup g;
    for (std::size_t i = 0; i < chosen.size(); ++i)
    {
        const auto &pool = pools[static_cast<std::size_t>(chosen[i])];
        std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
        g.users.push_back(pool[static_cast<std::size_t>(pick(rng))]);
        g.beams.push_back(chosen[i]);
        g.modules.push_back(modules[i]);
    }
    return g;
}

EffectiveChannel effective_channel(const UserGroup &group, const DropResponses &resp)
{
    const int n = group.size(), ns = resp.bank().n_sub();
    EffectiveChannel e;
    e.h.assign(static_cast<std::size_t>(ns), CMat::Zero(n, n));
    for (int nu = 0; nu < ns; ++nu)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                e.h[nu](i, j) = resp.effective(group.users[i], group.modules[j], group.beams[j], nu);
    return e;
}

EffectiveChannel effective_channel(const UserGroup &group, const ChannelRealization &ch, const Codebook &cb,
                                   const std::vector<int> &beam_to_codeword, const NearFieldBank &nf,
                                   bool include_next)
{
    const int n = group.size();
    const auto &freqs = nf.subcarriers();
    EffectiveChannel e;
    e.include_next = include_next;
    e.h.assign(freqs.size(), CMat::Zero(n, n));
    auto xi_of = [&](int stream) -> const CMat & {
        return cb.codewords[static_cast<std::size_t>(beam_to_codeword.at(static_cast<std::size_t>(group.beams[stream])))].xi;
    };
    for (std::size_t nu = 0; nu < freqs.size(); ++nu)
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < n; ++s)
            {
                // module of stream s radiates codeword of stream s
                const int l = group.modules[s];
                const CVec g = ch.vector(group.users[i], l, freqs[nu]);
                for (int j = 0; j < n; ++j)
                {
                    if (!include_next && j != s)
                        continue;
                    CMat x = xi_of(s).cwiseProduct(nf.profile(l, group.modules[j], static_cast<int>(nu)));
                    e.h[nu](i, j) += g.dot(Eigen::Map<CVec>(x.data(), x.size()));
                }
            }
    return e;
}

ZfResult zf_precoder(const CMat &h, double max_condition)
{
    if (h.rows() != h.cols() || h.rows() == 0)
        throw std::invalid_argument("zf_precoder: channel must be square and nonempty.");
    const int n = static_cast<int>(h.rows());
    ZfResult r;
    const RVec sv = Eigen::JacobiSVD<CMat>(h).singularValues();
    r.condition = sv[n - 1] > 0.0 ? sv[0] / sv[n - 1] : std::numeric_limits<double>::infinity();
    CMat g0;
    if (std::isfinite(r.condition) && r.condition <= max_condition)
        g0 = h.partialPivLu().inverse();
    else
    {
        r.regularized = true;
        const CMat hh = h.adjoint() * h;
        const double delta = 1e-9 * hh.trace().real() / n;
        g0 = (hh + delta * CMat::Identity(n, n)).ldlt().solve(h.adjoint());
    }
    const double max_row = g0.rowwise().norm().maxCoeff();
    if (!(max_row > 0.0) || !std::isfinite(max_row))
        throw std::runtime_error("zf_precoder: precoder has no finite rows.");
    r.g = g0 / max_row;
    r.gain = 1.0 / max_row;
    return r;
}

PrecodedLink sinr_rates(const EffectiveChannel &h_true, Precoding mode, double p_rf_watt, double noise_watt,
                        const EffectiveChannel *h_est)
{
    if (h_true.h.empty())
        throw std::invalid_argument("sinr_rates: no subcarriers.");
    if (h_est && h_est->h.size() != h_true.h.size())
        throw std::invalid_argument("sinr_rates: estimated channel has a different subcarrier count.");
    const int n = static_cast<int>(h_true.h.front().rows());
    const int ns = static_cast<int>(h_true.h.size());
    PrecodedLink out;
    out.sinr.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(ns), 0.0));
    out.rate.assign(static_cast<std::size_t>(n), 0.0);
    for (int nu = 0; nu < ns; ++nu)
    {
        const CMat &h = h_true.h[nu];
        CMat m;
        if (mode == Precoding::zf)
        {
            const ZfResult zf = zf_precoder(h_est ? h_est->h[nu] : h);
            out.regularized += zf.regularized ? 1 : 0;
            m = h * zf.g;
        }
        else
            m = h;
        for (int i = 0; i < n; ++i)
        {
            double intf = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i)
                    intf += std::norm(m(i, j));
            const double s = std::norm(m(i, i)) * p_rf_watt / (noise_watt + intf * p_rf_watt);
            out.sinr[i][nu] = s;
            out.rate[i] += std::log2(1.0 + s);
        }
    }
    for (double &r : out.rate)
        r /= ns;
    return out;
}

EffectiveChannel estimate_effective_channel(const EffectiveChannel &h, double pilot_snr_db, Rng &rng)
{
    EffectiveChannel e = h;
    if (std::isinf(pilot_snr_db) && pilot_snr_db > 0.0)
        return e;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto &m : e.h)
    {
        const double k = static_cast<double>(m.rows());
        const double var = m.squaredNorm() / (k * k) / from_db(pilot_snr_db);
        const double sd = std::sqrt(0.5 * var);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                m(r, c) += cd(sd * re, sd * im);
            }
    }
    return e;
}

} // namespace amafris
