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

#include "amafris/amaf_ris.hpp"
#include "amafris/channel.hpp"
#include "amafris/codebook.hpp"

#include <map>
#include <optional>
#include <vector>

namespace amafris {

// RIS profiles u_{l,j}(f) = T_{l,j}(f) v1 on the subcarrier grid. The diagonal block is shared
// by all modules; cross blocks are only built on request.
class NearFieldBank {
public:
    NearFieldBank(const ArrayGeometry &geom, const ModuleLayout &layout, const CarrierConfig &carrier,
                  const PemConfiguration &pem_cfg, std::vector<double> subcarriers, bool with_cross = false);

    const CMat &profile(int l, int j, int nu) const;
    const std::vector<double> &subcarriers() const { return subcarriers_; }
    const ModuleLayout &layout() const { return layout_; }
    const CarrierConfig &carrier() const { return carrier_; }
    bool has_cross() const { return with_cross_; }
    int n_p() const { return n_p_; }

private:
    ModuleLayout layout_;
    CarrierConfig carrier_;
    std::vector<double> subcarriers_;
    bool with_cross_ = false;
    int n_p_ = 0;
    std::vector<CMat> diag_;
    std::map<std::pair<int, int>, std::vector<CMat>> cross_;
};

// Xi_c .* u1(f_nu) for a set of codebook beams.
class BeamBank {
public:
    BeamBank(const Codebook &cb, std::vector<int> beams, const NearFieldBank &nf);

    int size() const { return static_cast<int>(beams_.size()); }
    int n_sub() const { return static_cast<int>(subcarriers_.size()); }
    int codebook_index(int c) const { return beams_[c]; }
    const std::vector<double> &subcarriers() const { return subcarriers_; }
    const CarrierConfig &carrier() const { return carrier_; }

    // a(phi; f)^H X_c(f) conj(a(theta; f)) for every beam and subcarrier, indexed c * n_sub + nu.
    std::vector<cd> responses(double phi, double theta) const;

private:
    std::vector<int> beams_;
    std::vector<double> subcarriers_;
    CarrierConfig carrier_;
    int n_p_ = 0;
    std::vector<CMat> x_; // c * n_sub + nu
};

// Beam responses of every path in one drop; scatterer responses are shared by all users.
// g^H diag(vec Xi_c) u1 is tabulated for the first `tabulated_modules` modules.
class DropResponses {
public:
    DropResponses(const ChannelRealization &ch, const BeamBank &bank, int tabulated_modules = -1);

    // g_{k,l}(f_nu)^H diag(vec Xi_c) u1(f_nu)
    cd effective(int k, int module, int c, int nu) const;
    int users() const { return static_cast<int>(ch_->users.size()); }
    const BeamBank &bank() const { return *bank_; }

private:
    cd evaluate(int k, int module, int c, int nu) const;

    const ChannelRealization *ch_;
    const BeamBank *bank_;
    int modules_ = 0;
    std::vector<std::vector<cd>> scatterer_;
    std::vector<std::vector<cd>> los_;
    std::vector<cd> table_; // ((k * modules + l) * beams + c) * n_sub + nu
};

struct BeamAssignment {
    std::vector<int> beam;                 // c_k, index into the beam bank
    std::vector<std::vector<double>> rsrp; // [k][c], linear
};

BeamAssignment rsrp_assign(const DropResponses &resp);
BeamAssignment assign_from_rsrp(std::vector<std::vector<double>> rsrp);

// Direct evaluation from explicit channel vectors, module 0 transmitting.
double rsrp_direct(const ChannelRealization &ch, int k, const BeamCodeword &cw, const NearFieldBank &nf);

struct UserGroup {
    std::vector<int> users;   // k_i
    std::vector<int> beams;   // c_{k_i}
    std::vector<int> modules; // serving module of stream i

    int size() const { return static_cast<int>(users.size()); }
};

UserGroup schedule_group(const BeamAssignment &assignment, int num_beams, int num_modules, Rng &rng);

struct EffectiveChannel {
    std::vector<CMat> h; // per subcarrier
    bool include_next = false;
};

EffectiveChannel effective_channel(const UserGroup &group, const DropResponses &resp);

// Explicit evaluation; with include_next the leakage T_{l,j} from every active module is summed.
EffectiveChannel effective_channel(const UserGroup &group, const ChannelRealization &ch, const Codebook &cb,
                                   const std::vector<int> &beam_to_codeword, const NearFieldBank &nf,
                                   bool include_next);

struct ZfResult {
    CMat g;
    double gain = 0.0;      // c in H G = c I
    double condition = 0.0; // of H
    bool regularized = false;
};

ZfResult zf_precoder(const CMat &h, double max_condition = 1e12);

struct PrecodedLink {
    std::vector<std::vector<double>> sinr; // [i][nu]
    std::vector<double> rate;              // bit/s/Hz per stream
    int regularized = 0;                   // subcarriers that needed the Tikhonov fallback
};

enum class Precoding { none, zf };

PrecodedLink sinr_rates(const EffectiveChannel &h_true, Precoding mode, double p_rf_watt, double noise_watt,
                        const EffectiveChannel *h_est = nullptr);

// Adds circular Gaussian noise of variance (||H||_F^2 / K^2) / snr per subcarrier.
EffectiveChannel estimate_effective_channel(const EffectiveChannel &h, double pilot_snr_db, Rng &rng);

} // namespace amafris
