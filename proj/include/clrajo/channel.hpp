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

#ifndef CLRAJO_CHANNEL_HPP
#define CLRAJO_CHANNEL_HPP

#include "clrajo/archive.hpp"
#include "clrajo/numerics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace clrajo {

// Uniform planar array, element counts along the horizontal and vertical axes.
struct ArraySize {
    std::size_t horizontal = 1;
    std::size_t vertical = 1;

    std::size_t count() const { return horizontal * vertical; }
    bool operator==(const ArraySize &) const = default;
};

enum class Link { RisUser, BsRis };
enum class Regime { Near, Far };
enum class RegimePolicy { Auto, ForcedNear, ForcedFar };

// How per-path complex gains are scaled.
//   Normalized : sqrt(X / paths) * psi * exp(j u), psi ~ U[0, pi], u ~ U[0, 2 pi)
//   PowerLaw   : Normalized times sqrt(PL(z) / PL(z_ref)), PL(z) = 1e-2 z^-2.2
//   LogNormal  : CN(0, gamma^2 10^(-PL_dB(z) / 10)), gamma = sqrt(X / paths)
enum class GainModel { Normalized, PowerLaw, LogNormal };

struct SystemConfig {
    ArraySize bs{8, 4};
    ArraySize ris{8, 4};
    ArraySize ue{2, 2};
    std::size_t users = 4;
    std::size_t rf_chains = 4;
    double wavelength = 0.006;

    std::size_t paths_bsris = 3;
    // One entry per user, or a single entry shared by all users.
    std::vector<std::size_t> paths_risuser{3};

    // Link distances in meters. User k's distance is drawn uniformly in
    // [z_h_min, z_h_max] for every realization.
    double z_f = 9.375;
    double z_h_min = 1.25;
    double z_h_max = 1.875;

    double transmit_power = 1.0;
    double noise_variance = 1.0;

    RegimePolicy bs_ris_regime = RegimePolicy::Auto;
    RegimePolicy ris_user_regime = RegimePolicy::Auto;

    GainModel gain_model = GainModel::Normalized;
    // PowerLaw reference distances; zero selects the absolute path loss.
    double pathloss_ref_bsris = 0.0;
    double pathloss_ref_risuser = 0.0;

    std::size_t M() const { return bs.count(); }
    std::size_t N() const { return ris.count(); }
    std::size_t L() const { return ue.count(); }
    // Subframes needed to sweep all BS antennas with N_RF chains.
    std::size_t rf_blocks() const { return M() / rf_chains; }
    std::size_t paths_for_user(std::size_t k) const;

    // Throws ParameterError describing the first violated invariant.
    void validate() const;
};

struct PathParams {
    cdouble gain{0.0, 0.0};
    double distance_rx = 0.0;
    double distance_tx = 0.0;
    double elevation_rx = 0.0;
    double azimuth_rx = 0.0;
    double elevation_tx = 0.0;
    double azimuth_tx = 0.0;
    bool los = false;
};

struct ChannelRealization {
    CMatrix F;                     // M x N
    std::vector<CMatrix> H;        // K entries, N x L
    std::vector<CMatrix> H_eff;    // K*L entries, M x N, index k*L + l
    Regime bs_ris_regime = Regime::Far;
    std::vector<Regime> ris_user_regimes;
    std::vector<double> user_distances;
    std::size_t redraws = 0;       // degenerate reference columns rejected

    std::size_t users() const { return H.size(); }
    std::size_t user_antennas() const { return H.empty() ? 0 : static_cast<std::size_t>(H.front().cols()); }
    const CMatrix &effective(std::size_t k, std::size_t l) const { return H_eff.at(k * user_antennas() + l); }
};

// Near-field (second-order Fresnel) UPA response, unit norm.
// Element (e_h, e_v) is stored at index e_h * E_v + e_v.
CVector near_field_response(ArraySize size, double distance, double elevation, double azimuth,
                            double wavelength);

// Planar-wavefront UPA response with phase pi (e_h sin(el) cos(az) + e_v sin(el) sin(az)),
// indices from zero, same element ordering as near_field_response.
CVector far_field_response(ArraySize size, double elevation, double azimuth);

// 2 D_RIS^2 / lambda with D_RIS = (lambda / 2) N.
double rayleigh_distance(const SystemConfig &cfg);
// 2 (D_RIS + D_BS)^2 / lambda with D_BS = (lambda / 2) M.
double mimo_rayleigh_distance(const SystemConfig &cfg);

// Distance-only classification; near iff distance <= the link's boundary.
Regime classify_regime(Link link, double distance, const SystemConfig &cfg);

// classify_regime unless the config forces the link's regime.
Regime resolve_regime(Link link, double distance, const SystemConfig &cfg);

// Draws the propagation paths of one link. `link_distance` is z_f for the
// BS-RIS link and the user's z_h for the RIS-user link. Angles are uniform
// on [0, pi]; scatter distances uniform on [0.5 z, 1.5 z].
std::vector<PathParams> draw_paths(Rng &rng, const SystemConfig &cfg, Link link, double link_distance,
                                   std::size_t user = 0);

// Per-path amplitude normalization sqrt(X / paths) for the given link.
double gain_normalization(const SystemConfig &cfg, Link link, std::size_t user = 0);

// N x L; RIS side near- or far-field according to `regime`, user side always far-field.
CMatrix gen_ris_user_channel(const std::vector<PathParams> &paths, Regime regime, const SystemConfig &cfg);

// M x N; both sides near-field or both far-field.
CMatrix gen_bs_ris_channel(const std::vector<PathParams> &paths, Regime regime, const SystemConfig &cfg);

// L matrices F diag(H_k(:, l)).
std::vector<CMatrix> effective_channel(const CMatrix &F, const CMatrix &Hk);

// Linear power gain 1e-2 z^-2.2.
double path_loss_powerlaw(double z);

struct LogNormalPathLoss {
    double alpha;
    double beta;
    double sigma_db;
};
LogNormalPathLoss lognormal_parameters(bool los);

// alpha + 10 beta log10(z) + shadowing, in dB.
double path_loss_lognormal(double z, bool los, double shadowing_db);
double path_loss_lognormal(double z, bool los, Rng &rng);

// Draws F and every H_k. A realization whose reference column H_1(:, 1) has
// an entry below 1e-9 of its largest magnitude is redrawn; after
// `max_redraws` rejections std::runtime_error is thrown.
ChannelRealization generate_realization(Rng &rng, const SystemConfig &cfg, std::size_t max_redraws = 32);

// Redraws only the RIS-user channels (and their effective cascades), keeping F.
void redraw_user_channels(Rng &rng, const SystemConfig &cfg, ChannelRealization &real,
                          std::size_t max_redraws = 32);

MatrixArchive to_archive(const ChannelRealization &real);
ChannelRealization channel_from_archive(const MatrixArchive &archive);

std::string to_string(Regime r);

} // namespace clrajo

#endif
