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

#include "clrajo/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clrajo {

namespace {

constexpr double kPi = std::numbers::pi;

void check_array(ArraySize size, const char *what)
{
    if (size.horizontal == 0 || size.vertical == 0)
        throw ParameterError(std::string(what) + ": array dimensions must be positive");
}

bool reference_column_degenerate(const CMatrix &H1)
{
    const auto col = H1.col(0).cwiseAbs();
    const double peak = col.maxCoeff();
    if (!(peak > 0.0))
        return true;
    return col.minCoeff() < 1e-9 * peak;
}

std::vector<CMatrix> all_effective(const CMatrix &F, const std::vector<CMatrix> &H)
{
    std::vector<CMatrix> out;
    for (const CMatrix &Hk : H)
        for (CMatrix &e : effective_channel(F, Hk))
            out.push_back(std::move(e));
    return out;
}

void draw_users(Rng &rng, const SystemConfig &cfg, ChannelRealization &real)
{
    std::uniform_real_distribution<double> zdist(cfg.z_h_min, cfg.z_h_max);
    real.H.clear();
    real.ris_user_regimes.clear();
    real.user_distances.clear();
    for (std::size_t k = 0; k < cfg.users; ++k)
    {
        const double z = cfg.z_h_min == cfg.z_h_max ? cfg.z_h_min : zdist(rng);
        const Regime regime = resolve_regime(Link::RisUser, z, cfg);
        const auto paths = draw_paths(rng, cfg, Link::RisUser, z, k);
        real.H.push_back(gen_ris_user_channel(paths, regime, cfg));
        real.ris_user_regimes.push_back(regime);
        real.user_distances.push_back(z);
    }
}

} // namespace

std::size_t SystemConfig::paths_for_user(std::size_t k) const
{
    if (paths_risuser.size() == 1)
        return paths_risuser.front();
    return paths_risuser.at(k);
}

void SystemConfig::validate() const
{
    check_array(bs, "bs array");
    check_array(ris, "ris array");
    check_array(ue, "ue array");
    if (users == 0)
        throw ParameterError("users must be positive");
    if (rf_chains == 0 || rf_chains > M())
        throw ParameterError("rf_chains must lie in [1, M]");
    if (M() % rf_chains != 0)
        throw ParameterError("M (" + std::to_string(M()) + ") must be divisible by rf_chains (" +
                             std::to_string(rf_chains) + ")");
    if (!(wavelength > 0.0))
        throw ParameterError("wavelength must be positive");
    if (paths_bsris == 0)
        throw ParameterError("paths_bsris must be positive");
    if (paths_risuser.empty() || (paths_risuser.size() != 1 && paths_risuser.size() != users))
        throw ParameterError("paths_risuser must have one entry or one entry per user");
    for (std::size_t p : paths_risuser)
        if (p == 0)
            throw ParameterError("paths_risuser entries must be positive");
    if (!(z_f > 0.0) || !(z_h_min > 0.0) || !(z_h_max >= z_h_min))
        throw ParameterError("distances must be positive with z_h_min <= z_h_max");
    if (!(transmit_power > 0.0))
        throw ParameterError("transmit_power must be positive");
    if (!(noise_variance >= 0.0))
        throw ParameterError("noise_variance must be nonnegative");
    if (pathloss_ref_bsris < 0.0 || pathloss_ref_risuser < 0.0)
        throw ParameterError("path-loss reference distances must be nonnegative");
}

CVector near_field_response(ArraySize size, double distance, double elevation, double azimuth,
                            double wavelength)
{
    check_array(size, "near_field_response");
    if (!(distance > 0.0))
        throw ParameterError("near_field_response: distance must be positive");
    if (!(wavelength > 0.0))
        throw ParameterError("near_field_response: wavelength must be positive");

    const double se = std::sin(elevation);
    const double ca = std::cos(azimuth);
    const double sa = std::sin(azimuth);
    const double kx = se * ca;
    const double ky = se * sa;
    const double qx = (1.0 - kx * kx) / (2.0 * distance);
    const double qy = (1.0 - ky * ky) / (2.0 * distance);
    const double qxy = se * se * ca * sa / distance;
    const double wavenumber = 2.0 * kPi / wavelength;
    const double scale = 1.0 / std::sqrt(static_cast<double>(size.count()));

    const double ch = (static_cast<double>(size.horizontal) + 1.0) / 2.0;
    const double cv = (static_cast<double>(size.vertical) + 1.0) / 2.0;

    CVector b(size.count());
    for (std::size_t eh = 1; eh <= size.horizontal; ++eh)
    {
        const double x = 0.5 * wavelength * (static_cast<double>(eh) - ch);
        for (std::size_t ev = 1; ev <= size.vertical; ++ev)
        {
            const double y = 0.5 * wavelength * (static_cast<double>(ev) - cv);
            const double dd = -kx * x - ky * y + qx * x * x + qy * y * y - qxy * x * y;
            b((eh - 1) * size.vertical + (ev - 1)) = std::polar(scale, -wavenumber * dd);
        }
    }
    return b;
}

CVector far_field_response(ArraySize size, double elevation, double azimuth)
{
    check_array(size, "far_field_response");
    const double kx = std::sin(elevation) * std::cos(azimuth);
    const double ky = std::sin(elevation) * std::sin(azimuth);
    const double scale = 1.0 / std::sqrt(static_cast<double>(size.count()));

    CVector a(size.count());
    for (std::size_t eh = 0; eh < size.horizontal; ++eh)
        for (std::size_t ev = 0; ev < size.vertical; ++ev)
        {
            const double phase = kPi * (static_cast<double>(eh) * kx + static_cast<double>(ev) * ky);
            a(eh * size.vertical + ev) = std::polar(scale, phase);
        }
    return a;
}

double rayleigh_distance(const SystemConfig &cfg)
{
    const double d_ris = 0.5 * cfg.wavelength * static_cast<double>(cfg.N());
    return 2.0 * d_ris * d_ris / cfg.wavelength;
}

double mimo_rayleigh_distance(const SystemConfig &cfg)
{
    const double d_ris = 0.5 * cfg.wavelength * static_cast<double>(cfg.N());
    const double d_bs = 0.5 * cfg.wavelength * static_cast<double>(cfg.M());
    return 2.0 * (d_ris + d_bs) * (d_ris + d_bs) / cfg.wavelength;
}

Regime classify_regime(Link link, double distance, const SystemConfig &cfg)
{
    const double boundary = link == Link::RisUser ? rayleigh_distance(cfg) : mimo_rayleigh_distance(cfg);
    return distance <= boundary ? Regime::Near : Regime::Far;
}

Regime resolve_regime(Link link, double distance, const SystemConfig &cfg)
{
    const RegimePolicy policy = link == Link::RisUser ? cfg.ris_user_regime : cfg.bs_ris_regime;
    switch (policy)
    {
    case RegimePolicy::ForcedNear:
        return Regime::Near;
    case RegimePolicy::ForcedFar:
        return Regime::Far;
    case RegimePolicy::Auto:
        break;
    }
    return classify_regime(link, distance, cfg);
}

double gain_normalization(const SystemConfig &cfg, Link link, std::size_t user)
{
    if (link == Link::RisUser)
        return std::sqrt(static_cast<double>(cfg.N() * cfg.L()) / static_cast<double>(cfg.paths_for_user(user)));
    return std::sqrt(static_cast<double>(cfg.M() * cfg.N()) / static_cast<double>(cfg.paths_bsris));
}

std::vector<PathParams> draw_paths(Rng &rng, const SystemConfig &cfg, Link link, double link_distance,
                                   std::size_t user)
{
    if (!(link_distance > 0.0))
        throw ParameterError("draw_paths: link distance must be positive");
    const std::size_t count = link == Link::RisUser ? cfg.paths_for_user(user) : cfg.paths_bsris;
    if (count == 0)
        throw ParameterError("draw_paths: path count must be positive");

    std::uniform_real_distribution<double> angle(0.0, kPi);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> scatter(0.5 * link_distance, 1.5 * link_distance);

    const double gamma = gain_normalization(cfg, link, user);
    double powerlaw_scale = 1.0;
    if (cfg.gain_model == GainModel::PowerLaw)
    {
        const double ref = link == Link::RisUser ? cfg.pathloss_ref_risuser : cfg.pathloss_ref_bsris;
        const double pl = path_loss_powerlaw(link_distance);
        powerlaw_scale = std::sqrt(ref > 0.0 ? pl / path_loss_powerlaw(ref) : pl);
    }

    std::vector<PathParams> paths(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        PathParams &p = paths[i];
        p.elevation_rx = angle(rng);
        p.azimuth_rx = angle(rng);
        p.elevation_tx = angle(rng);
        p.azimuth_tx = angle(rng);
        p.distance_rx = scatter(rng);
        p.distance_tx = scatter(rng);
        p.los = (i == 0);

        switch (cfg.gain_model)
        {
        case GainModel::Normalized:
        case GainModel::PowerLaw:
        {
            const double psi = angle(rng);
            p.gain = std::polar(gamma * powerlaw_scale * psi, phase(rng));
            break;
        }
        case GainModel::LogNormal:
        {
            const double pl_db = path_loss_lognormal(link_distance, p.los, rng);
            const double variance = gamma * gamma * std::pow(10.0, -0.1 * pl_db);
            std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
            const double re = normal(rng);
            const double im = normal(rng);
            p.gain = cdouble(re, im);
            break;
        }
        }
    }
    return paths;
}

CMatrix gen_ris_user_channel(const std::vector<PathParams> &paths, Regime regime, const SystemConfig &cfg)
{
    if (paths.empty())
        throw ParameterError("gen_ris_user_channel: no paths");
    CMatrix H = CMatrix::Zero(cfg.N(), cfg.L());
    for (const PathParams &p : paths)
    {
        const CVector rx = regime == Regime::Near
                               ? near_field_response(cfg.ris, p.distance_rx, p.elevation_rx, p.azimuth_rx,
                                                     cfg.wavelength)
                               : far_field_response(cfg.ris, p.elevation_rx, p.azimuth_rx);
        const CVector tx = far_field_response(cfg.ue, p.elevation_tx, p.azimuth_tx);
        H.noalias() += p.gain * rx * tx.adjoint();
    }
    return H;
}

CMatrix gen_bs_ris_channel(const std::vector<PathParams> &paths, Regime regime, const SystemConfig &cfg)
{
    if (paths.empty())
        throw ParameterError("gen_bs_ris_channel: no paths");
    CMatrix F = CMatrix::Zero(cfg.M(), cfg.N());
    for (const PathParams &p : paths)
    {
        CVector rx, tx;
        if (regime == Regime::Near)
        {
            rx = near_field_response(cfg.bs, p.distance_rx, p.elevation_rx, p.azimuth_rx, cfg.wavelength);
            tx = near_field_response(cfg.ris, p.distance_tx, p.elevation_tx, p.azimuth_tx, cfg.wavelength);
        }
        else
        {
            rx = far_field_response(cfg.bs, p.elevation_rx, p.azimuth_rx);
            tx = far_field_response(cfg.ris, p.elevation_tx, p.azimuth_tx);
        }
        F.noalias() += p.gain * rx * tx.adjoint();
    }
    return F;
}

std::vector<CMatrix> effective_channel(const CMatrix &F, const CMatrix &Hk)
{
    if (F.cols() != Hk.rows())
        throw DimensionError("effective_channel: F has " + std::to_string(F.cols()) + " columns but H_k has " +
                             std::to_string(Hk.rows()) + " rows");
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(Hk.cols()));
    for (Eigen::Index l = 0; l < Hk.cols(); ++l)
        out.emplace_back(F * Hk.col(l).asDiagonal());
    return out;
}

double path_loss_powerlaw(double z)
{
    if (!(z > 0.0))
        throw ParameterError("path_loss_powerlaw: distance must be positive");
    return 1e-2 * std::pow(z, -2.2);
}

LogNormalPathLoss lognormal_parameters(bool los)
{
    return los ? LogNormalPathLoss{61.4, 2.0, 5.8} : LogNormalPathLoss{72.0, 2.92, 8.7};
}

double path_loss_lognormal(double z, bool los, double shadowing_db)
{
    if (!(z > 0.0))
        throw ParameterError("path_loss_lognormal: distance must be positive");
    const auto p = lognormal_parameters(los);
    return p.alpha + 10.0 * p.beta * std::log10(z) + shadowing_db;
}

double path_loss_lognormal(double z, bool los, Rng &rng)
{
    std::normal_distribution<double> shadow(0.0, lognormal_parameters(los).sigma_db);
    return path_loss_lognormal(z, los, shadow(rng));
}

ChannelRealization generate_realization(Rng &rng, const SystemConfig &cfg, std::size_t max_redraws)
{
    cfg.validate();
    ChannelRealization real;
    for (std::size_t attempt = 0; attempt <= max_redraws; ++attempt)
    {
        real.bs_ris_regime = resolve_regime(Link::BsRis, cfg.z_f, cfg);
        const auto fpaths = draw_paths(rng, cfg, Link::BsRis, cfg.z_f);
        real.F = gen_bs_ris_channel(fpaths, real.bs_ris_regime, cfg);
        draw_users(rng, cfg, real);
        if (!reference_column_degenerate(real.H.front()))
        {
            real.redraws = attempt;
            real.H_eff = all_effective(real.F, real.H);
            return real;
        }
    }
    throw std::runtime_error("generate_realization: reference column H_1(:,1) degenerate after " +
                             std::to_string(max_redraws) + " redraws");
}

void redraw_user_channels(Rng &rng, const SystemConfig &cfg, ChannelRealization &real, std::size_t max_redraws)
{
    for (std::size_t attempt = 0; attempt <= max_redraws; ++attempt)
    {
        draw_users(rng, cfg, real);
        if (!reference_column_degenerate(real.H.front()))
        {
            real.redraws = attempt;
            real.H_eff = all_effective(real.F, real.H);
            return;
        }
    }
    throw std::runtime_error("redraw_user_channels: reference column H_1(:,1) degenerate after " +
                             std::to_string(max_redraws) + " redraws");
}

MatrixArchive to_archive(const ChannelRealization &real)
{
    MatrixArchive a;
    a.kind = "channel_realization";
    a.add_scalar("users", static_cast<double>(real.users()));
    a.add_scalar("bs_ris_near", real.bs_ris_regime == Regime::Near ? 1.0 : 0.0);
    a.add("F", real.F);
    for (std::size_t k = 0; k < real.H.size(); ++k)
    {
        a.add("H/" + std::to_string(k), real.H[k]);
        a.add_scalar("ris_user_near/" + std::to_string(k), real.ris_user_regimes.at(k) == Regime::Near ? 1.0 : 0.0);
        a.add_scalar("user_distance/" + std::to_string(k), real.user_distances.at(k));
    }
    return a;
}

ChannelRealization channel_from_archive(const MatrixArchive &a)
{
    if (a.kind != "channel_realization")
        throw std::runtime_error("archive kind '" + a.kind + "' is not a channel realization");
    ChannelRealization real;
    const auto users = static_cast<std::size_t>(a.get_scalar("users"));
    real.F = a.get("F");
    real.bs_ris_regime = a.get_scalar("bs_ris_near") != 0.0 ? Regime::Near : Regime::Far;
    for (std::size_t k = 0; k < users; ++k)
    {
        real.H.push_back(a.get("H/" + std::to_string(k)));
        real.ris_user_regimes.push_back(a.get_scalar("ris_user_near/" + std::to_string(k)) != 0.0 ? Regime::Near
                                                                                                  : Regime::Far);
        real.user_distances.push_back(a.get_scalar("user_distance/" + std::to_string(k)));
    }
    real.H_eff = all_effective(real.F, real.H);
    return real;
}

std::string to_string(Regime r)
{
    return r == Regime::Near ? "near" : "far";
}

} // namespace clrajo
