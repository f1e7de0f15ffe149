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

#include "clrajo/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clrajo {

namespace {

CVector unit_modulus(const CMatrix &phi, Eigen::Index col)
{
    return std::sqrt(static_cast<double>(phi.rows())) * phi.col(col);
}

// [X_1; ...; X_K], K L x T
CMatrix stacked_pilots(const PilotSet &pilots)
{
    const Eigen::Index L = pilots.X.front().rows();
    CMatrix out(L * static_cast<Eigen::Index>(pilots.X.size()), pilots.X.front().cols());
    for (std::size_t k = 0; k < pilots.X.size(); ++k)
        out.middleRows(static_cast<Eigen::Index>(k) * L, L) = pilots.X[k];
    return out;
}

// [H_1 ... H_K], N x K L
CMatrix stacked_users(const ChannelRealization &real)
{
    const Eigen::Index N = real.H.front().rows();
    const Eigen::Index L = real.H.front().cols();
    CMatrix out(N, L * static_cast<Eigen::Index>(real.H.size()));
    for (std::size_t k = 0; k < real.H.size(); ++k)
        out.middleCols(static_cast<Eigen::Index>(k) * L, L) = real.H[k];
    return out;
}

} // namespace

PilotSet build_pilots(std::size_t users, std::size_t antennas, std::size_t length, double power)
{
    if (users == 0 || antennas == 0)
        throw ParameterError("build_pilots: users and antennas must be positive");
    if (length < users * antennas)
        throw ParameterError("build_pilots: pilot length " + std::to_string(length) + " below K L = " +
                             std::to_string(users * antennas));
    if (!(power > 0.0))
        throw ParameterError("build_pilots: power must be positive");

    // Unnormalized DFT rows have unit-modulus entries, so each row has norm^2 = T.
    const CMatrix dft = std::sqrt(static_cast<double>(length)) * dft_matrix(length, length);
    const double amp = std::sqrt(power);

    PilotSet set;
    set.power = power;
    set.length = length;
    const auto L = static_cast<Eigen::Index>(antennas);
    for (std::size_t k = 0; k < users; ++k)
        set.X.emplace_back(amp * dft.middleRows(static_cast<Eigen::Index>(k) * L, L));
    return set;
}

std::vector<Subframe> schedule_first_phase(const SystemConfig &cfg, std::size_t col_blocks)
{
    cfg.validate();
    if (col_blocks == 0)
        throw ParameterError("schedule_first_phase: B_c must be positive");
    if (col_blocks > cfg.N())
        throw ParameterError("schedule_first_phase: B_c (" + std::to_string(col_blocks) +
                             ") cannot exceed N (" + std::to_string(cfg.N()) + ")");

    const CMatrix combine = dft_matrix(cfg.M(), cfg.M());
    const CMatrix reflect = dft_matrix(cfg.N(), col_blocks);
    const auto nrf = static_cast<Eigen::Index>(cfg.rf_chains);

    std::vector<Subframe> out;
    out.reserve(cfg.rf_blocks() * col_blocks);
    for (std::size_t b = 0; b < col_blocks; ++b)
    {
        const CVector v = unit_modulus(reflect, static_cast<Eigen::Index>(b));
        for (std::size_t i = 0; i < cfg.rf_blocks(); ++i)
            out.push_back({combine.middleCols(static_cast<Eigen::Index>(i) * nrf, nrf), v});
    }
    return out;
}

std::vector<Subframe> schedule_second_phase(const SystemConfig &cfg, std::size_t row_blocks)
{
    cfg.validate();
    if (row_blocks == 0)
        throw ParameterError("schedule_second_phase: B_r must be positive");
    if (cfg.rf_chains * row_blocks > cfg.M())
        throw ParameterError("schedule_second_phase: N_RF B_r (" + std::to_string(cfg.rf_chains * row_blocks) +
                             ") cannot exceed M (" + std::to_string(cfg.M()) + ")");

    const CMatrix combine = dft_matrix(cfg.M(), cfg.rf_chains * row_blocks);
    const CMatrix reflect = dft_matrix(cfg.N(), cfg.N());
    const auto nrf = static_cast<Eigen::Index>(cfg.rf_chains);

    std::vector<Subframe> out;
    out.reserve(cfg.N() * row_blocks);
    for (std::size_t b = 0; b < row_blocks; ++b)
    {
        const CMatrix c = combine.middleCols(static_cast<Eigen::Index>(b) * nrf, nrf);
        for (std::size_t i = 0; i < cfg.N(); ++i)
            out.push_back({c, unit_modulus(reflect, static_cast<Eigen::Index>(i))});
    }
    return out;
}

ProtocolSchedule build_schedule(const SystemConfig &cfg, std::size_t col_blocks, std::size_t row_blocks,
                                std::size_t pilot_length)
{
    ProtocolSchedule s;
    s.col_blocks = col_blocks;
    s.row_blocks = row_blocks;
    s.first_phase = schedule_first_phase(cfg, col_blocks);
    s.second_phase = schedule_second_phase(cfg, row_blocks);
    const std::size_t T = pilot_length == 0 ? cfg.users * cfg.L() : pilot_length;
    s.pilots = build_pilots(cfg.users, cfg.L(), T, cfg.transmit_power);
    return s;
}

std::size_t training_overhead(const SystemConfig &cfg, std::size_t col_blocks, std::size_t row_blocks)
{
    return cfg.rf_blocks() * col_blocks + cfg.N() * row_blocks;
}

SubframeObservation simulate_subframe(const ChannelRealization &real, const Subframe &subframe,
                                      const PilotSet &pilots, double noise_variance, Rng &rng)
{
    if (real.H.empty() || pilots.X.size() != real.H.size())
        throw DimensionError("simulate_subframe: pilot count does not match user count");
    const Eigen::Index M = real.F.rows();
    const Eigen::Index N = real.F.cols();
    if (subframe.combiner.rows() != M || subframe.reflection.size() != N)
        throw DimensionError("simulate_subframe: schedule does not match the channel dimensions");
    if (pilots.X.front().rows() != real.H.front().cols())
        throw DimensionError("simulate_subframe: pilot rows do not match user antennas");

    const CMatrix X = stacked_pilots(pilots);
    const CMatrix G = real.F * subframe.reflection.asDiagonal() * stacked_users(real); // M x K L
    const CMatrix U = complex_gaussian(rng, static_cast<std::size_t>(M), pilots.length, noise_variance);
    const CMatrix CH = subframe.combiner.adjoint();

    const CMatrix Y = CH * (G * X + U);
    const double energy = pilots.power * static_cast<double>(pilots.length);

    SubframeObservation obs;
    obs.z = Y * X.adjoint() / energy;
    obs.noise = CH * U * X.adjoint() / energy;
    return obs;
}

std::vector<SubframeObservation> simulate_subframes(const ChannelRealization &real,
                                                    const std::vector<Subframe> &subframes, const PilotSet &pilots,
                                                    double noise_variance, Rng &rng)
{
    std::vector<SubframeObservation> out;
    out.reserve(subframes.size());
    for (const Subframe &s : subframes)
        out.push_back(simulate_subframe(real, s, pilots, noise_variance, rng));
    return out;
}

CMatrix assemble_col_observations(const std::vector<CMatrix> &first_phase, const SystemConfig &cfg,
                                  std::size_t col_blocks)
{
    const std::size_t mrf = cfg.rf_blocks();
    if (first_phase.size() != mrf * col_blocks)
        throw DimensionError("assemble_col_observations: expected " + std::to_string(mrf * col_blocks) +
                             " subframes, got " + std::to_string(first_phase.size()));
    if (first_phase.empty())
        throw DimensionError("assemble_col_observations: no subframes");

    const auto M = static_cast<Eigen::Index>(cfg.M());
    const auto nrf = static_cast<Eigen::Index>(cfg.rf_chains);
    const Eigen::Index width = first_phase.front().cols();
    const CMatrix phi = dft_matrix(cfg.M(), cfg.M());

    CMatrix out(M, width * static_cast<Eigen::Index>(col_blocks));
    CMatrix stack(M, width);
    for (std::size_t b = 0; b < col_blocks; ++b)
    {
        for (std::size_t i = 0; i < mrf; ++i)
        {
            const CMatrix &z = first_phase[b * mrf + i];
            if (z.rows() != nrf || z.cols() != width)
                throw DimensionError("assemble_col_observations: subframe shape mismatch");
            stack.middleRows(static_cast<Eigen::Index>(i) * nrf, nrf) = z;
        }
        out.middleCols(static_cast<Eigen::Index>(b) * width, width) = phi * stack;
    }
    return out;
}

std::vector<CMatrix> assemble_row_observations(const std::vector<CMatrix> &second_phase, const SystemConfig &cfg,
                                               std::size_t row_blocks)
{
    const std::size_t N = cfg.N();
    if (second_phase.size() != N * row_blocks)
        throw DimensionError("assemble_row_observations: expected " + std::to_string(N * row_blocks) +
                             " subframes, got " + std::to_string(second_phase.size()));

    const auto nrf = static_cast<Eigen::Index>(cfg.rf_chains);
    const Eigen::Index width = second_phase.front().cols();
    for (const CMatrix &z : second_phase)
        if (z.rows() != nrf || z.cols() != width)
            throw DimensionError("assemble_row_observations: subframe shape mismatch");

    // The reflection matrix is V = sqrt(N) Phi, so V^H / N undoes it.
    const CMatrix undo = dft_matrix(N, N).adjoint() / std::sqrt(static_cast<double>(N));

    std::vector<CMatrix> out(static_cast<std::size_t>(width),
                             CMatrix(nrf * static_cast<Eigen::Index>(row_blocks), static_cast<Eigen::Index>(N)));
    CMatrix block(nrf, static_cast<Eigen::Index>(N));
    for (Eigen::Index c = 0; c < width; ++c)
        for (std::size_t b = 0; b < row_blocks; ++b)
        {
            for (std::size_t i = 0; i < N; ++i)
                block.col(static_cast<Eigen::Index>(i)) = second_phase[b * N + i].col(c);
            out[static_cast<std::size_t>(c)].middleRows(static_cast<Eigen::Index>(b) * nrf, nrf) = block * undo;
        }
    return out;
}

namespace {

void split(const std::vector<SubframeObservation> &obs, std::vector<CMatrix> &z, std::vector<CMatrix> &noise)
{
    z.clear();
    noise.clear();
    for (const auto &o : obs)
    {
        z.push_back(o.z);
        noise.push_back(o.noise);
    }
}

} // namespace

ObservationSet observe(const ChannelRealization &real, const ProtocolSchedule &schedule, const SystemConfig &cfg,
                       Rng &rng)
{
    const double sigma2 = cfg.noise_variance;
    std::vector<CMatrix> z, noise;

    ObservationSet out;
    out.col_blocks = schedule.col_blocks;
    out.row_blocks = schedule.row_blocks;

    split(simulate_subframes(real, schedule.first_phase, schedule.pilots, sigma2, rng), z, noise);
    out.m_col = assemble_col_observations(z, cfg, schedule.col_blocks);
    out.col_noise = assemble_col_observations(noise, cfg, schedule.col_blocks);
    out.sample_count = static_cast<std::size_t>(out.m_col.cols());

    split(simulate_subframes(real, schedule.second_phase, schedule.pilots, sigma2, rng), z, noise);
    out.m_row = assemble_row_observations(z, cfg, schedule.row_blocks);
    out.row_noise = assemble_row_observations(noise, cfg, schedule.row_blocks);
    return out;
}

ObservationSet observe_rows(const ChannelRealization &real, const ProtocolSchedule &schedule,
                            const SystemConfig &cfg, Rng &rng)
{
    std::vector<CMatrix> z, noise;
    ObservationSet out;
    out.col_blocks = schedule.col_blocks;
    out.row_blocks = schedule.row_blocks;
    split(simulate_subframes(real, schedule.second_phase, schedule.pilots, cfg.noise_variance, rng), z, noise);
    out.m_row = assemble_row_observations(z, cfg, schedule.row_blocks);
    out.row_noise = assemble_row_observations(noise, cfg, schedule.row_blocks);
    return out;
}

MatrixArchive to_archive(const ObservationSet &obs)
{
    MatrixArchive a;
    a.kind = "observation_set";
    a.add_scalar("sample_count", static_cast<double>(obs.sample_count));
    a.add_scalar("col_blocks", static_cast<double>(obs.col_blocks));
    a.add_scalar("row_blocks", static_cast<double>(obs.row_blocks));
    a.add_scalar("rows", static_cast<double>(obs.m_row.size()));
    a.add("M_col", obs.m_col);
    a.add("N_col", obs.col_noise);
    for (std::size_t i = 0; i < obs.m_row.size(); ++i)
    {
        a.add("M_row/" + std::to_string(i), obs.m_row[i]);
        a.add("N_row/" + std::to_string(i), obs.row_noise.at(i));
    }
    return a;
}

ObservationSet observations_from_archive(const MatrixArchive &a)
{
    if (a.kind != "observation_set")
        throw std::runtime_error("archive kind '" + a.kind + "' is not an observation set");
    ObservationSet obs;
    obs.sample_count = static_cast<std::size_t>(a.get_scalar("sample_count"));
    obs.col_blocks = static_cast<std::size_t>(a.get_scalar("col_blocks"));
    obs.row_blocks = static_cast<std::size_t>(a.get_scalar("row_blocks"));
    obs.m_col = a.get("M_col");
    obs.col_noise = a.get("N_col");
    const auto rows = static_cast<std::size_t>(a.get_scalar("rows"));
    for (std::size_t i = 0; i < rows; ++i)
    {
        obs.m_row.push_back(a.get("M_row/" + std::to_string(i)));
        obs.row_noise.push_back(a.get("N_row/" + std::to_string(i)));
    }
    return obs;
}

} // namespace clrajo
