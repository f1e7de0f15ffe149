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

#ifndef CLRAJO_PROTOCOL_HPP
#define CLRAJO_PROTOCOL_HPP

#include "clrajo/archive.hpp"
#include "clrajo/channel.hpp"
#include "clrajo/numerics.hpp"

#include <cstddef>
#include <vector>

namespace clrajo {

// Uplink training protocol.
//
// Part one (column sampling) has B_c blocks of M_RF = M / N_RF subframes.
// Subframe i of every block combines with DFT columns [N_RF i, N_RF (i+1))
// of the M x M DFT, and all subframes of block b reflect with the b-th
// column of the N x B_c DFT. Part two (row sampling) has B_r blocks of N
// subframes: block b combines with columns [N_RF b, N_RF (b+1)) of the
// M x (N_RF B_r) DFT and subframe i reflects with column i of the N x N DFT.
// Reflection vectors are DFT columns scaled by sqrt(N) so every entry has
// unit modulus.

struct Subframe {
    CMatrix combiner;   // M x N_RF
    CVector reflection; // N, unit-modulus entries
};

struct PilotSet {
    std::vector<CMatrix> X; // K entries, L x T
    double power = 1.0;
    std::size_t length = 1;
};

struct ProtocolSchedule {
    std::size_t col_blocks = 0; // B_c
    std::size_t row_blocks = 0; // B_r
    std::vector<Subframe> first_phase;
    std::vector<Subframe> second_phase;
    PilotSet pilots;

    // J = M_RF B_c + N B_r
    std::size_t total_subframes() const { return first_phase.size() + second_phase.size(); }
};

// X X^H = P T I for each user's L x T block and X_k X_k'^H = 0 for k != k'.
// Rows are the first K L rows of the unnormalized T-point DFT, times sqrt(P).
PilotSet build_pilots(std::size_t users, std::size_t antennas, std::size_t length, double power);

std::vector<Subframe> schedule_first_phase(const SystemConfig &cfg, std::size_t col_blocks);
std::vector<Subframe> schedule_second_phase(const SystemConfig &cfg, std::size_t row_blocks);

// pilot_length 0 selects the minimum K L.
ProtocolSchedule build_schedule(const SystemConfig &cfg, std::size_t col_blocks, std::size_t row_blocks,
                                std::size_t pilot_length = 0);

std::size_t training_overhead(const SystemConfig &cfg, std::size_t col_blocks, std::size_t row_blocks);

// De-spread observation of one subframe. `z` is the N_RF x K L stack
// [Z_1 ... Z_K]; `noise` is the part of `z` contributed by the receiver noise.
struct SubframeObservation {
    CMatrix z;
    CMatrix noise;
};

// Y = C^H (sum_k F diag(v) H_k X_k + U), U ~ CN(0, noise_variance);
// Z_k = Y X_k^H / (P T).
SubframeObservation simulate_subframe(const ChannelRealization &real, const Subframe &subframe,
                                      const PilotSet &pilots, double noise_variance, Rng &rng);

std::vector<SubframeObservation> simulate_subframes(const ChannelRealization &real,
                                                    const std::vector<Subframe> &subframes, const PilotSet &pilots,
                                                    double noise_variance, Rng &rng);

// M x (B_c K L). Expects exactly M_RF B_c matrices in subframe order.
CMatrix assemble_col_observations(const std::vector<CMatrix> &first_phase, const SystemConfig &cfg,
                                  std::size_t col_blocks);

// K L matrices of size (N_RF B_r) x N, index k L + l. Expects exactly N B_r
// matrices in subframe order.
std::vector<CMatrix> assemble_row_observations(const std::vector<CMatrix> &second_phase, const SystemConfig &cfg,
                                               std::size_t row_blocks);

struct ObservationSet {
    CMatrix m_col;
    std::vector<CMatrix> m_row;
    // Noise terms of m_col and m_row after the same assembly.
    CMatrix col_noise;
    std::vector<CMatrix> row_noise;
    std::size_t sample_count = 0; // columns of m_col, B_c K L
    std::size_t col_blocks = 0;
    std::size_t row_blocks = 0;
};

// Simulates every subframe of the schedule in order and assembles both parts.
ObservationSet observe(const ChannelRealization &real, const ProtocolSchedule &schedule, const SystemConfig &cfg,
                       Rng &rng);

// Second part only; m_col and col_noise are left empty.
ObservationSet observe_rows(const ChannelRealization &real, const ProtocolSchedule &schedule,
                            const SystemConfig &cfg, Rng &rng);

MatrixArchive to_archive(const ObservationSet &obs);
ObservationSet observations_from_archive(const MatrixArchive &archive);

} // namespace clrajo

#endif
