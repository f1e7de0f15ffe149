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

#ifndef CLRAJO_HARNESS_HPP
#define CLRAJO_HARNESS_HPP

#include "clrajo/channel.hpp"
#include "clrajo/estimator.hpp"
#include "clrajo/numerics.hpp"
#include "clrajo/protocol.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace clrajo {

enum class SweepAxis { SnrDb, ColBlocks, Users, DistanceScenario };

// Auto keeps the system's own regime policies.
enum class ChannelCategory { Auto, FarFar, FarNear, NearNear };

enum class EstimatorKind { ClraJo, ClraLs };

// TransmitPower: sigma^2 = system noise_variance, P = sigma^2 10^(snr/10).
// PathLoss: sigma^2 = 10^(-(PL(z_h) + PL(z_f)) / 10) from the LOS log-normal
// model without shadowing (z_h at the centre of its range), P as above.
enum class SnrConvention { TransmitPower, PathLoss };

struct Sweep {
    SweepAxis axis = SweepAxis::SnrDb;
    std::vector<double> values;                // numeric axes
    std::vector<ChannelCategory> scenarios;    // DistanceScenario axis

    std::size_t size() const { return axis == SweepAxis::DistanceScenario ? scenarios.size() : values.size(); }
    std::string label(std::size_t point) const;
};

struct TwoPhaseParams {
    double T_f = 6.0; // BS-RIS coherence time
    double T_h = 1.0; // RIS-user coherence time
};

struct ExperimentConfig {
    SystemConfig system;
    Sweep sweep;
    ChannelCategory category = ChannelCategory::Auto;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::vector<EstimatorKind> estimators{EstimatorKind::ClraJo, EstimatorKind::ClraLs};
    std::size_t t_max = 10;
    std::size_t col_blocks = 6; // B_c
    std::size_t row_blocks = 1; // B_r
    std::optional<double> snr_db;
    SnrConvention snr_convention = SnrConvention::TransmitPower;
    std::size_t pilot_length = 0; // 0 selects K L
    std::optional<TwoPhaseParams> two_phase;

    // Throws ParameterError on the first violated invariant.
    void validate() const;
};

// Fully resolved settings of one sweep point.
struct TrialConfig {
    SystemConfig system;
    std::size_t col_blocks = 6;
    std::size_t row_blocks = 1;
    std::size_t t_max = 10;
    std::size_t pilot_length = 0;
    std::vector<EstimatorKind> estimators{EstimatorKind::ClraJo, EstimatorKind::ClraLs};
};

struct EstimatorTrial {
    EstimatorKind kind = EstimatorKind::ClraJo;
    double nmse = 0.0;
    std::size_t rank_hat = 0;
    std::vector<double> loss_trajectory;
};

struct TrialRecord {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::size_t true_rank = 0; // numerical rank of F
    std::vector<EstimatorTrial> results;
};

struct EstimatorSummary {
    EstimatorKind kind = EstimatorKind::ClraJo;
    double mean_nmse = 0.0;
    double stderr_nmse = 0.0;
    std::size_t trials = 0; // configured trial count
    std::size_t failed = 0; // excluded from the means
    double rank_recovery_rate = 0.0; // rank_hat == paths_bsris among successful trials
    std::vector<double> mean_loss;
    std::vector<double> trial_nmse; // successful trials, in trial order
    std::vector<std::size_t> trial_rank;
};

struct PointSummary {
    std::string axis_value;
    std::optional<std::size_t> slot; // two-phase coherence slot
    std::size_t overhead = 0;        // subframes spent on this point (per slot for two-phase)
    std::size_t cumulative_overhead = 0;
    std::vector<EstimatorSummary> estimators;
};

struct NMSEReport {
    std::string axis;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string config_json; // echo of the experiment config
    std::vector<PointSummary> points;
};

// (1/K) sum_k ||H_hat_k - H_k||_F^2 / ||H_k||_F^2 where user k's effective
// channel is the stack of its L matrices (index k L + l).
double nmse(const std::vector<CMatrix> &H_hat, const std::vector<CMatrix> &H_true, std::size_t users);

// Stable per-trial seed derived from (master, point, trial).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial);

// Distances placing both links in the requested regimes, expressed as the
// same fractions of the Rayleigh distances used by the reference XL setup
// (z_f = 150 m / 250 m against Z_MRD = 196.608 m, z_h in [20, 30] m /
// [60, 70] m against Z_RD = 49.152 m).
void apply_scenario(SystemConfig &sys, ChannelCategory scenario);
void apply_category(SystemConfig &sys, ChannelCategory category);
void apply_snr(SystemConfig &sys, double snr_db, SnrConvention convention);

TrialConfig point_config(const ExperimentConfig &cfg, std::size_t point);

TrialRecord run_trial(const TrialConfig &cfg, std::uint64_t seed);

// Records of one T_f window: slot 0 runs the full protocol, later slots
// reuse the subspace of slot 0 and train only the second part.
std::vector<TrialRecord> run_two_phase_window(const TrialConfig &cfg, std::size_t slots, std::uint64_t seed);

EstimatorSummary summarize(EstimatorKind kind, const std::vector<TrialRecord> &records, std::size_t expected_rank);

// threads == 0 uses std::thread::hardware_concurrency(). Results do not
// depend on the thread count.
NMSEReport run_experiment(const ExperimentConfig &cfg, std::size_t threads = 1);
NMSEReport run_two_phase(const ExperimentConfig &cfg, std::size_t threads = 1);

std::size_t two_phase_slots(const TwoPhaseParams &p);

std::string to_string(SweepAxis axis);
std::string to_string(ChannelCategory category);
std::string to_string(EstimatorKind kind);
std::string to_string(SnrConvention convention);

} // namespace clrajo

#endif
