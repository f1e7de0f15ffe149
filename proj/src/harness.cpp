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

#include "clrajo/harness.hpp"

#include "clrajo/config_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace clrajo {

namespace {

// Fractions of the Rayleigh distances in the reference XL setup.
constexpr double kBsRisNear = 150.0 / 196.608;
constexpr double kBsRisFar = 250.0 / 196.608;
constexpr double kUserNearMin = 20.0 / 49.152;
constexpr double kUserNearMax = 30.0 / 49.152;
constexpr double kUserFarMin = 60.0 / 49.152;
constexpr double kUserFarMax = 70.0 / 49.152;

std::uint64_t mix64(std::uint64_t x)
{
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void for_each_index(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &fn)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                fn(i);
        });
}

std::vector<EstimatorTrial> run_estimators(const TrialConfig &cfg, const SubspaceEstimate &sub,
                                           const std::vector<CMatrix> &m_rows, const ChannelRealization &real)
{
    EstimatorOptions opts;
    opts.t_max = cfg.t_max;
    opts.row_blocks = cfg.row_blocks;

    std::vector<EstimatorTrial> out;
    for (EstimatorKind kind : cfg.estimators)
    {
        const EstimatorOutput est = kind == EstimatorKind::ClraJo ? clra_jo(sub, m_rows, cfg.system, opts)
                                                                  : clra_ls(sub, m_rows, cfg.system, opts);
        EstimatorTrial t;
        t.kind = kind;
        t.nmse = nmse(est.H_eff_hat, real.H_eff, cfg.system.users);
        t.rank_hat = est.rank_hat;
        t.loss_trajectory = est.loss_trajectory;
        out.push_back(std::move(t));
    }
    return out;
}

std::string config_fingerprint(const std::string &text)
{
    // FNV-1a, 64 bit
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

NMSEReport start_report(const ExperimentConfig &cfg)
{
    NMSEReport report;
    report.axis = cfg.two_phase ? "slot" : to_string(cfg.sweep.axis);
    report.seed = cfg.seed;
    report.config_json = experiment_config_to_json(cfg).dump();
    report.config_hash = config_fingerprint(report.config_json);
    return report;
}

} // namespace

std::string Sweep::label(std::size_t point) const
{
    if (axis == SweepAxis::DistanceScenario)
        return to_string(scenarios.at(point));
    return format_number(values.at(point));
}

void ExperimentConfig::validate() const
{
    system.validate();
    if (trials == 0)
        throw ParameterError("trials must be at least 1");
    if (sweep.size() == 0)
        throw ParameterError("sweep needs at least one value");
    if (sweep.axis == SweepAxis::ColBlocks || sweep.axis == SweepAxis::Users)
        for (double v : sweep.values)
            if (!(v >= 1.0) || v != std::floor(v))
                throw ParameterError("sweep values for " + to_string(sweep.axis) + " must be positive integers");
    if (sweep.axis == SweepAxis::DistanceScenario)
        for (ChannelCategory c : sweep.scenarios)
            if (c == ChannelCategory::Auto)
                throw ParameterError("distance_scenario values must be far-far, far-near or near-near");
    if (estimators.empty())
        throw ParameterError("at least one estimator is required");
    if (col_blocks == 0 || row_blocks == 0)
        throw ParameterError("col_blocks and row_blocks must be positive");
    if (col_blocks > system.N())
        throw ParameterError("col_blocks cannot exceed N");
    if (system.rf_chains * row_blocks > system.M())
        throw ParameterError("rf_chains * row_blocks cannot exceed M");
    if (snr_convention == SnrConvention::TransmitPower && (snr_db || sweep.axis == SweepAxis::SnrDb) &&
        !(system.noise_variance > 0.0))
        throw ParameterError("an SNR setting needs a positive noise_variance");
    if (two_phase)
        two_phase_slots(*two_phase);
}

double nmse(const std::vector<CMatrix> &H_hat, const std::vector<CMatrix> &H_true, std::size_t users)
{
    if (users == 0)
        throw ParameterError("nmse: users must be positive");
    if (H_hat.size() != H_true.size() || H_true.size() % users != 0 || H_true.empty())
        throw DimensionError("nmse: expected matching lists of K L effective channels");
    const std::size_t L = H_true.size() / users;

    double total = 0.0;
    for (std::size_t k = 0; k < users; ++k)
    {
        double err = 0.0, ref = 0.0;
        for (std::size_t l = 0; l < L; ++l)
        {
            const CMatrix &h = H_true[k * L + l];
            const CMatrix &e = H_hat[k * L + l];
            if (e.rows() != h.rows() || e.cols() != h.cols())
                throw DimensionError("nmse: shape mismatch");
            err += (e - h).squaredNorm();
            ref += h.squaredNorm();
        }
        if (!(ref > 0.0))
            throw ParameterError("nmse: user " + std::to_string(k) + " has a zero-norm true channel");
        total += err / ref;
    }
    return total / static_cast<double>(users);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial)
{
    return mix64(mix64(mix64(master) ^ point) ^ trial);
}

void apply_scenario(SystemConfig &sys, ChannelCategory scenario)
{
    if (scenario == ChannelCategory::Auto)
        return;
    const double zmrd = mimo_rayleigh_distance(sys);
    const double zrd = rayleigh_distance(sys);
    const bool bs_near = scenario == ChannelCategory::NearNear;
    const bool user_near = scenario != ChannelCategory::FarFar;
    sys.z_f = (bs_near ? kBsRisNear : kBsRisFar) * zmrd;
    sys.z_h_min = (user_near ? kUserNearMin : kUserFarMin) * zrd;
    sys.z_h_max = (user_near ? kUserNearMax : kUserFarMax) * zrd;
    apply_category(sys, scenario);
}

void apply_category(SystemConfig &sys, ChannelCategory category)
{
    switch (category)
    {
    case ChannelCategory::Auto:
        return;
    case ChannelCategory::FarFar:
        sys.bs_ris_regime = RegimePolicy::ForcedFar;
        sys.ris_user_regime = RegimePolicy::ForcedFar;
        return;
    case ChannelCategory::FarNear:
        sys.bs_ris_regime = RegimePolicy::ForcedFar;
        sys.ris_user_regime = RegimePolicy::ForcedNear;
        return;
    case ChannelCategory::NearNear:
        sys.bs_ris_regime = RegimePolicy::ForcedNear;
        sys.ris_user_regime = RegimePolicy::ForcedNear;
        return;
    }
}

void apply_snr(SystemConfig &sys, double snr_db, SnrConvention convention)
{
    if (convention == SnrConvention::PathLoss)
    {
        const double z_h = 0.5 * (sys.z_h_min + sys.z_h_max);
        const double pl = path_loss_lognormal(z_h, true, 0.0) + path_loss_lognormal(sys.z_f, true, 0.0);
        sys.noise_variance = std::pow(10.0, -0.1 * pl);
    }
    if (!(sys.noise_variance > 0.0))
        throw ParameterError("apply_snr: noise variance must be positive");
    sys.transmit_power = sys.noise_variance * std::pow(10.0, snr_db / 10.0);
}

TrialConfig point_config(const ExperimentConfig &cfg, std::size_t point)
{
    TrialConfig t;
    t.system = cfg.system;
    t.col_blocks = cfg.col_blocks;
    t.row_blocks = cfg.row_blocks;
    t.t_max = cfg.t_max;
    t.pilot_length = cfg.pilot_length;
    t.estimators = cfg.estimators;

    apply_category(t.system, cfg.category);
    std::optional<double> snr = cfg.snr_db;
    switch (cfg.sweep.axis)
    {
    case SweepAxis::SnrDb:
        snr = cfg.sweep.values.at(point);
        break;
    case SweepAxis::ColBlocks:
        t.col_blocks = static_cast<std::size_t>(cfg.sweep.values.at(point));
        break;
    case SweepAxis::Users:
        t.system.users = static_cast<std::size_t>(cfg.sweep.values.at(point));
        if (t.system.paths_risuser.size() != 1)
            t.system.paths_risuser.resize(t.system.users, t.system.paths_risuser.front());
        break;
    case SweepAxis::DistanceScenario:
        apply_scenario(t.system, cfg.sweep.scenarios.at(point));
        break;
    }
    if (snr)
        apply_snr(t.system, *snr, cfg.snr_convention);
    return t;
}

TrialRecord run_trial(const TrialConfig &cfg, std::uint64_t seed)
{
    TrialRecord rec;
    rec.seed = seed;
    try
    {
        Rng rng(seed);
        const ChannelRealization real = generate_realization(rng, cfg.system);
        rec.true_rank = numerical_rank(real.F);
        const ProtocolSchedule schedule =
            build_schedule(cfg.system, cfg.col_blocks, cfg.row_blocks, cfg.pilot_length);
        const ObservationSet obs = observe(real, schedule, cfg.system, rng);
        const SubspaceEstimate sub = estimate_subspace(obs.m_col, cfg.system.rf_chains * cfg.row_blocks);
        rec.results = run_estimators(cfg, sub, obs.m_row, real);
        rec.ok = true;
    }
    catch (const std::exception &e)
    {
        rec.ok = false;
        rec.error = e.what();
        rec.results.clear();
    }
    return rec;
}

std::vector<TrialRecord> run_two_phase_window(const TrialConfig &cfg, std::size_t slots, std::uint64_t seed)
{
    std::vector<TrialRecord> out(slots);
    for (auto &r : out)
        r.seed = seed;
    std::size_t slot = 0;
    try
    {
        Rng rng(seed);
        ChannelRealization real = generate_realization(rng, cfg.system);
        const std::size_t true_rank = numerical_rank(real.F);
        const ProtocolSchedule schedule =
            build_schedule(cfg.system, cfg.col_blocks, cfg.row_blocks, cfg.pilot_length);

        const ObservationSet first = observe(real, schedule, cfg.system, rng);
        const SubspaceEstimate sub = estimate_subspace(first.m_col, cfg.system.rf_chains * cfg.row_blocks);
        out[0].results = run_estimators(cfg, sub, first.m_row, real);
        out[0].true_rank = true_rank;
        out[0].ok = true;

        for (slot = 1; slot < slots; ++slot)
        {
            redraw_user_channels(rng, cfg.system, real);
            const ObservationSet rows = observe_rows(real, schedule, cfg.system, rng);
            out[slot].results = run_estimators(cfg, sub, rows.m_row, real);
            out[slot].true_rank = true_rank;
            out[slot].ok = true;
        }
    }
    catch (const std::exception &e)
    {
        for (std::size_t s = slot; s < slots; ++s)
        {
            out[s].ok = false;
            out[s].error = e.what();
            out[s].results.clear();
        }
    }
    return out;
}

EstimatorSummary summarize(EstimatorKind kind, const std::vector<TrialRecord> &records, std::size_t expected_rank)
{
    EstimatorSummary s;
    s.kind = kind;
    s.trials = records.size();

    std::size_t recovered = 0;
    std::size_t loss_count = 0;
    for (const TrialRecord &rec : records)
    {
        const EstimatorTrial *hit = nullptr;
        if (rec.ok)
            for (const EstimatorTrial &t : rec.results)
                if (t.kind == kind)
                    hit = &t;
        if (hit == nullptr)
        {
            ++s.failed;
            continue;
        }
        s.trial_nmse.push_back(hit->nmse);
        s.trial_rank.push_back(hit->rank_hat);
        if (hit->rank_hat == expected_rank)
            ++recovered;
        if (!hit->loss_trajectory.empty())
        {
            if (s.mean_loss.size() < hit->loss_trajectory.size())
                s.mean_loss.resize(hit->loss_trajectory.size(), 0.0);
            for (std::size_t i = 0; i < hit->loss_trajectory.size(); ++i)
                s.mean_loss[i] += hit->loss_trajectory[i];
            ++loss_count;
        }
    }

    const std::size_t n = s.trial_nmse.size();
    if (n > 0)
    {
        double sum = 0.0;
        for (double v : s.trial_nmse)
            sum += v;
        s.mean_nmse = sum / static_cast<double>(n);
        if (n > 1)
        {
            double ss = 0.0;
            for (double v : s.trial_nmse)
                ss += (v - s.mean_nmse) * (v - s.mean_nmse);
            s.stderr_nmse = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
        }
        s.rank_recovery_rate = static_cast<double>(recovered) / static_cast<double>(n);
    }
    for (double &v : s.mean_loss)
        v /= static_cast<double>(std::max<std::size_t>(loss_count, 1));
    return s;
}

NMSEReport run_experiment(const ExperimentConfig &cfg, std::size_t threads)
{
    cfg.validate();
    NMSEReport report = start_report(cfg);
    report.axis = to_string(cfg.sweep.axis);

    const std::size_t points = cfg.sweep.size();
    std::vector<TrialConfig> setups;
    for (std::size_t p = 0; p < points; ++p)
        setups.push_back(point_config(cfg, p));

    std::vector<TrialRecord> records(points * cfg.trials);
    for_each_index(records.size(), threads, [&](std::size_t idx) {
        const std::size_t p = idx / cfg.trials;
        const std::size_t t = idx % cfg.trials;
        records[idx] = run_trial(setups[p], derive_seed(cfg.seed, p, t));
    });

    for (std::size_t p = 0; p < points; ++p)
    {
        const std::vector<TrialRecord> slice(records.begin() + static_cast<std::ptrdiff_t>(p * cfg.trials),
                                             records.begin() + static_cast<std::ptrdiff_t>((p + 1) * cfg.trials));
        PointSummary ps;
        ps.axis_value = cfg.sweep.label(p);
        ps.overhead = training_overhead(setups[p].system, setups[p].col_blocks, setups[p].row_blocks);
        ps.cumulative_overhead = ps.overhead;
        for (EstimatorKind kind : cfg.estimators)
            ps.estimators.push_back(summarize(kind, slice, setups[p].system.paths_bsris));
        report.points.push_back(std::move(ps));
    }
    return report;
}

std::size_t two_phase_slots(const TwoPhaseParams &p)
{
    if (!(p.T_h > 0.0) || !(p.T_f > p.T_h))
        throw ParameterError("two_phase: need T_f > T_h > 0");
    const double ratio = p.T_f / p.T_h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * rounded)
        throw ParameterError("two_phase: T_f must be an integer multiple of T_h");
    return static_cast<std::size_t>(rounded);
}

NMSEReport run_two_phase(const ExperimentConfig &cfg, std::size_t threads)
{
    cfg.validate();
    if (!cfg.two_phase)
        throw ParameterError("run_two_phase: config has no two_phase section");
    const std::size_t slots = two_phase_slots(*cfg.two_phase);
    NMSEReport report = start_report(cfg);

    const std::size_t points = cfg.sweep.size();
    std::vector<TrialConfig> setups;
    for (std::size_t p = 0; p < points; ++p)
        setups.push_back(point_config(cfg, p));

    std::vector<std::vector<TrialRecord>> windows(points * cfg.trials);
    for_each_index(windows.size(), threads, [&](std::size_t idx) {
        const std::size_t p = idx / cfg.trials;
        const std::size_t t = idx % cfg.trials;
        windows[idx] = run_two_phase_window(setups[p], slots, derive_seed(cfg.seed, p, t));
    });

    for (std::size_t p = 0; p < points; ++p)
    {
        const SystemConfig &sys = setups[p].system;
        const std::size_t full = training_overhead(sys, setups[p].col_blocks, setups[p].row_blocks);
        const std::size_t reduced = sys.N() * setups[p].row_blocks;
        std::size_t cumulative = 0;
        for (std::size_t s = 0; s < slots; ++s)
        {
            std::vector<TrialRecord> slice;
            slice.reserve(cfg.trials);
            for (std::size_t t = 0; t < cfg.trials; ++t)
                slice.push_back(windows[p * cfg.trials + t][s]);

            PointSummary ps;
            ps.axis_value = cfg.sweep.label(p);
            ps.slot = s;
            ps.overhead = s == 0 ? full : reduced;
            cumulative += ps.overhead;
            ps.cumulative_overhead = cumulative;
            for (EstimatorKind kind : cfg.estimators)
                ps.estimators.push_back(summarize(kind, slice, sys.paths_bsris));
            report.points.push_back(std::move(ps));
        }
    }
    return report;
}

std::string to_string(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::SnrDb:
        return "snr_db";
    case SweepAxis::ColBlocks:
        return "col_blocks";
    case SweepAxis::Users:
        return "users";
    case SweepAxis::DistanceScenario:
        return "distance_scenario";
    }
    return "?";
}

std::string to_string(ChannelCategory category)
{
    switch (category)
    {
    case ChannelCategory::Auto:
        return "auto";
    case ChannelCategory::FarFar:
        return "far-far";
    case ChannelCategory::FarNear:
        return "far-near";
    case ChannelCategory::NearNear:
        return "near-near";
    }
    return "?";
}

std::string to_string(EstimatorKind kind)
{
    return kind == EstimatorKind::ClraJo ? "clra_jo" : "clra_ls";
}

std::string to_string(SnrConvention convention)
{
    return convention == SnrConvention::TransmitPower ? "transmit_power" : "pathloss";
}

} // namespace clrajo
