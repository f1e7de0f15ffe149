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

// Command line front end: run | validate | demo.

#include "clrajo/config_io.hpp"
#include "clrajo/harness.hpp"
#include "clrajo/report_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int run_demo()
{
    clrajo::TrialConfig cfg;
    cfg.system.noise_variance = 0.0;
    const std::size_t trials = 5;
    bool pass = true;
    for (std::size_t t = 0; t < trials; ++t)
    {
        const clrajo::TrialRecord rec = clrajo::run_trial(cfg, clrajo::derive_seed(2024, 0, t));
        if (!rec.ok)
        {
            std::printf("trial %zu failed: %s\n", t, rec.error.c_str());
            pass = false;
            continue;
        }
        for (const auto &r : rec.results)
        {
            const bool ok = r.nmse < 1e-12;
            std::printf("trial %zu %-8s rank %zu nmse %.3e %s\n", t, clrajo::to_string(r.kind).c_str(), r.rank_hat,
                        r.nmse, ok ? "ok" : "too large");
            pass = pass && ok;
        }
    }
    std::printf("noiseless exactness check: %s\n", pass ? "PASS" : "FAIL");
    return pass ? kOk : kRuntimeError;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Cascaded channel estimation for XL-RIS assisted multi-user MIMO"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv";
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    auto *run = app.add_subcommand("run", "Run a Monte Carlo experiment and write a report");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_path, "Report path")->required();
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto *seed_opt = run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--threads", threads, "Worker threads, 0 = all cores");

    auto *validate = app.add_subcommand("validate", "Check an experiment config");
    validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

    auto *demo = app.add_subcommand("demo", "Noiseless exactness check on the default system");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*demo)
        return run_demo();

    clrajo::ExperimentConfig cfg;
    try
    {
        cfg = clrajo::load_experiment_config(config_path);
    }
    catch (const clrajo::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    if (*validate)
    {
        std::cout << config_path << ": ok (" << cfg.sweep.size() << " points x " << cfg.trials << " trials)\n";
        return kOk;
    }

    if (*seed_opt)
        cfg.seed = seed;
    try
    {
        const clrajo::NMSEReport report =
            cfg.two_phase ? clrajo::run_two_phase(cfg, threads) : clrajo::run_experiment(cfg, threads);
        clrajo::emit_report(report, clrajo::parse_report_format(format), out_path);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kOk;
}
