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


#include "clrajo/config_io.hpp"
#include "clrajo/report_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace clrajo;

namespace {

const char *kConfig = R"({
  "system": { "bs": [8, 4], "ris": [8, 4], "ue": [2, 2], "users": 2, "rf_chains": 4,
              "paths_bsris": 3, "paths_risuser": [3, 2], "noise_variance": 1.0,
              "gain_model": "normalized", "bs_ris_regime": "auto", "ris_user_regime": "near" },
  "sweep": { "axis": "snr_db", "values": [-5, 5] },
  "category": "far-near",
  "trials": 3,
  "seed": 99,
  "estimators": ["clra_jo", "clra_ls"],
  "t_max": 4,
  "col_blocks": 3,
  "row_blocks": 1
})";

std::filesystem::path scratch()
{
    const auto dir = std::filesystem::temp_directory_path() / "clrajo_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::size_t count_lines(const std::string &s)
{
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n')
            ++n;
    return n;
}

} // namespace

TEST_CASE("config parses and mirrors field names")
{
    const ExperimentConfig cfg = parse_experiment_config(kConfig);
    CHECK(cfg.system.users == 2);
    CHECK(cfg.system.paths_risuser == std::vector<std::size_t>{3, 2});
    CHECK(cfg.system.ris_user_regime == RegimePolicy::ForcedNear);
    CHECK(cfg.sweep.values == std::vector<double>{-5.0, 5.0});
    CHECK(cfg.category == ChannelCategory::FarNear);
    CHECK(cfg.trials == 3);
    CHECK(cfg.seed == 99);
    CHECK(cfg.t_max == 4);
    CHECK(cfg.col_blocks == 3);
    CHECK_FALSE(cfg.two_phase.has_value());

    const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(cfg));
    CHECK(experiment_config_to_json(back) == experiment_config_to_json(cfg));
}

TEST_CASE("config rejects unknown keys and bad values")
{
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[0]},"trails":3})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[0]},"system":{"M":3}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"bogus","values":[0]}})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[]}})"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[0]},"trials":-1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[0]},"trials":"many"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[0]},"estimators":["x"]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[0]},"system":{"rf_chains":5}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"sweep":{"axis":"snr_db","values":[0]},"two_phase":{"T_f":1,"T_h":2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config("{not json"), ConfigError);
    CHECK_THROWS_AS(load_experiment_config(scratch() / "does_not_exist.json"), ConfigError);
}

TEST_CASE("config with distance scenarios and two-phase section")
{
    const ExperimentConfig cfg = parse_experiment_config(R"({
      "sweep": {"axis": "distance_scenario", "values": ["far-far", "near-near"]},
      "two_phase": {"T_f": 6, "T_h": 1}, "snr_db": 0, "snr_convention": "pathloss"})");
    REQUIRE(cfg.sweep.scenarios.size() == 2);
    CHECK(cfg.sweep.scenarios[1] == ChannelCategory::NearNear);
    REQUIRE(cfg.two_phase.has_value());
    CHECK(cfg.two_phase->T_f == 6.0);
    CHECK(cfg.snr_db.value() == 0.0);
    CHECK(cfg.snr_convention == SnrConvention::PathLoss);
    const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(cfg));
    CHECK(back.sweep.scenarios == cfg.sweep.scenarios);
    CHECK(back.two_phase->T_h == 1.0);
}

TEST_CASE("CSV report layout")
{
    NMSEReport empty;
    const std::string header = report_to_csv(empty);
    CHECK(header ==
          "axis_value,estimator,mean_nmse,stderr,trials,rank_recovery_rate,seed,failed,overhead,"
          "cumulative_overhead,slot\n");

    const ExperimentConfig cfg = parse_experiment_config(kConfig);
    const NMSEReport rep = run_experiment(cfg);
    const std::string csv = report_to_csv(rep);
    CHECK(count_lines(csv) == 1 + rep.points.size() * 2);
    CHECK(csv.find("\n-5,clra_jo,") != std::string::npos);
    CHECK(csv.find(",99,") != std::string::npos);
}

TEST_CASE("JSON report round trip")
{
    const ExperimentConfig cfg = parse_experiment_config(kConfig);
    const NMSEReport rep = run_experiment(cfg);
    const nlohmann::json j = report_to_json(rep);
    const NMSEReport back = report_from_json(j);
    CHECK(report_to_json(back) == j);
    CHECK(back.config_hash == rep.config_hash);
    REQUIRE(back.points.size() == rep.points.size());
    CHECK(back.points[1].estimators[0].trial_nmse == rep.points[1].estimators[0].trial_nmse);
    CHECK(back.points[1].estimators[0].mean_loss == rep.points[1].estimators[0].mean_loss);
    CHECK(j.at("config").at("seed") == 99);

    const auto path = scratch() / "report.json";
    emit_report(rep, ReportFormat::Json, path);
    CHECK(report_to_json(read_report_json(path)) == j);

    const auto csv_path = scratch() / "report.csv";
    emit_report(rep, ReportFormat::Csv, csv_path);
    std::ifstream in(csv_path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == report_to_csv(rep));
}

TEST_CASE("loss trajectory CSV")
{
    ExperimentConfig cfg = parse_experiment_config(kConfig);
    cfg.estimators = {EstimatorKind::ClraJo};
    const NMSEReport rep = run_experiment(cfg);
    const std::string csv = loss_to_csv(rep);
    CHECK(count_lines(csv) == 1 + rep.points.size() * (cfg.t_max + 1));
}

TEST_CASE("report I/O errors name the path")
{
    NMSEReport r;
    const auto bad = scratch() / "no_such_dir" / "out.csv";
    try
    {
        emit_report(r, ReportFormat::Csv, bad);
        FAIL("expected an exception");
    }
    catch (const std::runtime_error &e)
    {
        CHECK(std::string(e.what()).find("out.csv") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_report_format("xml"), std::invalid_argument);
    CHECK(parse_report_format("json") == ReportFormat::Json);
}
