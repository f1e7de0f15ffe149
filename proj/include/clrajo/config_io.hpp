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

#ifndef CLRAJO_CONFIG_IO_HPP
#define CLRAJO_CONFIG_IO_HPP

#include "clrajo/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace clrajo {

// Malformed, unknown or out-of-range configuration entries.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// JSON keys mirror the field names of ExperimentConfig / SystemConfig.
// Missing keys keep their defaults, unknown keys are rejected.
//
//   {
//     "system": { "bs": [8, 4], "ris": [8, 4], "ue": [2, 2], "users": 4, ... },
//     "sweep": { "axis": "snr_db", "values": [-10, -5, 0, 5, 10] },
//     "category": "far-near", "trials": 200, "seed": 1,
//     "estimators": ["clra_jo", "clra_ls"], "t_max": 10,
//     "col_blocks": 6, "row_blocks": 1,
//     "snr_db": 0, "snr_convention": "transmit_power", "pilot_length": 0,
//     "two_phase": { "T_f": 6, "T_h": 1 }
//   }
nlohmann::json system_config_to_json(const SystemConfig &cfg);
SystemConfig system_config_from_json(const nlohmann::json &j);

nlohmann::json experiment_config_to_json(const ExperimentConfig &cfg);
// Parses and validates; every failure surfaces as ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json &j);

ExperimentConfig parse_experiment_config(const std::string &text);
ExperimentConfig load_experiment_config(const std::filesystem::path &path);

} // namespace clrajo

#endif
