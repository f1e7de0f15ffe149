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

#ifndef CLRAJO_REPORT_IO_HPP
#define CLRAJO_REPORT_IO_HPP

#include "clrajo/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace clrajo {

enum class ReportFormat { Csv, Json };

// One row per (point, estimator):
//   axis_value,estimator,mean_nmse,stderr,trials,rank_recovery_rate,seed,
//   failed,overhead,cumulative_overhead,slot
// Numbers are written with 17 significant digits; slot is empty outside
// two-phase runs.
std::string report_to_csv(const NMSEReport &report);

// Same rows plus the config echo, mean loss trajectories and per-trial arrays.
nlohmann::json report_to_json(const NMSEReport &report);
NMSEReport report_from_json(const nlohmann::json &j);

// Rows: axis_value,slot,estimator,iteration,mean_loss
std::string loss_to_csv(const NMSEReport &report);

// Throws std::runtime_error naming the path on I/O failure.
void emit_report(const NMSEReport &report, ReportFormat format, const std::filesystem::path &path);
NMSEReport read_report_json(const std::filesystem::path &path);

ReportFormat parse_report_format(const std::string &name);

} // namespace clrajo

#endif
