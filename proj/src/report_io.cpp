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

#include "clrajo/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace clrajo {

using nlohmann::json;

namespace {

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

EstimatorKind estimator_from_name(const std::string &s)
{
    if (s == "clra_jo")
        return EstimatorKind::ClraJo;
    if (s == "clra_ls")
        return EstimatorKind::ClraLs;
    throw std::runtime_error("report: unknown estimator '" + s + "'");
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

} // namespace

std::string report_to_csv(const NMSEReport &report)
{
    std::ostringstream os;
    os << "axis_value,estimator,mean_nmse,stderr,trials,rank_recovery_rate,seed,failed,overhead,"
          "cumulative_overhead,slot\n";
    for (const PointSummary &p : report.points)
        for (const EstimatorSummary &e : p.estimators)
        {
            os << p.axis_value << ',' << to_string(e.kind) << ',' << num(e.mean_nmse) << ',' << num(e.stderr_nmse)
               << ',' << e.trials << ',' << num(e.rank_recovery_rate) << ',' << report.seed << ',' << e.failed << ','
               << p.overhead << ',' << p.cumulative_overhead << ',';
            if (p.slot)
                os << *p.slot;
            os << '\n';
        }
    return os.str();
}

json report_to_json(const NMSEReport &report)
{
    json j;
    j["axis"] = report.axis;
    j["seed"] = report.seed;
    j["config_hash"] = report.config_hash;
    j["config"] = report.config_json.empty() ? json(nullptr) : json::parse(report.config_json);
    j["points"] = json::array();
    for (const PointSummary &p : report.points)
    {
        json jp;
        jp["axis_value"] = p.axis_value;
        jp["slot"] = p.slot ? json(*p.slot) : json(nullptr);
        jp["overhead"] = p.overhead;
        jp["cumulative_overhead"] = p.cumulative_overhead;
        jp["estimators"] = json::array();
        for (const EstimatorSummary &e : p.estimators)
        {
            jp["estimators"].push_back({{"estimator", to_string(e.kind)},
                                        {"mean_nmse", e.mean_nmse},
                                        {"stderr", e.stderr_nmse},
                                        {"trials", e.trials},
                                        {"failed", e.failed},
                                        {"rank_recovery_rate", e.rank_recovery_rate},
                                        {"mean_loss", e.mean_loss},
                                        {"trial_nmse", e.trial_nmse},
                                        {"trial_rank", e.trial_rank}});
        }
        j["points"].push_back(std::move(jp));
    }
    return j;
}

NMSEReport report_from_json(const json &j)
{
    NMSEReport r;
    try
    {
        r.axis = j.at("axis").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.config_hash = j.at("config_hash").get<std::string>();
        if (!j.at("config").is_null())
            r.config_json = j.at("config").dump();
        for (const json &jp : j.at("points"))
        {
            PointSummary p;
            p.axis_value = jp.at("axis_value").get<std::string>();
            if (!jp.at("slot").is_null())
                p.slot = jp.at("slot").get<std::size_t>();
            p.overhead = jp.at("overhead").get<std::size_t>();
            p.cumulative_overhead = jp.at("cumulative_overhead").get<std::size_t>();
            for (const json &je : jp.at("estimators"))
            {
                EstimatorSummary e;
                e.kind = estimator_from_name(je.at("estimator").get<std::string>());
                e.mean_nmse = je.at("mean_nmse").get<double>();
                e.stderr_nmse = je.at("stderr").get<double>();
                e.trials = je.at("trials").get<std::size_t>();
                e.failed = je.at("failed").get<std::size_t>();
                e.rank_recovery_rate = je.at("rank_recovery_rate").get<double>();
                e.mean_loss = je.at("mean_loss").get<std::vector<double>>();
                e.trial_nmse = je.at("trial_nmse").get<std::vector<double>>();
                e.trial_rank = je.at("trial_rank").get<std::vector<std::size_t>>();
                p.estimators.push_back(std::move(e));
            }
            r.points.push_back(std::move(p));
        }
    }
    catch (const json::exception &e)
    {
        throw std::runtime_error(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string loss_to_csv(const NMSEReport &report)
{
    std::ostringstream os;
    os << "axis_value,slot,estimator,iteration,mean_loss\n";
    for (const PointSummary &p : report.points)
        for (const EstimatorSummary &e : p.estimators)
            for (std::size_t i = 0; i < e.mean_loss.size(); ++i)
            {
                os << p.axis_value << ',';
                if (p.slot)
                    os << *p.slot;
                os << ',' << to_string(e.kind) << ',' << i << ',' << num(e.mean_loss[i]) << '\n';
            }
    return os.str();
}

void emit_report(const NMSEReport &report, ReportFormat format, const std::filesystem::path &path)
{
    if (format == ReportFormat::Csv)
        write_text(path, report_to_csv(report));
    else
        write_text(path, report_to_json(report).dump(2) + "\n");
}

NMSEReport read_report_json(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    json j;
    try
    {
        in >> j;
    }
    catch (const json::exception &e)
    {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return report_from_json(j);
}

ReportFormat parse_report_format(const std::string &name)
{
    if (name == "csv")
        return ReportFormat::Csv;
    if (name == "json")
        return ReportFormat::Json;
    throw std::invalid_argument("format must be csv or json");
}

} // namespace clrajo
