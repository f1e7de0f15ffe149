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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace clrajo {

using nlohmann::json;

namespace {

void check_keys(const json &j, const std::string &where, const std::set<std::string> &allowed)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto &item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

double get_number(const json &j, const std::string &key)
{
    if (!j.is_number())
        throw ConfigError("'" + key + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw ConfigError("'" + key + "' must be finite");
    return v;
}

std::size_t get_count(const json &j, const std::string &key)
{
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        throw ConfigError("'" + key + "' must be a non-negative integer");
    return j.get<std::size_t>();
}

std::string get_string(const json &j, const std::string &key)
{
    if (!j.is_string())
        throw ConfigError("'" + key + "' must be a string");
    return j.get<std::string>();
}

ArraySize get_array(const json &j, const std::string &key)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("'" + key + "' must be [horizontal, vertical]");
    return {get_count(j[0], key), get_count(j[1], key)};
}

RegimePolicy parse_policy(const std::string &s, const std::string &key)
{
    if (s == "auto")
        return RegimePolicy::Auto;
    if (s == "near")
        return RegimePolicy::ForcedNear;
    if (s == "far")
        return RegimePolicy::ForcedFar;
    throw ConfigError("'" + key + "' must be auto, near or far");
}

std::string policy_name(RegimePolicy p)
{
    switch (p)
    {
    case RegimePolicy::Auto:
        return "auto";
    case RegimePolicy::ForcedNear:
        return "near";
    case RegimePolicy::ForcedFar:
        return "far";
    }
    return "auto";
}

GainModel parse_gain(const std::string &s)
{
    if (s == "normalized")
        return GainModel::Normalized;
    if (s == "power_law")
        return GainModel::PowerLaw;
    if (s == "lognormal")
        return GainModel::LogNormal;
    throw ConfigError("'gain_model' must be normalized, power_law or lognormal");
}

std::string gain_name(GainModel g)
{
    switch (g)
    {
    case GainModel::Normalized:
        return "normalized";
    case GainModel::PowerLaw:
        return "power_law";
    case GainModel::LogNormal:
        return "lognormal";
    }
    return "normalized";
}

ChannelCategory parse_category(const std::string &s, bool allow_auto)
{
    if (allow_auto && s == "auto")
        return ChannelCategory::Auto;
    if (s == "far-far")
        return ChannelCategory::FarFar;
    if (s == "far-near")
        return ChannelCategory::FarNear;
    if (s == "near-near")
        return ChannelCategory::NearNear;
    throw ConfigError("unknown channel category '" + s + "'");
}

SweepAxis parse_axis(const std::string &s)
{
    if (s == "snr_db")
        return SweepAxis::SnrDb;
    if (s == "col_blocks")
        return SweepAxis::ColBlocks;
    if (s == "users")
        return SweepAxis::Users;
    if (s == "distance_scenario")
        return SweepAxis::DistanceScenario;
    throw ConfigError("sweep axis must be snr_db, col_blocks, users or distance_scenario");
}

EstimatorKind parse_estimator(const std::string &s)
{
    if (s == "clra_jo")
        return EstimatorKind::ClraJo;
    if (s == "clra_ls")
        return EstimatorKind::ClraLs;
    throw ConfigError("unknown estimator '" + s + "'");
}

SnrConvention parse_convention(const std::string &s)
{
    if (s == "transmit_power")
        return SnrConvention::TransmitPower;
    if (s == "pathloss")
        return SnrConvention::PathLoss;
    throw ConfigError("'snr_convention' must be transmit_power or pathloss");
}

} // namespace

json system_config_to_json(const SystemConfig &c)
{
    json j;
    j["bs"] = {c.bs.horizontal, c.bs.vertical};
    j["ris"] = {c.ris.horizontal, c.ris.vertical};
    j["ue"] = {c.ue.horizontal, c.ue.vertical};
    j["users"] = c.users;
    j["rf_chains"] = c.rf_chains;
    j["wavelength"] = c.wavelength;
    j["paths_bsris"] = c.paths_bsris;
    j["paths_risuser"] = c.paths_risuser;
    j["z_f"] = c.z_f;
    j["z_h_min"] = c.z_h_min;
    j["z_h_max"] = c.z_h_max;
    j["transmit_power"] = c.transmit_power;
    j["noise_variance"] = c.noise_variance;
    j["bs_ris_regime"] = policy_name(c.bs_ris_regime);
    j["ris_user_regime"] = policy_name(c.ris_user_regime);
    j["gain_model"] = gain_name(c.gain_model);
    j["pathloss_ref_bsris"] = c.pathloss_ref_bsris;
    j["pathloss_ref_risuser"] = c.pathloss_ref_risuser;
    return j;
}

SystemConfig system_config_from_json(const json &j)
{
    check_keys(j, "system",
               {"bs", "ris", "ue", "users", "rf_chains", "wavelength", "paths_bsris", "paths_risuser", "z_f",
                "z_h_min", "z_h_max", "transmit_power", "noise_variance", "bs_ris_regime", "ris_user_regime",
                "gain_model", "pathloss_ref_bsris", "pathloss_ref_risuser"});
    SystemConfig c;
    for (const auto &item : j.items())
    {
        const std::string &k = item.key();
        const json &v = item.value();
        if (k == "bs")
            c.bs = get_array(v, k);
        else if (k == "ris")
            c.ris = get_array(v, k);
        else if (k == "ue")
            c.ue = get_array(v, k);
        else if (k == "users")
            c.users = get_count(v, k);
        else if (k == "rf_chains")
            c.rf_chains = get_count(v, k);
        else if (k == "wavelength")
            c.wavelength = get_number(v, k);
        else if (k == "paths_bsris")
            c.paths_bsris = get_count(v, k);
        else if (k == "paths_risuser")
        {
            c.paths_risuser.clear();
            if (v.is_array())
                for (const json &e : v)
                    c.paths_risuser.push_back(get_count(e, k));
            else
                c.paths_risuser.push_back(get_count(v, k));
        }
        else if (k == "z_f")
            c.z_f = get_number(v, k);
        else if (k == "z_h_min")
            c.z_h_min = get_number(v, k);
        else if (k == "z_h_max")
            c.z_h_max = get_number(v, k);
        else if (k == "transmit_power")
            c.transmit_power = get_number(v, k);
        else if (k == "noise_variance")
            c.noise_variance = get_number(v, k);
        else if (k == "bs_ris_regime")
            c.bs_ris_regime = parse_policy(get_string(v, k), k);
        else if (k == "ris_user_regime")
            c.ris_user_regime = parse_policy(get_string(v, k), k);
        else if (k == "gain_model")
            c.gain_model = parse_gain(get_string(v, k));
        else if (k == "pathloss_ref_bsris")
            c.pathloss_ref_bsris = get_number(v, k);
        else if (k == "pathloss_ref_risuser")
            c.pathloss_ref_risuser = get_number(v, k);
    }
    return c;
}

json experiment_config_to_json(const ExperimentConfig &c)
{
    json j;
    j["system"] = system_config_to_json(c.system);
    json sweep;
    sweep["axis"] = to_string(c.sweep.axis);
    if (c.sweep.axis == SweepAxis::DistanceScenario)
    {
        sweep["values"] = json::array();
        for (ChannelCategory s : c.sweep.scenarios)
            sweep["values"].push_back(to_string(s));
    }
    else
        sweep["values"] = c.sweep.values;
    j["sweep"] = sweep;
    j["category"] = to_string(c.category);
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["estimators"] = json::array();
    for (EstimatorKind e : c.estimators)
        j["estimators"].push_back(to_string(e));
    j["t_max"] = c.t_max;
    j["col_blocks"] = c.col_blocks;
    j["row_blocks"] = c.row_blocks;
    if (c.snr_db)
        j["snr_db"] = *c.snr_db;
    j["snr_convention"] = to_string(c.snr_convention);
    j["pilot_length"] = c.pilot_length;
    if (c.two_phase)
        j["two_phase"] = {{"T_f", c.two_phase->T_f}, {"T_h", c.two_phase->T_h}};
    return j;
}

ExperimentConfig experiment_config_from_json(const json &j)
{
    check_keys(j, "config",
               {"system", "sweep", "category", "trials", "seed", "estimators", "t_max", "col_blocks", "row_blocks",
                "snr_db", "snr_convention", "pilot_length", "two_phase"});
    ExperimentConfig c;
    for (const auto &item : j.items())
    {
        const std::string &k = item.key();
        const json &v = item.value();
        if (k == "system")
            c.system = system_config_from_json(v);
        else if (k == "sweep")
        {
            check_keys(v, "sweep", {"axis", "values"});
            if (!v.contains("axis") || !v.contains("values"))
                throw ConfigError("sweep: 'axis' and 'values' are required");
            c.sweep.axis = parse_axis(get_string(v["axis"], "sweep.axis"));
            if (!v["values"].is_array())
                throw ConfigError("sweep.values must be a list");
            for (const json &e : v["values"])
            {
                if (c.sweep.axis == SweepAxis::DistanceScenario)
                    c.sweep.scenarios.push_back(parse_category(get_string(e, "sweep.values"), false));
                else
                    c.sweep.values.push_back(get_number(e, "sweep.values"));
            }
        }
        else if (k == "category")
            c.category = parse_category(get_string(v, k), true);
        else if (k == "trials")
            c.trials = get_count(v, k);
        else if (k == "seed")
        {
            if (!v.is_number_unsigned())
                throw ConfigError("'seed' must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        }
        else if (k == "estimators")
        {
            if (!v.is_array())
                throw ConfigError("'estimators' must be a list");
            c.estimators.clear();
            for (const json &e : v)
                c.estimators.push_back(parse_estimator(get_string(e, k)));
        }
        else if (k == "t_max")
            c.t_max = get_count(v, k);
        else if (k == "col_blocks")
            c.col_blocks = get_count(v, k);
        else if (k == "row_blocks")
            c.row_blocks = get_count(v, k);
        else if (k == "snr_db")
        {
            if (!v.is_null())
                c.snr_db = get_number(v, k);
        }
        else if (k == "snr_convention")
            c.snr_convention = parse_convention(get_string(v, k));
        else if (k == "pilot_length")
            c.pilot_length = get_count(v, k);
        else if (k == "two_phase")
        {
            if (v.is_null())
                continue;
            check_keys(v, "two_phase", {"T_f", "T_h"});
            TwoPhaseParams p;
            if (v.contains("T_f"))
                p.T_f = get_number(v["T_f"], "two_phase.T_f");
            if (v.contains("T_h"))
                p.T_h = get_number(v["T_h"], "two_phase.T_h");
            c.two_phase = p;
        }
    }
    if (c.sweep.size() == 0)
        throw ConfigError("sweep: at least one value is required");
    try
    {
        c.validate();
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig parse_experiment_config(const std::string &text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return experiment_config_from_json(j);
}

ExperimentConfig load_experiment_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try
    {
        return parse_experiment_config(ss.str());
    }
    catch (const ConfigError &e)
    {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace clrajo
