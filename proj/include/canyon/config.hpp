// SPDX-License-Identifier: Apache-2.0
//
// canyon-sim: interference and capacity simulation for mm-wave picocells in street canyons
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

#ifndef CANYON_CONFIG_HPP
#define CANYON_CONFIG_HPP

#include "canyon/types.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace canyon {

enum class ConfigErrorKind
{
    missing_file,
    parse_error,
    unknown_key,
    invalid_value,
    invariant_violation,
};

inline const char *to_string(ConfigErrorKind k)
{
    switch (k)
    {
    case ConfigErrorKind::missing_file: return "missing-file";
    case ConfigErrorKind::parse_error: return "parse-error";
    case ConfigErrorKind::unknown_key: return "unknown-key";
    case ConfigErrorKind::invalid_value: return "invalid-value";
    case ConfigErrorKind::invariant_violation: return "invariant-violation";
    }
    return "unknown";
}

class ConfigError : public std::runtime_error
{
public:
    ConfigError(ConfigErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
    {
    }
    ConfigErrorKind kind() const noexcept { return kind_; }

private:
    ConfigErrorKind kind_;
};

enum class ExperimentKind
{
    ccdf,
    capacity_table,
    alpha_decay,
    theorem1_check,
};

inline std::optional<ExperimentKind> experiment_from_name(const std::string &name)
{
    if (name == "ccdf") return ExperimentKind::ccdf;
    if (name == "capacity_table") return ExperimentKind::capacity_table;
    if (name == "alpha_decay") return ExperimentKind::alpha_decay;
    if (name == "theorem1_check") return ExperimentKind::theorem1_check;
    return std::nullopt;
}

struct ExperimentSpec
{
    ExperimentKind kind = ExperimentKind::ccdf;
    int n_drops = 500;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    int alpha_max_offset = 6;
    int alpha_trials = 200;
    int theorem1_trials = 10000;
    bool sumrate_stage = false;
    double r_min = 0.5;
    double gamma_step_db = 0.1;
    std::vector<std::pair<std::string, std::string>> overrides; // "section.key" = value, applied last
};

struct ParsedConfig
{
    CanyonScenario scenario;
    ExperimentSpec experiment;
};

namespace detail {

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string &key, const std::string &v)
{
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(ConfigErrorKind::invalid_value, "'" + key + "' expects a number, got '" + v + "'");
    return out;
}

inline long long parse_int(const std::string &key, const std::string &v)
{
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(ConfigErrorKind::invalid_value, "'" + key + "' expects an integer, got '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string &key, const std::string &v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError(ConfigErrorKind::invalid_value, "'" + key + "' expects a boolean, got '" + v + "'");
}

/// Setter table keyed by "section.key". Tx power tracks the EIRP unless set explicitly.
class KeyTable
{
public:
    KeyTable(ParsedConfig &cfg, bool &tx_power_set)
    {
        CanyonScenario &s = cfg.scenario;
        ExperimentSpec &e = cfg.experiment;
        auto real = [this](const std::string &k, double &target) {
            setters_[k] = [k, &target](const std::string &v) { target = parse_double(k, v); };
        };
        auto integer = [this](const std::string &k, int &target) {
            setters_[k] = [k, &target](const std::string &v) {
                const long long x = parse_int(k, v);
                if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                    throw ConfigError(ConfigErrorKind::invalid_value, "'" + k + "' out of range");
                target = static_cast<int>(x);
            };
        };

        real("geometry.street_length", s.street_length);
        real("geometry.street_width", s.street_width);
        real("geometry.picocell_width", s.picocell_width);
        real("geometry.bs_height", s.bs_height);
        real("geometry.user_height_max", s.user_height_max);
        real("geometry.user_height_min", s.user_height_min);
        integer("geometry.tx_rows", s.tx_array.rows);
        integer("geometry.tx_cols", s.tx_array.cols);
        integer("geometry.rx_rows", s.rx_array.rows);
        integer("geometry.rx_cols", s.rx_array.cols);
        setters_["geometry.element_spacing"] = [&s](const std::string &v) {
            s.tx_array.element_spacing = s.rx_array.element_spacing = parse_double("geometry.element_spacing", v);
        };

        setters_["rf.carrier_frequency_hz"] = [&s](const std::string &v) {
            const double f = parse_double("rf.carrier_frequency_hz", v);
            if (!(f > 0.0))
                throw ConfigError(ConfigErrorKind::invalid_value, "'rf.carrier_frequency_hz' must be positive");
            s.rf.wavelength = speed_of_light / f;
        };
        real("rf.oxygen_absorption_db_per_km", s.rf.oxygen_absorption_db_per_km);
        real("rf.reflection_loss_db", s.rf.reflection_loss_db);
        setters_["rf.tx_power_dbm"] = [&s, &tx_power_set](const std::string &v) {
            s.rf.tx_power_dbm = parse_double("rf.tx_power_dbm", v);
            tx_power_set = true;
        };
        real("rf.eirp_dbm", s.rf.eirp_dbm);
        real("rf.noise_psd_dbm_hz", s.rf.noise_psd_dbm_hz);
        real("rf.noise_figure_db", s.rf.noise_figure_db);
        real("rf.bandwidth_hz", s.rf.bandwidth_hz);
        real("rf.max_spectral_efficiency", s.rf.max_spectral_efficiency);

        integer("mac.subarrays_per_face", s.subarrays_per_face);
        integer("mac.users_per_picocell", s.users_per_picocell);
        integer("mac.reuse_factor", s.reuse_factor);
        real("mac.gamma_step_db", e.gamma_step_db);
        setters_["mac.sumrate_stage"] = [&e](const std::string &v) { e.sumrate_stage = parse_bool("mac.sumrate_stage", v); };
        real("mac.r_min", e.r_min);

        setters_["experiment.name"] = [&e](const std::string &v) {
            const auto kind = experiment_from_name(v);
            if (!kind)
                throw ConfigError(ConfigErrorKind::invalid_value,
                                  "'experiment.name' must be ccdf, capacity_table, alpha_decay or theorem1_check, got '" + v + "'");
            e.kind = *kind;
        };
        integer("experiment.n_drops", e.n_drops);
        setters_["experiment.seed"] = [&s, &e](const std::string &v) {
            const long long x = parse_int("experiment.seed", v);
            if (x < 0)
                throw ConfigError(ConfigErrorKind::invalid_value, "'experiment.seed' must be non-negative");
            e.seed = s.seed = static_cast<std::uint64_t>(x);
        };
        setters_["experiment.output_dir"] = [&e](const std::string &v) { e.output_dir = v; };
        integer("experiment.alpha_max_offset", e.alpha_max_offset);
        integer("experiment.alpha_trials", e.alpha_trials);
        integer("experiment.theorem1_trials", e.theorem1_trials);
    }

    void set(const std::string &key, const std::string &value) const
    {
        const auto it = setters_.find(key);
        if (it == setters_.end())
            throw ConfigError(ConfigErrorKind::unknown_key, "unknown key '" + key + "'");
        it->second(value);
    }

private:
    std::map<std::string, std::function<void(const std::string &)>> setters_;
};

inline void check_invariants(const ParsedConfig &cfg)
{
    try
    {
        cfg.scenario.validate();
    }
    catch (const InvalidScenario &e)
    {
        throw ConfigError(ConfigErrorKind::invariant_violation, e.what());
    }
    const ExperimentSpec &e = cfg.experiment;
    if (e.n_drops < 1)
        throw ConfigError(ConfigErrorKind::invariant_violation, "n_drops must be at least 1");
    if (e.alpha_max_offset < 1 || e.alpha_trials < 1 || e.theorem1_trials < 1)
        throw ConfigError(ConfigErrorKind::invariant_violation, "alpha and beam-trace trial counts must be at least 1");
    if (!(e.gamma_step_db > 0.0))
        throw ConfigError(ConfigErrorKind::invariant_violation, "gamma_step_db must be positive");
    if (!(e.r_min >= 0.0))
        throw ConfigError(ConfigErrorKind::invariant_violation, "r_min must be non-negative");
}

} // namespace detail

/// Parses INI text: `[section]` headers, `key = value` lines, `#` or `;` comments.
/// Overrides ("section.key", value) are applied after the text.
inline ParsedConfig parse_config_text(const std::string &text,
                                      const std::vector<std::pair<std::string, std::string>> &overrides = {})
{
    static const char *sections[] = {"geometry", "rf", "mac", "experiment"};
    ParsedConfig cfg;
    bool tx_power_set = false;
    const detail::KeyTable table(cfg, tx_power_set);

    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        const std::string where = "line " + std::to_string(line_no);
        if (t.front() == '[')
        {
            if (t.back() != ']')
                throw ConfigError(ConfigErrorKind::parse_error, where + ": unterminated section header");
            section = detail::trim(t.substr(1, t.size() - 2));
            if (std::find(std::begin(sections), std::end(sections), section) == std::end(sections))
                throw ConfigError(ConfigErrorKind::unknown_key, where + ": unknown section '" + section + "'");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ConfigErrorKind::parse_error, where + ": expected 'key = value'");
        if (section.empty())
            throw ConfigError(ConfigErrorKind::parse_error, where + ": key outside of a section");
        const std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        if (const auto hash = value.find_first_of("#;"); hash != std::string::npos)
            value = detail::trim(value.substr(0, hash));
        if (key.empty())
            throw ConfigError(ConfigErrorKind::parse_error, where + ": empty key");
        table.set(section + "." + key, value);
    }
    for (const auto &[key, value] : overrides)
        table.set(key, value);
    if (!tx_power_set)
        cfg.scenario.rf.tx_power_dbm = cfg.scenario.rf.eirp_dbm - linear_to_db(cfg.scenario.tx_array.size());
    cfg.experiment.overrides = overrides;
    detail::check_invariants(cfg);
    return cfg;
}

inline ParsedConfig parse_config(const std::string &path,
                                 const std::vector<std::pair<std::string, std::string>> &overrides = {})
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(ConfigErrorKind::missing_file, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

/// Splits "section.key=value".
inline std::pair<std::string, std::string> parse_override(const std::string &arg)
{
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError(ConfigErrorKind::parse_error, "override '" + arg + "' is not of the form section.key=value");
    return {detail::trim(arg.substr(0, eq)), detail::trim(arg.substr(eq + 1))};
}

} // namespace canyon

#endif // CANYON_CONFIG_HPP
