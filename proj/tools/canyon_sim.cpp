// SPDX-License-Identifier: Apache-2.0
//
// canyon-sim command-line front end
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

#include "canyon/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char **argv)
{
    CLI::App app{"Monte Carlo simulator of mm-wave picocells in a street canyon"};
    app.require_subcommand(1);

    CLI::App *run = app.add_subcommand("run", "run the experiment described by a config file");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> drops;
    std::vector<std::string> sets;
    run->add_option("config", config_path, "INI config with [geometry], [rf], [mac], [experiment]")->required();
    run->add_option("--seed", seed, "master seed (overrides [experiment] seed)");
    run->add_option("--out", out_dir, "output directory for CSV files");
    run->add_option("--drops", drops, "Monte Carlo drops per scenario cell")->check(CLI::PositiveNumber);
    run->add_option("--set", sets, "override a config key, e.g. --set geometry.picocell_width=50");

    CLI11_PARSE(app, argc, argv);

    try
    {
        std::vector<std::pair<std::string, std::string>> overrides;
        for (const std::string &s : sets)
            overrides.push_back(canyon::parse_override(s));
        if (seed)
            overrides.emplace_back("experiment.seed", std::to_string(*seed));
        if (out_dir)
            overrides.emplace_back("experiment.output_dir", *out_dir);
        if (drops)
            overrides.emplace_back("experiment.n_drops", std::to_string(*drops));

        const canyon::ParsedConfig cfg = canyon::parse_config(config_path, overrides);
        for (const auto &path : canyon::run_experiment(cfg))
            std::cout << path.string() << '\n';
    }
    catch (const canyon::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
