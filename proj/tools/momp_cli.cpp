// SPDX-License-Identifier: Apache-2.0
//
// mompkit - multidimensional sparse recovery, mmWave channel estimation and
// single-anchor indoor localization
// Copyright (C) 2026 mompkit contributors
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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mompkit/config.hpp"
#include "mompkit/errors.hpp"
#include "mompkit/experiment.hpp"

namespace
{

// Exit codes: 0 success, 2 configuration error, 3 runtime failure.
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

mompkit::ExperimentConfig resolve_config(const std::string &config_file, const std::string &preset)
{
    if (!config_file.empty() && !preset.empty())
        throw mompkit::config_error("give either a config file or --preset, not both");
    if (config_file.empty() && preset.empty())
        throw mompkit::config_error("a config file or --preset is required");
    if (!preset.empty())
        return mompkit::parse_config(mompkit::preset_text(preset));
    return mompkit::load_config(config_file);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mompkit experiment driver"};
    app.require_subcommand(1);

    std::string run_config, run_preset, run_output;
    std::uint64_t run_seed = 0;
    CLI::App *run = app.add_subcommand("run", "Run the configured experiment sweep");
    run->add_option("config", run_config, "Configuration file");
    run->add_option("--preset", run_preset, "Built-in preset instead of a file (see `presets`)");
    CLI::Option *out_opt = run->add_option("--output", run_output, "Override the output directory");
    CLI::Option *seed_opt = run->add_option("--seed", run_seed, "Override the master seed");

    std::string validate_config;
    CLI::App *validate = app.add_subcommand("validate", "Parse and validate a configuration file");
    validate->add_option("config", validate_config, "Configuration file")->required();

    std::string show_preset;
    CLI::App *presets = app.add_subcommand("presets", "List the built-in presets");
    presets->add_option("--show", show_preset, "Print the full text of one preset");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try
    {
        if (run->parsed())
        {
            mompkit::ExperimentConfig cfg = resolve_config(run_config, run_preset);
            if (*out_opt)
                cfg.output_dir = run_output;
            if (*seed_opt)
                cfg.seed = run_seed;
            cfg.validate();
            const mompkit::ExperimentResult result = mompkit::run_experiment(cfg, std::cout);
            for (const mompkit::SweepPoint &sp : result.sweeps)
            {
                Eigen::Index located = 0;
                for (const mompkit::MetricsRow &row : sp.rows)
                    if (row.detected)
                        ++located;
                std::cout << sp.tag << ": " << sp.rows.size() << " positions, " << located
                          << " located\n";
            }
            std::cout << "wrote " << result.files.size() << " files to " << cfg.output_dir << "\n";
        }
        else if (validate->parsed())
        {
            const mompkit::ExperimentConfig cfg = mompkit::load_config(validate_config);
            cfg.validate();
            const std::size_t sweep_points = (cfg.sweep_k_res.empty() ? 1 : cfg.sweep_k_res.size()) *
                                             (cfg.sweep_power_dbm.empty() ? 1 : cfg.sweep_power_dbm.size()) *
                                             (cfg.sweep_frames.empty() ? 1 : cfg.sweep_frames.size());
            const std::size_t positions =
                cfg.paths_file.empty() ? cfg.resolved_positions().size() : std::size_t{1};
            std::cout << validate_config << ": valid (" << positions << " positions, " << sweep_points
                      << " sweep points)\n";
        }
        else if (presets->parsed())
        {
            if (!show_preset.empty())
                std::cout << mompkit::preset_text(show_preset);
            else
                for (const std::string &name : mompkit::preset_names())
                    std::cout << name << "\n";
        }
    }
    catch (const mompkit::config_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return 0;
}
