// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: simulate / calibrate / validate.

#include "scmimo/calibration.hpp"
#include "scmimo/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const scmimo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const scmimo::CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Uplink MRC analysis for space-constrained ULAs under correlated Ricean fading"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string limit_mode;
    bool quiet = false;

    auto* simulate = app.add_subcommand("simulate", "Run the experiment described by a spec file");
    simulate->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
    simulate->add_option("--out", out_path, "Output file (default: output.path from the spec, else stdout)");
    simulate->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--seed", seed, "Override the master seed");
    simulate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--limit-mode", limit_mode, "Limiting SINR variant")
        ->check(CLI::IsMember({"paper", "full", "both"}));
    simulate->add_flag("-q,--quiet", quiet, "Suppress progress output");

    auto* calibrate = app.add_subcommand("calibrate", "Print the calibrated attenuation constant per profile");
    calibrate->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
    calibrate->add_option("--seed", seed, "Override the master seed");
    calibrate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a spec file against the schema");
    validate->add_option("spec", spec_path, "Experiment spec (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    return guarded([&] {
        scmimo::ExperimentSpec spec = scmimo::load_spec(spec_path);
        if (seed)
            spec.seed = *seed;
        if (threads)
            spec.threads = *threads;

        if (*validate) {
            std::cout << "ok: " << spec.id << " (" << scmimo::kind_name(spec.kind) << ")\n";
            return 0;
        }

        if (*calibrate) {
            const auto rhos = scmimo::resolve_rho_constants(scmimo::ExperimentSpec{[&] {
                auto s = spec;
                s.rho_const.reset();
                return s;
            }()});
            for (std::size_t p = 0; p < spec.profiles.size(); ++p)
                std::cout << spec.profiles[p].name << " " << rhos[p] << "\n";
            return 0;
        }

        if (!limit_mode.empty())
            spec.limit_mode = scmimo::limit_mode_from_name(limit_mode);
        if (!format.empty())
            spec.output_format = format;
        if (!out_path.empty())
            spec.output_path = out_path;

        const auto start = std::chrono::steady_clock::now();
        scmimo::ProgressFn progress;
        if (!quiet)
            progress = [&](std::string_view msg) {
                const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                std::cerr << "[" << t << " s] " << msg << "\n";
            };
        const auto table = scmimo::run_experiment(spec, progress);
        if (spec.output_path.empty()) {
            if (spec.output_format == "json")
                std::cout << scmimo::to_json(table).dump(2) << "\n";
            else
                std::cout << scmimo::to_csv(table);
        } else {
            scmimo::emit_results(table, spec.output_path, spec.output_format);
        }
        if (progress)
            progress("done, " + std::to_string(table.rows.size()) + " rows");
        return 0;
    });
}
