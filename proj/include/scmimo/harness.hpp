// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_HARNESS_HPP
#define SCMIMO_HARNESS_HPP

#include "scmimo/calibration.hpp"
#include "scmimo/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scmimo {

/// Invalid experiment configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { SnrSweep, SumSeCdf, AntennaSweep, Calibrate, Single };
enum class CorrelationMode { UnequalPerTerminal, EqualShared };
enum class LimitMode { PaperFaithful, FullLimit, Both };

struct KMode {
    enum class Kind { Sampled, Fixed, Zero };
    Kind kind = Kind::Sampled;
    double fixed_db = 0.0;

    std::string label() const;
    bool operator==(const KMode&) const = default;
};

std::string_view kind_name(ExperimentKind k);
std::string_view correlation_name(CorrelationMode m);
std::string_view limit_mode_name(LimitMode m);
LimitMode limit_mode_from_name(std::string_view name);

struct ExperimentSpec {
    std::string id;
    ExperimentKind kind = ExperimentKind::Single;

    std::vector<int> antennas;           // M (a list for antenna sweeps)
    int terminals = 1;                   // L
    int paths = 1;                       // P
    std::vector<double> apertures_wl{8.0};
    std::vector<AngularSupport> supports{AngularSupport{}};
    LosAngleMode los_angle_mode = LosAngleMode::Geometric;

    std::vector<PropagationProfile> profiles;
    double radius_m = 100.0;
    double exclusion_radius_m = 10.0;
    std::optional<double> rho_const;     // empty: calibrate per profile
    CalibrationOptions calibration;
    std::optional<AngularSupport> calibration_support; // empty: first of `supports`

    std::vector<double> snr_db{10.0};
    std::size_t n_fading = 10000;
    std::size_t n_drops = 1;
    std::vector<CorrelationMode> correlation_modes{CorrelationMode::UnequalPerTerminal};
    std::vector<KMode> k_modes{KMode{}};
    LimitMode limit_mode = LimitMode::PaperFaithful;
    bool monte_carlo = true;
    int tracked_terminal = 0;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    std::string output_path;
    std::string output_format = "csv";
};

/// Parses and validates a JSON experiment description. Unknown keys and
/// out-of-range values raise ConfigError naming the key path.
ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Normalised echo of every parameter that influences the results.
nlohmann::json spec_to_json(const ExperimentSpec& spec);

struct ResultRow {
    std::string experiment;
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string terminal;
    std::string method;
    double value_linear = 0.0;
    std::optional<double> value_db;
    std::optional<double> std_err;
    std::uint64_t seed = 0;

    bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
    nlohmann::json parameters;
    std::vector<ResultRow> rows;

    bool operator==(const ResultTable&) const = default;
};

/// Side channel for progress messages; never influences results.
using ProgressFn = std::function<void(std::string_view)>;

ResultTable run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});
ResultTable run_snr_sweep(const ExperimentSpec& spec, const ProgressFn& progress = {});
ResultTable run_sum_se_cdf(const ExperimentSpec& spec, const ProgressFn& progress = {});
ResultTable run_antenna_sweep(const ExperimentSpec& spec, const ProgressFn& progress = {});
ResultTable run_calibrate(const ExperimentSpec& spec, const ProgressFn& progress = {});
ResultTable run_single(const ExperimentSpec& spec, const ProgressFn& progress = {});

/// Attenuation constant per profile (calibrated or fixed), in profile order.
std::vector<double> resolve_rho_constants(const ExperimentSpec& spec, const ProgressFn& progress = {});

/// Links of one drop under the given variant. Terminal positions and
/// shadowing depend only on (seed, drop); the variant selects angles and K.
/// EqualShared gives every terminal the same diffuse angle set and the same
/// LoS direction.
std::vector<TerminalLink> draw_variant_drop(const ExperimentSpec& spec, const PropagationProfile& profile,
                                            const AngularSupport& support, const KMode& k_mode,
                                            CorrelationMode correlation, double rho_const,
                                            std::uint64_t drop);

std::string to_csv(const ResultTable& table);
nlohmann::json to_json(const ResultTable& table);
ResultTable table_from_json(const nlohmann::json& j);

/// Writes via a temporary file in the same directory, then renames.
void emit_results(const ResultTable& table, const std::filesystem::path& path, std::string_view format);

} // namespace scmimo

#endif
