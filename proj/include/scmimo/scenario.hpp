// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_SCENARIO_HPP
#define SCMIMO_SCENARIO_HPP

#include "scmimo/rng.hpp"

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace scmimo {

enum class Band { Microwave, MmWave };

/// Large-scale parameters of one frequency band in an urban-micro cell.
struct PropagationProfile {
    std::string name;
    Band band = Band::Microwave;
    double carrier_freq_ghz = 2.0;
    double alpha_los = 2.2;
    double alpha_nlos = 3.67;
    double sigma_sh_los_db = 3.0;
    double sigma_sh_nlos_db = 4.0;
    double k_mean_db = 9.0;
    double k_std_db = 5.0;
    double omega_los_inv_m = 67.1; // LoS decay length 1/omega; mmWave only
    double p_out = 0.0;

    void validate() const;

    double alpha(bool los) const { return los ? alpha_los : alpha_nlos; }
    double sigma_sh_db(bool los) const { return los ? sigma_sh_los_db : sigma_sh_nlos_db; }
};

PropagationProfile umi_microwave_profile();
PropagationProfile umi_mmwave_profile();

/// Looks up one of the built-in profiles ("umi-microwave-2ghz",
/// "umi-mmwave-28ghz"). Throws std::invalid_argument for unknown names.
PropagationProfile profile_by_name(std::string_view name);
std::vector<std::string> builtin_profile_names();

struct AngularSupport {
    double lo = -1.5707963267948966;
    double hi = 1.5707963267948966;
};

/// How the LoS direction of a terminal is drawn.
///   Geometric:     the terminal azimuth folded onto [-pi/2, pi/2].
///   WithinSupport: uniform over the diffuse angular support.
enum class LosAngleMode { Geometric, WithinSupport };

/// LoS direction from a uniform variate u in [0, 1).
double los_angle_from_uniform(double u, LosAngleMode mode, const AngularSupport& support);

struct CellConfig {
    double radius_m = 100.0;
    double exclusion_radius_m = 10.0;
    double rho_const = 1.0;
    int num_terminals = 1;
    AngularSupport angular_support{};
    int num_paths = 1;
    double noise_power = 1.0;
    LosAngleMode los_angle_mode = LosAngleMode::Geometric;

    void validate() const;
};

/// Large-scale state of a single terminal.
struct TerminalLink {
    double distance_m = 0.0;
    bool is_los = false;
    double beta = 1.0;
    double shadow_db = 0.0;
    double k_factor = 0.0;
    double los_angle_rad = 0.0;
    std::vector<double> diffuse_angles_rad;
};

double los_probability(double r_m, const PropagationProfile& profile);

/// Link gain rho_const * 10^(shadow/10) * (r0/r)^alpha for the given LoS state.
double link_gain(double r_m, bool is_los, double shadow_db, const PropagationProfile& profile,
                 const CellConfig& cell);

TerminalLink sample_terminal(Rng& rng, const CellConfig& cell, const PropagationProfile& profile);

/// Samples all cell.num_terminals links of one drop, in terminal order.
std::vector<TerminalLink> sample_drop(Rng& rng, const CellConfig& cell, const PropagationProfile& profile);

std::vector<double> betas_of(const std::vector<TerminalLink>& links);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

} // namespace scmimo

#endif
