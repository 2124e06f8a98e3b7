// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_CALIBRATION_HPP
#define SCMIMO_CALIBRATION_HPP

#include "scmimo/scenario.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scmimo {

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-sample quantity whose pooled percentile is tuned.
///   Sinr: instantaneous MRC SINR including inter-terminal interference.
///   Snr:  the same with the interference term removed (snr b |g|^2 / noise).
enum class CalibrationStatistic { Sinr, Snr };

/// Reference system on which the attenuation constant is tuned. The pooled
/// statistic is the given percentile over all terminals, drops and fading
/// draws.
struct CalibrationOptions {
    CalibrationStatistic statistic = CalibrationStatistic::Sinr;
    int num_antennas = 256;
    int num_terminals = 32;
    double aperture_wl = 8.0;
    double snr = 1.0;
    std::size_t n_drops = 200;
    std::size_t n_fading = 10;
    double percentile = 0.05;
    double target_db = 0.0;
    double tolerance_db = 0.01; // bisection stops once inside this band
    double accept_db = 0.1;     // result rejected if still outside this band
    int max_iterations = 40;
    double rho_lo = 1e-6;
    double rho_hi = 1e6;
    unsigned threads = 1;
};

struct CalibrationResult {
    double rho_const = 0.0;
    double percentile_db = 0.0;
    int iterations = 0;
};

/// Pre-drawn SINR ingredients: with every link gain scaled by c, a sample's
/// SINR is c a / (noise + c b).
class SinrSamplePool {
public:
    SinrSamplePool(const CellConfig& cell, const PropagationProfile& profile, std::uint64_t seed,
                   const CalibrationOptions& opts);

    /// Value at scale c -> infinity (the interference floor for Sinr).
    double saturation_percentile(double p) const;

    /// Percentile of the pooled instantaneous SINR (linear) at scale c.
    double percentile_at(double scale, double p) const;
    std::size_t size() const { return signal_.size(); }

private:
    std::vector<double> signal_;
    std::vector<double> interference_;
    double noise_power_;
};

/// Empirical percentile (linear interpolation between order statistics).
double empirical_percentile(std::vector<double> values, double p);

/// Bisects on log(rho_const) until the pooled percentile SINR hits the
/// target. The template's rho_const is ignored. Throws CalibrationError when
/// the bracket does not straddle the target or the tolerance is not reached.
CalibrationResult calibrate_rho_const(const CellConfig& tmpl, const PropagationProfile& profile,
                                      std::uint64_t seed, const CalibrationOptions& opts);

/// Pooled percentile SINR in dB for cell.rho_const on a given seed.
double pooled_percentile_db(const CellConfig& cell, const PropagationProfile& profile, std::uint64_t seed,
                            const CalibrationOptions& opts);

} // namespace scmimo

#endif
