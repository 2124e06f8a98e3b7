// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_MRC_HPP
#define SCMIMO_MRC_HPP

#include "scmimo/channel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace scmimo {

enum class Method { MonteCarlo, Theorem1, Theorem2, FullLimit, Corollary1, Corollary2, Corollary3 };

std::string_view method_name(Method m);
Method method_from_name(std::string_view name);

struct SinrReport {
    std::vector<double> per_terminal_sinr;
    double sum_se_bits = 0.0;
    Method method = Method::MonteCarlo;
    std::optional<std::vector<double>> mc_std_err;
    std::optional<std::size_t> n_realizations;
    // Monte-Carlo standard error of sum_se_bits.
    std::optional<double> sum_se_std_err;
};

/// Instantaneous MRC SINR of terminal l:
///   snr b_l |g_l|^4 / (noise |g_l|^2 + snr sum_{k != l} b_k |g_l^H g_k|^2).
/// A zero channel gives 0.
double instantaneous_sinr(const CMatrix& G, std::span<const double> betas, double snr, int l,
                          double noise_power = 1.0);

/// All L SINRs from the Gram matrix G^H G, which is formed once by the caller.
std::vector<double> sinrs_from_gram(const CMatrix& gram, std::span<const double> betas, double snr,
                                    double noise_power = 1.0);

double sum_spectral_efficiency(const CMatrix& G, std::span<const double> betas, double snr,
                               double noise_power = 1.0);

/// Sum of log2(1 + sinr) over the given values.
double sum_rate(std::span<const double> sinrs);

struct McOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::size_t block_size = 64;
    double noise_power = 1.0;
};

/// Running mean/variance (Welford) with an order-stable merge.
struct RunningMoments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    static RunningMoments merge(const RunningMoments& a, const RunningMoments& b);
    double std_err() const;
};

/// Statistics at one SNR point of a fading sweep.
struct McPoint {
    double snr = 0.0;
    std::vector<double> sinr_mean;
    std::vector<double> sinr_std_err;
    double avg_sinr_mean = 0.0;    // terminal-averaged SINR
    double avg_sinr_std_err = 0.0;
    double sum_se_mean = 0.0;
    double sum_se_std_err = 0.0;
};

/// Fast-fading Monte-Carlo over fixed large-scale links. Realization r draws
/// its channel from the stream (seed, r), and every SNR point reuses the same
/// draws. Output is independent of opts.threads.
std::vector<McPoint> mc_fading_sweep(std::span<const PreparedLink> links, std::span<const double> snrs,
                                     std::size_t n_real, const McOptions& opts);

SinrReport mc_expected_sinr(const ArrayGeometry& geom, std::span<const TerminalLink> links, double snr,
                            std::size_t n_real, const McOptions& opts);

SinrReport mc_ergodic_sum_se(const ArrayGeometry& geom, std::span<const TerminalLink> links, double snr,
                             std::size_t n_real, const McOptions& opts);

} // namespace scmimo

#endif
