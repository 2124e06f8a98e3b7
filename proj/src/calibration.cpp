// SPDX-License-Identifier: Apache-2.0

#include "scmimo/calibration.hpp"
#include "scmimo/channel.hpp"
#include "scmimo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace scmimo {

SinrSamplePool::SinrSamplePool(const CellConfig& cell, const PropagationProfile& profile, std::uint64_t seed,
                               const CalibrationOptions& opts)
    : noise_power_(cell.noise_power)
{
    if (opts.n_drops < 1 || opts.n_fading < 1)
        throw std::invalid_argument("calibration: need at least one drop and one fading draw");
    CellConfig unit_cell = cell;
    unit_cell.rho_const = 1.0;
    unit_cell.num_terminals = opts.num_terminals;
    unit_cell.validate();
    profile.validate();
    const ArrayGeometry geom(opts.num_antennas, opts.aperture_wl);

    const std::size_t L = static_cast<std::size_t>(opts.num_terminals);
    const std::size_t per_drop = L * opts.n_fading;
    signal_.resize(per_drop * opts.n_drops);
    interference_.resize(per_drop * opts.n_drops);

    parallel_for(opts.n_drops, opts.threads, [&](std::size_t d) {
        Rng drop_rng = make_stream(seed, {0, d});
        const auto links = sample_drop(drop_rng, unit_cell, profile);
        const auto prepared = prepare_links(geom, links);
        const auto betas = betas_of(links);
        std::size_t idx = d * per_drop;
        for (std::size_t f = 0; f < opts.n_fading; ++f) {
            Rng rng = make_stream(seed, {1, d, f});
            const CMatrix G = draw_channel_matrix(prepared, rng);
            const CMatrix gram = G.adjoint() * G;
            for (std::size_t l = 0; l < L; ++l, ++idx) {
                const double n2 = gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)).real();
                double inter = 0.0;
                for (std::size_t k = 0; k < L; ++k)
                    if (k != l)
                        inter += betas[k] * std::norm(gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)));
                signal_[idx] = n2 > 0.0 ? opts.snr * betas[l] * n2 : 0.0;
                interference_[idx] = n2 > 0.0 && opts.statistic == CalibrationStatistic::Sinr
                                         ? opts.snr * inter / n2
                                         : 0.0;
            }
        }
    });
}

double SinrSamplePool::percentile_at(double scale, double p) const
{
    std::vector<double> v(signal_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double den = noise_power_ + scale * interference_[i];
        v[i] = den > 0.0 ? scale * signal_[i] / den : 0.0;
    }
    return empirical_percentile(std::move(v), p);
}

double SinrSamplePool::saturation_percentile(double p) const
{
    std::vector<double> v(signal_.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = interference_[i] > 0.0 ? signal_[i] / interference_[i] : std::numeric_limits<double>::infinity();
    return empirical_percentile(std::move(v), p);
}

double empirical_percentile(std::vector<double> values, double p)
{
    if (values.empty())
        throw std::invalid_argument("empirical_percentile: no samples");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("empirical_percentile: p outside [0, 1]");
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double x_lo = values[lo];
    if (lo + 1 >= values.size())
        return x_lo;
    const double x_hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
    return x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
}

CalibrationResult calibrate_rho_const(const CellConfig& tmpl, const PropagationProfile& profile,
                                      std::uint64_t seed, const CalibrationOptions& opts)
{
    if (!(opts.rho_lo > 0.0 && opts.rho_hi > opts.rho_lo))
        throw std::invalid_argument("calibration: invalid rho bracket");
    const SinrSamplePool pool(tmpl, profile, seed, opts);
    auto error_db = [&](double rho) {
        return linear_to_db(pool.percentile_at(rho, opts.percentile)) - opts.target_db;
    };

    double lo = std::log(opts.rho_lo);
    double hi = std::log(opts.rho_hi);
    const double err_lo = error_db(opts.rho_lo);
    const double err_hi = error_db(opts.rho_hi);
    if (!(err_lo < 0.0 && err_hi > 0.0)) {
        const double floor_db = linear_to_db(pool.saturation_percentile(opts.percentile));
        throw CalibrationError("calibration: percentile does not cross the target inside [" +
                               std::to_string(opts.rho_lo) + ", " + std::to_string(opts.rho_hi) + "] (" +
                               std::to_string(err_lo) + " dB, " + std::to_string(err_hi) +
                               " dB from target; interference-limited percentile " + std::to_string(floor_db) +
                               " dB)");
    }

    CalibrationResult result;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double err = error_db(std::exp(mid));
        result = {std::exp(mid), err + opts.target_db, it};
        if (std::abs(err) <= opts.tolerance_db)
            return result;
        (err < 0.0 ? lo : hi) = mid;
    }
    if (std::abs(result.percentile_db - opts.target_db) > opts.accept_db)
        throw CalibrationError("calibration: bisection did not reach the tolerance");
    return result;
}

double pooled_percentile_db(const CellConfig& cell, const PropagationProfile& profile, std::uint64_t seed,
                            const CalibrationOptions& opts)
{
    const SinrSamplePool pool(cell, profile, seed, opts);
    return linear_to_db(pool.percentile_at(cell.rho_const, opts.percentile));
}

} // namespace scmimo
