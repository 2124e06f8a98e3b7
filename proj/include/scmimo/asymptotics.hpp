// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_ASYMPTOTICS_HPP
#define SCMIMO_ASYMPTOTICS_HPP

#include "scmimo/channel.hpp"
#include "scmimo/scenario.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace scmimo {

/// Large-array correlation kernel |sin(x)/x|, x = pi * aperture * (sin phi1 - sin phi2).
double theta(double phi1, double phi2, double aperture_wl);

/// M -> infinity limits of the non-vanishing moment terms, normalised by M^2,
/// for the ordered pair (l, k). delta*_bar belong to terminal l.
struct LimitTerms {
    double delta1_bar = 0.0;
    double delta2_bar = 0.0;
    std::array<double, 4> varphi_bar{}; // varphi_bar[i] holds the (i+1)-th term
};

LimitTerms limit_terms(const TerminalLink& l, const TerminalLink& k, double aperture_wl);

/// Finite-M counterparts of LimitTerms (each term divided by M^2), evaluated
/// on an explicit array. Converges to limit_terms as M grows.
LimitTerms finite_terms(const ArrayGeometry& geom, const TerminalLink& l, const TerminalLink& k);

/// Limit terms for every terminal and ordered pair of a drop.
struct LimitTable {
    std::vector<double> delta1_bar;
    std::vector<double> delta2_bar;
    std::vector<double> specular_weight2; // (eta_bar)^2 per terminal
    std::vector<double> diffuse_weight2;  // (eta')^2 per terminal
    std::vector<int> num_paths;
    Eigen::MatrixXd varphi_sum;           // sum of the four pair terms; diagonal zero
};

LimitTable compute_limit_table(std::span<const TerminalLink> links, double aperture_wl);

/// Limiting SINR exactly as the four-term/two-term ratio. snr cancels and is
/// only checked for positivity. Throws std::domain_error for L = 1.
double theorem2_sinr(const LimitTable& table, std::span<const double> betas, double snr, int l);

/// Sum over terminals of log2(1 + theorem2_sinr).
double limiting_sum_se(const LimitTable& table, std::span<const double> betas, double snr);

/// Limit of the finite-M closed form keeping every O(M^2) numerator term:
/// (eta')^4 P^2 + 2 P (eta')^2 (eta_bar)^2 + (eta_bar)^4 on top of the
/// theorem2 numerator. Same denominator as theorem2_sinr.
double full_limit_sinr(const LimitTable& table, std::span<const double> betas, double snr, int l);

double full_limit_sum_se(const LimitTable& table, std::span<const double> betas, double snr);

} // namespace scmimo

#endif
