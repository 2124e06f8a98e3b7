// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_CLOSEDFORM_HPP
#define SCMIMO_CLOSEDFORM_HPP

#include "scmimo/channel.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace scmimo {

/// Closed-form channel moments for every terminal of a drop.
///   delta(l)     = E|g_l|^4
///   chi(l)       = E|g_l|^2
///   varphi(l, k) = E|g_l^H g_k|^2   (diagonal unused, left at zero)
struct MomentSet {
    std::vector<double> delta;
    std::vector<double> chi;
    Eigen::MatrixXd varphi;
};

/// tr[(A^H A)^2], via the P x P Gram matrix.
double gram_trace_squared(const CMatrix& A);

/// tr[A_k A_k^H A_l A_l^H] = |A_k^H A_l|_F^2.
double cross_trace(const CMatrix& A_l, const CMatrix& A_k);

/// x^H A A^H x = |A^H x|^2.
double projected_energy(const CMatrix& A, const CVector& x);

double delta_l(const SteeringMatrix& A, const CVector& h_bar, double k_factor);
double varphi_lk(const SteeringMatrix& A_l, const SteeringMatrix& A_k, const CVector& h_bar_l,
                 const CVector& h_bar_k, double k_l, double k_k);
double chi_l(double k_factor, int num_paths, int num_antennas);

double delta_l(const PreparedLink& link);
double varphi_lk(const PreparedLink& l, const PreparedLink& k);

MomentSet compute_moments(std::span<const PreparedLink> links);

double theorem1_sinr(const MomentSet& moments, std::span<const double> betas, double snr, int l);
std::vector<double> theorem1_sinrs(const MomentSet& moments, std::span<const double> betas, double snr);

/// Interference-limited value of theorem1_sinr as snr -> infinity. Infinite
/// when there is no interference (L = 1).
double theorem1_saturation(const MomentSet& moments, std::span<const double> betas, int l);

/// Sum over terminals of log2(1 + theorem1_sinr).
double approx_sum_se(std::span<const double> betas, const MomentSet& moments, double snr);

/// Rayleigh fading, per-terminal steering matrices.
double corollary1_sinr(std::span<const SteeringMatrix> steering, std::span<const double> betas, double snr,
                       int l, int num_paths, int num_antennas);

/// Rayleigh fading, one steering matrix shared by all terminals.
double corollary2_sinr(const SteeringMatrix& A, std::span<const double> betas, double snr, int l,
                       int num_paths, int num_antennas);

/// Ricean fading with a shared steering matrix and per-terminal LoS vectors
/// and K-factors. The pure-LoS interference term is taken as M^2.
double corollary3_sinr(const SteeringMatrix& A, std::span<const CVector> h_bars, std::span<const double> k_factors,
                       std::span<const double> betas, double snr, int l);

} // namespace scmimo

#endif
