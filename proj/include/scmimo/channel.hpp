// SPDX-License-Identifier: Apache-2.0

#ifndef SCMIMO_CHANNEL_HPP
#define SCMIMO_CHANNEL_HPP

#include "scmimo/rng.hpp"
#include "scmimo/scenario.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace scmimo {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Space-constrained ULA: the aperture (in carrier wavelengths) is fixed and
/// the element spacing shrinks as antennas are added.
class ArrayGeometry {
public:
    ArrayGeometry(int num_antennas, double aperture_wl);

    int num_antennas() const { return num_antennas_; }
    double aperture_wl() const { return aperture_wl_; }
    double spacing_wl() const { return aperture_wl_ / static_cast<double>(num_antennas_ - 1); }

private:
    int num_antennas_;
    double aperture_wl_;
};

struct SteeringMatrix {
    CMatrix entries;              // M x P
    std::vector<double> angles;   // generating DOAs, one per column
};

/// Diffuse and specular amplitude weights of a Ricean link with P paths.
struct RiceWeights {
    double diffuse = 0.0;  // 1/sqrt(P) * sqrt(1/(1+K))
    double specular = 0.0; // sqrt(K/(1+K))
};

RiceWeights rice_weights(double k_factor, int num_paths);

CVector steering_vector(const ArrayGeometry& geom, double phi_rad);
CVector specular_vector(const ArrayGeometry& geom, double los_angle_rad);
SteeringMatrix steering_matrix(const ArrayGeometry& geom, std::span<const double> angles);

/// Deterministic per-terminal structures reused across fading draws.
struct PreparedLink {
    SteeringMatrix steering;
    CVector specular;
    RiceWeights weights;
    double k_factor = 0.0;
    double beta = 1.0;
};

PreparedLink prepare_link(const ArrayGeometry& geom, const TerminalLink& link);
std::vector<PreparedLink> prepare_links(const ArrayGeometry& geom, std::span<const TerminalLink> links);

/// One fast-fading draw g = w' A h + w_bar h_bar, h ~ CN(0, I_P).
CVector draw_channel(const PreparedLink& link, Rng& rng);
CVector draw_channel(const ArrayGeometry& geom, const TerminalLink& link, Rng& rng);

/// M x L channel with one independent draw per column, in terminal order.
CMatrix draw_channel_matrix(std::span<const PreparedLink> links, Rng& rng);
CMatrix draw_channel_matrix(const ArrayGeometry& geom, std::span<const TerminalLink> links, Rng& rng);

} // namespace scmimo

#endif
