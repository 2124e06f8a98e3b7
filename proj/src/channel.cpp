// SPDX-License-Identifier: Apache-2.0

#include "scmimo/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scmimo {

ArrayGeometry::ArrayGeometry(int num_antennas, double aperture_wl)
    : num_antennas_(num_antennas), aperture_wl_(aperture_wl)
{
    if (num_antennas < 2)
        throw std::invalid_argument("ArrayGeometry: need at least two antennas");
    if (!(aperture_wl > 0.0))
        throw std::invalid_argument("ArrayGeometry: aperture must be positive");
}

RiceWeights rice_weights(double k_factor, int num_paths)
{
    if (k_factor < 0.0 || std::isnan(k_factor))
        throw std::invalid_argument("rice_weights: K-factor must be non-negative");
    if (num_paths < 1)
        throw std::invalid_argument("rice_weights: need at least one path");
    if (std::isinf(k_factor))
        return {0.0, 1.0};
    return {std::sqrt(1.0 / (1.0 + k_factor)) / std::sqrt(static_cast<double>(num_paths)),
            std::sqrt(k_factor / (1.0 + k_factor))};
}

CVector steering_vector(const ArrayGeometry& geom, double phi_rad)
{
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    if (!(std::abs(phi_rad) <= kHalfPi))
        throw std::domain_error("steering_vector: angle outside [-pi/2, pi/2]");
    const int M = geom.num_antennas();
    const double increment = 2.0 * std::numbers::pi * geom.spacing_wl() * std::sin(phi_rad);
    CVector a(M);
    for (int m = 0; m < M; ++m)
        a[m] = std::polar(1.0, increment * static_cast<double>(m));
    return a;
}

CVector specular_vector(const ArrayGeometry& geom, double los_angle_rad)
{
    return steering_vector(geom, los_angle_rad);
}

SteeringMatrix steering_matrix(const ArrayGeometry& geom, std::span<const double> angles)
{
    if (angles.empty())
        throw std::invalid_argument("steering_matrix: empty angle list");
    SteeringMatrix s;
    s.entries.resize(geom.num_antennas(), static_cast<Eigen::Index>(angles.size()));
    for (std::size_t i = 0; i < angles.size(); ++i)
        s.entries.col(static_cast<Eigen::Index>(i)) = steering_vector(geom, angles[i]);
    s.angles.assign(angles.begin(), angles.end());
    return s;
}

PreparedLink prepare_link(const ArrayGeometry& geom, const TerminalLink& link)
{
    PreparedLink p;
    p.steering = steering_matrix(geom, link.diffuse_angles_rad);
    p.specular = specular_vector(geom, link.los_angle_rad);
    p.weights = rice_weights(link.k_factor, static_cast<int>(link.diffuse_angles_rad.size()));
    p.k_factor = link.k_factor;
    p.beta = link.beta;
    return p;
}

std::vector<PreparedLink> prepare_links(const ArrayGeometry& geom, std::span<const TerminalLink> links)
{
    std::vector<PreparedLink> out;
    out.reserve(links.size());
    for (const auto& l : links)
        out.push_back(prepare_link(geom, l));
    return out;
}

CVector draw_channel(const PreparedLink& link, Rng& rng)
{
    const auto P = link.steering.entries.cols();
    CVector h(P);
    for (Eigen::Index i = 0; i < P; ++i)
        h[i] = draw_cn(rng);
    CVector g = link.weights.specular * link.specular;
    if (link.weights.diffuse != 0.0)
        g.noalias() += link.weights.diffuse * (link.steering.entries * h);
    return g;
}

CVector draw_channel(const ArrayGeometry& geom, const TerminalLink& link, Rng& rng)
{
    return draw_channel(prepare_link(geom, link), rng);
}

CMatrix draw_channel_matrix(std::span<const PreparedLink> links, Rng& rng)
{
    if (links.empty())
        throw std::invalid_argument("draw_channel_matrix: no terminals");
    CMatrix G(links.front().specular.size(), static_cast<Eigen::Index>(links.size()));
    for (std::size_t l = 0; l < links.size(); ++l)
        G.col(static_cast<Eigen::Index>(l)) = draw_channel(links[l], rng);
    return G;
}

CMatrix draw_channel_matrix(const ArrayGeometry& geom, std::span<const TerminalLink> links, Rng& rng)
{
    const auto prepared = prepare_links(geom, links);
    return draw_channel_matrix(prepared, rng);
}

} // namespace scmimo
