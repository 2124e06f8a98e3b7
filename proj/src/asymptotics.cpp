// SPDX-License-Identifier: Apache-2.0

#include "scmimo/asymptotics.hpp"
#include "scmimo/closedform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scmimo {

double theta(double phi1, double phi2, double aperture_wl)
{
    const double x = std::numbers::pi * aperture_wl * (std::sin(phi1) - std::sin(phi2));
    if (std::abs(x) < 1e-8)
        return 1.0 - x * x / 6.0;
    return std::abs(std::sin(x) / x);
}

namespace {

double theta_sq(double a, double b, double aperture_wl)
{
    const double t = theta(a, b, aperture_wl);
    return t * t;
}

double sum_theta_sq(std::span<const double> as, std::span<const double> bs, double aperture_wl)
{
    double s = 0.0;
    for (double a : as)
        for (double b : bs)
            s += theta_sq(a, b, aperture_wl);
    return s;
}

double sum_theta_sq(double a, std::span<const double> bs, double aperture_wl)
{
    double s = 0.0;
    for (double b : bs)
        s += theta_sq(a, b, aperture_wl);
    return s;
}

int paths_of(const TerminalLink& t)
{
    if (t.diffuse_angles_rad.empty())
        throw std::invalid_argument("terminal has no diffuse paths");
    return static_cast<int>(t.diffuse_angles_rad.size());
}

} // namespace

LimitTerms limit_terms(const TerminalLink& l, const TerminalLink& k, double aperture_wl)
{
    const RiceWeights wl = rice_weights(l.k_factor, paths_of(l));
    const RiceWeights wk = rice_weights(k.k_factor, paths_of(k));
    const double dl = wl.diffuse * wl.diffuse, sl = wl.specular * wl.specular;
    const double dk = wk.diffuse * wk.diffuse, sk = wk.specular * wk.specular;
    const auto& Al = l.diffuse_angles_rad;
    const auto& Ak = k.diffuse_angles_rad;

    LimitTerms t;
    t.delta1_bar = dl * dl * sum_theta_sq(Al, Al, aperture_wl);
    t.delta2_bar = 2.0 * dl * sl * sum_theta_sq(l.los_angle_rad, Al, aperture_wl);
    t.varphi_bar[0] = dl * dk * sum_theta_sq(Ak, Al, aperture_wl);
    t.varphi_bar[1] = dl * sk * sum_theta_sq(k.los_angle_rad, Al, aperture_wl);
    t.varphi_bar[2] = sl * dk * sum_theta_sq(l.los_angle_rad, Ak, aperture_wl);
    t.varphi_bar[3] = sl * sk * theta_sq(l.los_angle_rad, k.los_angle_rad, aperture_wl);
    return t;
}

LimitTerms finite_terms(const ArrayGeometry& geom, const TerminalLink& l, const TerminalLink& k)
{
    const PreparedLink pl = prepare_link(geom, l);
    const PreparedLink pk = prepare_link(geom, k);
    const double M2 = static_cast<double>(geom.num_antennas()) * geom.num_antennas();
    const double dl = pl.weights.diffuse * pl.weights.diffuse, sl = pl.weights.specular * pl.weights.specular;
    const double dk = pk.weights.diffuse * pk.weights.diffuse, sk = pk.weights.specular * pk.weights.specular;
    const auto& Al = pl.steering.entries;
    const auto& Ak = pk.steering.entries;

    LimitTerms t;
    t.delta1_bar = dl * dl * gram_trace_squared(Al) / M2;
    t.delta2_bar = 2.0 * dl * sl * projected_energy(Al, pl.specular) / M2;
    t.varphi_bar[0] = dl * dk * cross_trace(Al, Ak) / M2;
    t.varphi_bar[1] = dl * sk * projected_energy(Al, pk.specular) / M2;
    t.varphi_bar[2] = sl * dk * projected_energy(Ak, pl.specular) / M2;
    t.varphi_bar[3] = sl * sk * std::norm(pl.specular.dot(pk.specular)) / M2;
    return t;
}

LimitTable compute_limit_table(std::span<const TerminalLink> links, double aperture_wl)
{
    const std::size_t L = links.size();
    LimitTable table;
    table.varphi_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
    for (std::size_t l = 0; l < L; ++l) {
        const LimitTerms self = limit_terms(links[l], links[l], aperture_wl);
        table.delta1_bar.push_back(self.delta1_bar);
        table.delta2_bar.push_back(self.delta2_bar);
        const RiceWeights w = rice_weights(links[l].k_factor, paths_of(links[l]));
        table.diffuse_weight2.push_back(w.diffuse * w.diffuse);
        table.specular_weight2.push_back(w.specular * w.specular);
        table.num_paths.push_back(paths_of(links[l]));
        for (std::size_t k = 0; k < L; ++k) {
            if (k == l)
                continue;
            const LimitTerms pair = limit_terms(links[l], links[k], aperture_wl);
            table.varphi_sum(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k))
                = pair.varphi_bar[0] + pair.varphi_bar[1] + pair.varphi_bar[2] + pair.varphi_bar[3];
        }
    }
    return table;
}

namespace {

double limit_interference(const LimitTable& table, std::span<const double> betas, double snr, int l)
{
    const std::size_t L = betas.size();
    if (table.delta1_bar.size() != L)
        throw std::invalid_argument("limit table does not match the number of link gains");
    if (l < 0 || static_cast<std::size_t>(l) >= L)
        throw std::out_of_range("terminal index out of range");
    if (L < 2)
        throw std::domain_error("limiting SINR is undefined for a single terminal");
    if (!(snr > 0.0))
        throw std::domain_error("limiting SINR requires a positive SNR");
    double s = 0.0;
    for (std::size_t k = 0; k < L; ++k)
        if (static_cast<int>(k) != l)
            s += betas[k] * table.varphi_sum(l, static_cast<Eigen::Index>(k));
    if (!(s > 0.0))
        throw std::domain_error("limiting SINR has a vanishing interference term");
    return s;
}

} // namespace

double theorem2_sinr(const LimitTable& table, std::span<const double> betas, double snr, int l)
{
    const double interference = limit_interference(table, betas, snr, l);
    const auto i = static_cast<std::size_t>(l);
    return betas[i] * (table.delta1_bar[i] + table.delta2_bar[i]) / interference;
}

double limiting_sum_se(const LimitTable& table, std::span<const double> betas, double snr)
{
    double s = 0.0;
    for (std::size_t l = 0; l < betas.size(); ++l)
        s += std::log2(1.0 + theorem2_sinr(table, betas, snr, static_cast<int>(l)));
    return s;
}

double full_limit_sinr(const LimitTable& table, std::span<const double> betas, double snr, int l)
{
    const double interference = limit_interference(table, betas, snr, l);
    const auto i = static_cast<std::size_t>(l);
    const double d = table.diffuse_weight2[i];
    const double s = table.specular_weight2[i];
    const double P = table.num_paths[i];
    const double extra = d * d * P * P + 2.0 * P * d * s + s * s;
    return betas[i] * (extra + table.delta1_bar[i] + table.delta2_bar[i]) / interference;
}

double full_limit_sum_se(const LimitTable& table, std::span<const double> betas, double snr)
{
    double s = 0.0;
    for (std::size_t l = 0; l < betas.size(); ++l)
        s += std::log2(1.0 + full_limit_sinr(table, betas, snr, static_cast<int>(l)));
    return s;
}

} // namespace scmimo
