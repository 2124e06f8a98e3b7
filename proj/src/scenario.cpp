// SPDX-License-Identifier: Apache-2.0

#include "scmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scmimo {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require(bool ok, const char* what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

} // namespace

void PropagationProfile::validate() const
{
    require(alpha_los > 0.0 && alpha_nlos > 0.0, "profile: attenuation exponents must be positive");
    require(sigma_sh_los_db >= 0.0 && sigma_sh_nlos_db >= 0.0, "profile: shadow-fading std must be non-negative");
    require(k_std_db >= 0.0, "profile: K-factor std must be non-negative");
    require(p_out >= 0.0 && p_out <= 1.0, "profile: outage probability must lie in [0, 1]");
    if (band == Band::MmWave)
        require(omega_los_inv_m > 0.0, "profile: mmWave LoS decay length must be positive");
}

PropagationProfile umi_microwave_profile()
{
    PropagationProfile p;
    p.name = "umi-microwave-2ghz";
    p.band = Band::Microwave;
    p.carrier_freq_ghz = 2.0;
    p.alpha_los = 2.2;
    p.alpha_nlos = 3.67;
    p.sigma_sh_los_db = 3.0;
    p.sigma_sh_nlos_db = 4.0;
    p.k_mean_db = 9.0;
    p.k_std_db = 5.0;
    p.omega_los_inv_m = 67.1;
    p.p_out = 0.0;
    return p;
}

PropagationProfile umi_mmwave_profile()
{
    PropagationProfile p;
    p.name = "umi-mmwave-28ghz";
    p.band = Band::MmWave;
    p.carrier_freq_ghz = 28.0;
    p.alpha_los = 2.0;
    p.alpha_nlos = 2.92;
    p.sigma_sh_los_db = 5.8;
    p.sigma_sh_nlos_db = 8.7;
    p.k_mean_db = 12.0;
    p.k_std_db = 3.0;
    p.omega_los_inv_m = 67.1;
    p.p_out = 0.0;
    return p;
}

PropagationProfile profile_by_name(std::string_view name)
{
    if (name == "umi-microwave-2ghz")
        return umi_microwave_profile();
    if (name == "umi-mmwave-28ghz")
        return umi_mmwave_profile();
    throw std::invalid_argument("unknown propagation profile '" + std::string(name) + "'");
}

std::vector<std::string> builtin_profile_names()
{
    return {"umi-microwave-2ghz", "umi-mmwave-28ghz"};
}

void CellConfig::validate() const
{
    require(exclusion_radius_m > 0.0 && exclusion_radius_m < radius_m,
            "cell: need 0 < exclusion_radius_m < radius_m");
    require(rho_const > 0.0, "cell: rho_const must be positive");
    require(num_terminals >= 1, "cell: num_terminals must be >= 1");
    require(num_paths >= 1, "cell: num_paths must be >= 1");
    require(angular_support.lo <= angular_support.hi, "cell: angular support lower bound exceeds upper bound");
    require(angular_support.lo >= -kHalfPi && angular_support.hi <= kHalfPi,
            "cell: angular support must lie inside [-pi/2, pi/2]");
    require(noise_power >= 0.0, "cell: noise_power must be non-negative");
}

double los_probability(double r_m, const PropagationProfile& profile)
{
    if (!(r_m > 0.0))
        throw std::domain_error("los_probability: distance must be positive");
    switch (profile.band) {
    case Band::Microwave: {
        const double e = std::exp(-r_m / 36.0);
        return std::min(18.0 / r_m, 1.0) * (1.0 - e) + e;
    }
    case Band::MmWave:
        return (1.0 - profile.p_out) * std::exp(-r_m / profile.omega_los_inv_m);
    }
    return 0.0;
}

double link_gain(double r_m, bool is_los, double shadow_db, const PropagationProfile& profile,
                 const CellConfig& cell)
{
    if (!(r_m >= cell.exclusion_radius_m))
        throw std::domain_error("link_gain: distance below the exclusion radius");
    return cell.rho_const * db_to_linear(shadow_db)
           * std::pow(cell.exclusion_radius_m / r_m, profile.alpha(is_los));
}

double los_angle_from_uniform(double u, LosAngleMode mode, const AngularSupport& support)
{
    if (mode == LosAngleMode::Geometric) {
        // asin(sin az) folds the full azimuth circle onto the front half-plane.
        const double az = std::numbers::pi * (2.0 * u - 1.0);
        return std::clamp(std::asin(std::sin(az)), -kHalfPi, kHalfPi);
    }
    return std::clamp(support.lo + (support.hi - support.lo) * u, support.lo, support.hi);
}

TerminalLink sample_terminal(Rng& rng, const CellConfig& cell, const PropagationProfile& profile)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> std_normal(0.0, 1.0);

    TerminalLink t;
    const double r0 = cell.exclusion_radius_m;
    const double R = cell.radius_m;
    // Inverse CDF of the area-uniform radius on the annulus [r0, R].
    const double u = unit(rng);
    t.distance_m = std::clamp(std::sqrt(r0 * r0 + u * (R * R - r0 * r0)), r0, R);

    t.is_los = unit(rng) < los_probability(t.distance_m, profile);
    t.shadow_db = profile.sigma_sh_db(t.is_los) * std_normal(rng);
    t.beta = link_gain(t.distance_m, t.is_los, t.shadow_db, profile, cell);

    const double k_db = profile.k_mean_db + profile.k_std_db * std_normal(rng);
    t.k_factor = t.is_los ? db_to_linear(k_db) : 0.0;

    t.los_angle_rad = los_angle_from_uniform(unit(rng), cell.los_angle_mode, cell.angular_support);

    std::uniform_real_distribution<double> doa(cell.angular_support.lo, cell.angular_support.hi);
    t.diffuse_angles_rad.resize(static_cast<std::size_t>(cell.num_paths));
    for (auto& a : t.diffuse_angles_rad)
        a = cell.angular_support.lo == cell.angular_support.hi ? cell.angular_support.lo : doa(rng);
    return t;
}

std::vector<TerminalLink> sample_drop(Rng& rng, const CellConfig& cell, const PropagationProfile& profile)
{
    std::vector<TerminalLink> links;
    links.reserve(static_cast<std::size_t>(cell.num_terminals));
    for (int l = 0; l < cell.num_terminals; ++l)
        links.push_back(sample_terminal(rng, cell, profile));
    return links;
}

std::vector<double> betas_of(const std::vector<TerminalLink>& links)
{
    std::vector<double> b;
    b.reserve(links.size());
    for (const auto& t : links)
        b.push_back(t.beta);
    return b;
}

} // namespace scmimo
