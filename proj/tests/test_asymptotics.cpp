// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "scmimo/asymptotics.hpp"
#include "scmimo/closedform.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace scmimo;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

TerminalLink make_link(std::vector<double> angles, double los, double k, double beta = 1.0)
{
    TerminalLink t;
    t.diffuse_angles_rad = std::move(angles);
    t.los_angle_rad = los;
    t.k_factor = k;
    t.is_los = k > 0.0;
    t.beta = beta;
    return t;
}

std::vector<TerminalLink> two_terminals(double k0, double k1)
{
    return {make_link({0.1, -0.2, 0.35}, 0.05, k0, 1.0), make_link({-0.4, 0.25, 0.6}, -0.15, k1, 0.5)};
}

} // namespace

TEST_CASE("theta kernel")
{
    CHECK(theta(0.4, 0.4, 8.0) == 1.0);
    CHECK(theta(std::asin(0.125), 0.0, 8.0) < 1e-15);
    CHECK(theta(kPi / 6, 0.0, 1.0) == Approx(2.0 / kPi).epsilon(1e-12));
    CHECK(theta(0.3, -0.2, 8.0) == theta(-0.2, 0.3, 8.0));
    CHECK(theta(1e-12, 0.0, 8.0) == Approx(1.0));

    Rng rng(4);
    std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
    for (int M : {100, 1000}) {
        const ArrayGeometry g(M, 8.0);
        for (int i = 0; i < 100; ++i) {
            const double a = u(rng), b = u(rng);
            const double t = theta(a, b, 8.0);
            CHECK(t >= 0.0);
            CHECK(t <= 1.0);
            const double finite = std::abs(steering_vector(g, a).dot(steering_vector(g, b))) / M;
            CHECK(std::abs(finite - t) < 5.0 / M);
        }
    }
}

TEST_CASE("limit terms special cases")
{
    const auto same = make_link({0.2, 0.2, 0.2}, 0.2, 1.0);
    const auto t = limit_terms(same, same, 8.0);
    const double wd2 = 1.0 / (3.0 * 2.0);
    CHECK(t.delta1_bar == Approx(wd2 * wd2 * 9.0));
    CHECK(t.varphi_bar[0] == Approx(wd2 * wd2 * 9.0));

    const auto links = two_terminals(0.0, 0.0);
    const auto r = limit_terms(links[0], links[1], 8.0);
    CHECK(r.delta2_bar == 0.0);
    CHECK(r.varphi_bar[1] == 0.0);
    CHECK(r.varphi_bar[2] == 0.0);
    CHECK(r.varphi_bar[3] == 0.0);

    const auto mixed = two_terminals(2.0, 5.0);
    const auto m = limit_terms(mixed[0], mixed[1], 8.0);
    const auto w0 = rice_weights(2.0, 3);
    CHECK(m.delta1_bar >= std::pow(w0.diffuse, 4) * 3.0);
    CHECK(m.varphi_bar[3] <= (2.0 / 3.0) * (5.0 / 6.0) + 1e-15);
}

TEST_CASE("finite-M terms converge at M=2000")
{
    const auto links = two_terminals(1.5, 4.0);
    const ArrayGeometry g(2000, 8.0);
    const auto lim = limit_terms(links[0], links[1], 8.0);
    const auto fin = finite_terms(g, links[0], links[1]);
    CHECK(fin.delta1_bar == Approx(lim.delta1_bar).epsilon(0.01));
    CHECK(fin.delta2_bar == Approx(lim.delta2_bar).epsilon(0.01));
    for (int i = 0; i < 4; ++i)
        CHECK(fin.varphi_bar[i] == Approx(lim.varphi_bar[i]).epsilon(0.01));
}

TEST_CASE("theorem 2 properties")
{
    const auto links = two_terminals(0.0, 3.0);
    const auto b = betas_of(links);
    const auto table = compute_limit_table(links, 8.0);
    for (int l = 0; l < 2; ++l)
        CHECK(theorem2_sinr(table, b, 1.0, l) == theorem2_sinr(table, b, 100.0, l));
    CHECK(limiting_sum_se(table, b, 1.0) == limiting_sum_se(table, b, 1e3));

    double by_hand = 0.0;
    for (int l = 0; l < 2; ++l)
        by_hand += std::log2(1.0 + theorem2_sinr(table, b, 1.0, l));
    CHECK(limiting_sum_se(table, b, 1.0) == Approx(by_hand));

    const auto los = two_terminals(kInf, kInf);
    const auto tlos = compute_limit_table(los, 8.0);
    CHECK(theorem2_sinr(tlos, b, 1.0, 0) == 0.0);
    const double th = theta(los[0].los_angle_rad, los[1].los_angle_rad, 8.0);
    CHECK(full_limit_sinr(tlos, b, 1.0, 0) == Approx(b[0] / (b[1] * th * th)));

    const std::vector<TerminalLink> single{links[0]};
    const std::vector<double> b1{1.0};
    CHECK_THROWS_AS(theorem2_sinr(compute_limit_table(single, 8.0), b1, 1.0, 0), std::domain_error);
}

TEST_CASE("identical limits give L log2(1+s)")
{
    const auto a = make_link({0.1, 0.3}, 0.0, 0.0);
    std::vector<TerminalLink> links{a, a, a};
    const std::vector<double> b{1.0, 1.0, 1.0};
    const auto t = compute_limit_table(links, 8.0);
    const double s = theorem2_sinr(t, b, 1.0, 0);
    CHECK(limiting_sum_se(t, b, 1.0) == Approx(3.0 * std::log2(1.0 + s)));
}

TEST_CASE("full limit differs from theorem 2 by the dropped terms")
{
    const auto links = two_terminals(0.0, 0.0);
    const auto b = betas_of(links);
    const auto t = compute_limit_table(links, 8.0);
    const double denom = b[1] * t.varphi_sum(0, 1);
    // K=0: the missing numerator term is (eta')^4 P^2 = 1.
    CHECK(full_limit_sinr(t, b, 1.0, 0) - theorem2_sinr(t, b, 1.0, 0) == Approx(b[0] / denom));
}

TEST_CASE("finite-M theorem 1 approaches the full limit")
{
    const auto links = two_terminals(8.0, 12.0);
    const auto b = betas_of(links);
    const auto t = compute_limit_table(links, 8.0);
    const ArrayGeometry g(4096, 8.0);
    const auto m = compute_moments(prepare_links(g, links));
    const double t1 = theorem1_sinr(m, b, 10.0, 0);
    const double full = full_limit_sinr(t, b, 10.0, 0);
    const double paper = theorem2_sinr(t, b, 10.0, 0);
    CHECK(std::abs(t1 - full) < std::abs(t1 - paper));
}
