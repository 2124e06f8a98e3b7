// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "scmimo/closedform.hpp"
#include "scmimo/mrc.hpp"

#include <cmath>
#include <vector>

using namespace scmimo;
using doctest::Approx;

namespace {

std::vector<TerminalLink> small_drop()
{
    std::vector<TerminalLink> links(4);
    const double ks[] = {0.0, 3.0, 0.5, 10.0};
    const double betas[] = {1.0, 0.4, 2.5, 0.8};
    Rng rng(17);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int l = 0; l < 4; ++l) {
        links[l].k_factor = ks[l];
        links[l].is_los = ks[l] > 0.0;
        links[l].beta = betas[l];
        links[l].los_angle_rad = u(rng);
        for (int p = 0; p < 8; ++p)
            links[l].diffuse_angles_rad.push_back(u(rng));
    }
    return links;
}

} // namespace

TEST_CASE("instantaneous sinr hand values")
{
    CMatrix G(1, 2);
    G << 1.0, 1.0;
    const std::vector<double> b{1.0, 1.0};
    CHECK(instantaneous_sinr(G, b, 1.0, 0) == Approx(0.5));
    CHECK(instantaneous_sinr(G, b, 0.0, 0) == 0.0);

    CMatrix g1(3, 1);
    g1 << 1.0, std::complex<double>(0.0, 2.0), 0.5;
    const std::vector<double> b1{0.7};
    CHECK(instantaneous_sinr(g1, b1, 3.0, 0) == Approx(3.0 * 0.7 * 5.25));

    CMatrix zero = CMatrix::Zero(3, 2);
    CHECK(instantaneous_sinr(zero, b, 10.0, 1) == 0.0);

    const std::vector<double> s{3.0, 7.0};
    CHECK(sum_rate(s) == Approx(5.0));
    CHECK(sum_spectral_efficiency(G, b, 0.0) == 0.0);
}

TEST_CASE("sinr saturates and is monotone")
{
    const ArrayGeometry g(16, 4.0);
    auto links = small_drop();
    Rng rng(4);
    const auto G = draw_channel_matrix(g, links, rng);
    const auto b = betas_of(links);
    const CMatrix gram = G.adjoint() * G;
    for (int l = 0; l < 4; ++l) {
        double interf = 0.0;
        for (int k = 0; k < 4; ++k)
            if (k != l)
                interf += b[k] * std::norm(gram(l, k));
        const double limit = b[l] * std::pow(gram(l, l).real(), 2) / interf;
        CHECK(std::abs(instantaneous_sinr(G, b, 1e6, l) - limit) < 1e-3 * limit);
        double prev = 0.0;
        for (double snr : {0.1, 1.0, 10.0, 100.0}) {
            const double v = instantaneous_sinr(G, b, snr, l);
            CHECK(v > prev);
            prev = v;
        }
        auto b2 = b;
        for (auto& x : b2)
            x *= 2.0;
        CHECK(instantaneous_sinr(G, b2, 1.0, l) > instantaneous_sinr(G, b, 1.0, l));
    }
    const auto all = sinrs_from_gram(gram, b, 10.0);
    for (int l = 0; l < 4; ++l)
        CHECK(all[l] == Approx(instantaneous_sinr(G, b, 10.0, l)).epsilon(1e-12));
}

TEST_CASE("method names round trip")
{
    for (auto m : {Method::MonteCarlo, Method::Theorem1, Method::Theorem2, Method::FullLimit, Method::Corollary1,
                   Method::Corollary2, Method::Corollary3})
        CHECK(method_from_name(method_name(m)) == m);
    CHECK_THROWS(method_from_name("nope"));
}

TEST_CASE("running moments merge")
{
    RunningMoments a, b, all;
    for (int i = 0; i < 10; ++i) {
        const double x = i * i * 0.5;
        (i < 4 ? a : b).add(x);
        all.add(x);
    }
    const auto m = RunningMoments::merge(a, b);
    CHECK(m.count == all.count);
    CHECK(m.mean == Approx(all.mean));
    CHECK(m.m2 == Approx(all.m2));
}

TEST_CASE("monte carlo single realization and determinism")
{
    const ArrayGeometry g(8, 2.0);
    auto links = small_drop();
    const auto b = betas_of(links);
    McOptions opts;
    opts.seed = 123;
    const auto one = mc_expected_sinr(g, links, 5.0, 1, opts);
    Rng rng = make_stream(123, {0});
    const auto G = draw_channel_matrix(g, links, rng);
    for (int l = 0; l < 4; ++l)
        CHECK(one.per_terminal_sinr[l] == Approx(instantaneous_sinr(G, b, 5.0, l)).epsilon(1e-12));
    CHECK(mc_ergodic_sum_se(g, links, 5.0, 1, opts).sum_se_bits ==
          Approx(sum_spectral_efficiency(G, b, 5.0)).epsilon(1e-12));

    opts.threads = 1;
    const auto r1 = mc_expected_sinr(g, links, 5.0, 1000, opts);
    opts.threads = 4;
    const auto r4 = mc_expected_sinr(g, links, 5.0, 1000, opts);
    CHECK(r1.per_terminal_sinr == r4.per_terminal_sinr);
    CHECK(r1.sum_se_bits == r4.sum_se_bits);
    CHECK(*r1.mc_std_err == *r4.mc_std_err);
}

TEST_CASE("pure LoS has no fading variance")
{
    const ArrayGeometry g(8, 2.0);
    auto links = small_drop();
    for (auto& l : links)
        l.k_factor = std::numeric_limits<double>::infinity();
    McOptions opts;
    const auto r = mc_expected_sinr(g, links, 5.0, 200, opts);
    for (double se : *r.mc_std_err)
        CHECK(se < 1e-9 * (1.0 + std::abs(r.per_terminal_sinr[0])));
}

TEST_CASE("standard error scales with sample size")
{
    const ArrayGeometry g(8, 2.0);
    auto links = small_drop();
    McOptions opts;
    opts.seed = 9;
    const auto small = mc_expected_sinr(g, links, 5.0, 4000, opts);
    const auto big = mc_expected_sinr(g, links, 5.0, 40000, opts);
    for (int l = 0; l < 4; ++l) {
        const double ratio = (*small.mc_std_err)[l] / (*big.mc_std_err)[l];
        CHECK(ratio == Approx(std::sqrt(10.0)).epsilon(0.2));
    }
}

TEST_CASE("sum SE is monotone in snr on fixed draws")
{
    const ArrayGeometry g(8, 2.0);
    auto links = small_drop();
    const auto prepared = prepare_links(g, links);
    const std::vector<double> snrs{0.1, 1.0, 10.0, 100.0};
    McOptions opts;
    const auto pts = mc_fading_sweep(prepared, snrs, 500, opts);
    for (std::size_t i = 1; i < pts.size(); ++i)
        CHECK(pts[i].sum_se_mean >= pts[i - 1].sum_se_mean);
}

TEST_CASE("monte carlo sum SE agrees with the closed form at M=32")
{
    const ArrayGeometry g(32, 8.0);
    auto links = small_drop();
    const auto b = betas_of(links);
    McOptions opts;
    opts.seed = 77;
    const double snr = 10.0;
    const auto mc = mc_ergodic_sum_se(g, links, snr, 100000, opts);
    const auto mom = compute_moments(prepare_links(g, links));
    CHECK(approx_sum_se(b, mom, snr) == Approx(mc.sum_se_bits).epsilon(0.05));

    // Without interference the mean SINR is exactly snr b M.
    const std::vector<TerminalLink> one{links[0]};
    const auto single = mc_expected_sinr(g, one, snr, 100000, opts);
    const double se = (*single.mc_std_err)[0];
    CHECK(std::abs(single.per_terminal_sinr[0] - snr * b[0] * 32.0) < 4.0 * se);
}
