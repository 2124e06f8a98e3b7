// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "scmimo/channel.hpp"
#include "scmimo/closedform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace scmimo;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

TerminalLink make_link(std::vector<double> angles, double los, double k)
{
    TerminalLink t;
    t.diffuse_angles_rad = std::move(angles);
    t.los_angle_rad = los;
    t.k_factor = k;
    t.is_los = k > 0.0;
    return t;
}

} // namespace

TEST_CASE("array geometry")
{
    const ArrayGeometry g(64, 8.0);
    CHECK(g.spacing_wl() == Approx(8.0 / 63.0));
    const ArrayGeometry h(33, 8.0);
    CHECK(h.spacing_wl() * 32 == Approx(g.spacing_wl() * 63));
    CHECK_THROWS(ArrayGeometry(1, 8.0));
    CHECK_THROWS(ArrayGeometry(4, 0.0));
}

TEST_CASE("steering vector values")
{
    const auto ones = steering_vector(ArrayGeometry(5, 2.0), 0.0);
    for (int m = 0; m < 5; ++m)
        CHECK(std::abs(ones(m) - std::complex<double>(1.0, 0.0)) < 1e-15);

    const auto endfire = steering_vector(ArrayGeometry(2, 0.5), kPi / 2);
    CHECK(std::abs(endfire(1) - std::complex<double>(-1.0, 0.0)) < 1e-12);

    const auto v = steering_vector(ArrayGeometry(3, 1.0), kPi / 6);
    CHECK(std::abs(v(0) - std::complex<double>(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(v(1) - std::complex<double>(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(v(2) - std::complex<double>(-1.0, 0.0)) < 1e-12);

    const ArrayGeometry g(17, 8.0);
    for (double phi : {-1.5, -0.3, 0.0, 0.7, 1.2})
        CHECK(steering_vector(g, phi).squaredNorm() == Approx(17.0).epsilon(1e-13));
    CHECK((specular_vector(g, 0.4) - steering_vector(g, 0.4)).norm() == 0.0);
    CHECK_THROWS_AS(steering_vector(g, 1.6), std::domain_error);
}

TEST_CASE("steering matrix")
{
    const ArrayGeometry g(8, 2.0);
    const std::vector<double> angles{0.1, -0.5, 1.1};
    const auto A = steering_matrix(g, angles);
    CHECK(A.entries.rows() == 8);
    CHECK(A.entries.cols() == 3);
    CHECK(std::abs((A.entries.adjoint() * A.entries).trace() - std::complex<double>(24.0, 0.0)) < 1e-12);

    const std::vector<double> same{0.3, 0.3};
    const auto B = steering_matrix(g, same);
    const CMatrix gram = B.entries.adjoint() * B.entries;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(gram(i, j) - std::complex<double>(8.0, 0.0)) < 1e-12);
    CHECK_THROWS(steering_matrix(g, std::vector<double>{}));
}

TEST_CASE("rice weights")
{
    const auto w0 = rice_weights(0.0, 4);
    CHECK(w0.diffuse == Approx(0.5));
    CHECK(w0.specular == 0.0);
    const auto winf = rice_weights(std::numeric_limits<double>::infinity(), 4);
    CHECK(winf.diffuse == 0.0);
    CHECK(winf.specular == 1.0);
    for (double k : {0.3, 1.0, 17.0}) {
        const auto w = rice_weights(k, 3);
        CHECK(3 * w.diffuse * w.diffuse + w.specular * w.specular == Approx(1.0));
    }
}

TEST_CASE("pure LoS channel is the specular vector")
{
    const ArrayGeometry g(6, 4.0);
    auto link = make_link({0.2, -0.1}, 0.35, std::numeric_limits<double>::infinity());
    Rng rng(3);
    const auto h = draw_channel(g, link, rng);
    CHECK((h - specular_vector(g, 0.35)).norm() < 1e-14);
}

TEST_CASE("channel energy and fourth moment")
{
    Rng rng(11);
    {
        const ArrayGeometry g(16, 8.0);
        const auto link = prepare_link(g, make_link({0.1, 0.4, -0.6, 1.0}, 0.0, 0.0));
        double e = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
            e += draw_channel(link, rng).squaredNorm();
        CHECK(e / n == Approx(16.0).epsilon(0.01));
    }
    {
        const ArrayGeometry g(4, 1.0);
        const auto link = prepare_link(g, make_link({0.1, -0.3}, 0.2, 1.0));
        double s = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) {
            const double q = draw_channel(link, rng).squaredNorm();
            s += q * q;
        }
        CHECK(s / n == Approx(delta_l(link)).epsilon(0.01));
    }
}

TEST_CASE("channel matrix columns")
{
    const ArrayGeometry g(8, 2.0);
    std::vector<TerminalLink> one{make_link({0.2, 0.5}, 0.1, 2.0)};
    Rng a(99), b(99);
    const auto G = draw_channel_matrix(g, one, a);
    const auto v = draw_channel(g, one[0], b);
    CHECK(G.cols() == 1);
    CHECK((G.col(0) - v).norm() == 0.0);

    Rng c(5), d(5);
    std::vector<TerminalLink> two{make_link({0.2}, 0.0, 0.0), make_link({0.2}, 0.0, 0.0)};
    CHECK((draw_channel_matrix(g, two, c) - draw_channel_matrix(g, two, d)).norm() == 0.0);

    // Identical steering, independent h: the cross term averages to zero.
    Rng rng(21);
    std::complex<double> acc{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto H = draw_channel_matrix(g, two, rng);
        acc += H(0, 0) * std::conj(H(0, 1));
    }
    CHECK(std::abs(acc) / n < 5.0 / std::sqrt(static_cast<double>(n)));
}
