// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "scmimo/calibration.hpp"

#include <cmath>
#include <vector>

using namespace scmimo;
using doctest::Approx;

namespace {

CalibrationOptions small_opts()
{
    CalibrationOptions o;
    o.num_antennas = 16;
    o.num_terminals = 4;
    o.n_drops = 50;
    o.n_fading = 5;
    return o;
}

CellConfig template_cell()
{
    CellConfig c;
    c.num_paths = 4;
    c.angular_support = {-0.2, 0.2};
    return c;
}

} // namespace

TEST_CASE("empirical percentile")
{
    const std::vector<double> v{5.0, 1.0, 3.0, 2.0, 4.0};
    CHECK(empirical_percentile(v, 0.0) == 1.0);
    CHECK(empirical_percentile(v, 1.0) == 5.0);
    CHECK(empirical_percentile(v, 0.5) == 3.0);
    CHECK(empirical_percentile(v, 0.1) == Approx(1.4));
    CHECK_THROWS(empirical_percentile({}, 0.5));
    CHECK_THROWS(empirical_percentile(v, 1.5));
}

TEST_CASE("pooled percentile is monotone in the attenuation constant")
{
    const auto opts = small_opts();
    const SinrSamplePool pool(template_cell(), umi_microwave_profile(), 3, opts);
    CHECK(pool.size() == 4 * 50 * 5);
    double prev = 0.0;
    for (double c : {1e-4, 1e-2, 1.0, 1e2, 1e4}) {
        const double v = pool.percentile_at(c, 0.05);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(prev <= pool.saturation_percentile(0.05));
}

TEST_CASE("noise-free calibration is ill-posed")
{
    auto cell = template_cell();
    cell.noise_power = 0.0;
    CHECK_THROWS_AS(calibrate_rho_const(cell, umi_microwave_profile(), 1, small_opts()), CalibrationError);
}

TEST_CASE("interference floor below target is reported")
{
    auto opts = small_opts();
    opts.target_db = 200.0;
    CHECK_THROWS_AS(calibrate_rho_const(template_cell(), umi_microwave_profile(), 1, opts), CalibrationError);
}

TEST_CASE("calibration reproduces the target on a fresh seed")
{
    auto opts = small_opts();
    opts.statistic = CalibrationStatistic::Snr;
    opts.n_drops = 2000;
    auto cell = template_cell();
    const auto r = calibrate_rho_const(cell, umi_microwave_profile(), 10, opts);
    CHECK(std::abs(r.percentile_db) <= opts.tolerance_db);
    cell.rho_const = r.rho_const;
    CHECK(std::abs(pooled_percentile_db(cell, umi_microwave_profile(), 11, opts)) < 0.5);

    // With one terminal the SINR statistic has no interference floor.
    auto one = small_opts();
    one.num_terminals = 1;
    const auto s = calibrate_rho_const(template_cell(), umi_microwave_profile(), 4, one);
    CHECK(std::abs(s.percentile_db) <= one.tolerance_db);
}

TEST_CASE("calibration is thread independent")
{
    auto opts = small_opts();
    opts.statistic = CalibrationStatistic::Snr;
    const auto a = calibrate_rho_const(template_cell(), umi_microwave_profile(), 2, opts);
    opts.threads = 4;
    const auto b = calibrate_rho_const(template_cell(), umi_microwave_profile(), 2, opts);
    CHECK(a.rho_const == b.rho_const);
}
