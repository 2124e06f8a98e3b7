// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "scmimo/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

using namespace scmimo;
using nlohmann::json;
using doctest::Approx;

namespace {

json small_spec(const std::string& kind)
{
    json j = {{"experiment", kind},
              {"id", "t"},
              {"system", {{"M", 16}, {"L", 3}, {"P", 4}, {"angular_support_pi", {-0.0625, 0.0625}}}},
              {"cell", {{"rho_const", 50.0}}},
              {"snr_db", {0.0, 20.0}},
              {"n_fading", 200},
              {"n_drops", 4},
              {"seed", 42}};
    return j;
}

std::string error_of(const json& j)
{
    try {
        parse_spec(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("spec validation names the offending key")
{
    auto j = small_spec("single");
    j["system"]["Q"] = 1;
    CHECK(error_of(j).find("system.Q") != std::string::npos);

    j = small_spec("single");
    j["system"].erase("M");
    CHECK(error_of(j).find("system.M") != std::string::npos);

    j = small_spec("snr_sweep");
    j.erase("snr_db");
    CHECK(error_of(j).find("snr_db") != std::string::npos);

    j = small_spec("single");
    j["tracked_terminal"] = 5;
    CHECK(!error_of(j).empty());

    j = small_spec("single");
    j["system"]["M"] = json::array({16, 32});
    CHECK(!error_of(j).empty());

    j = small_spec("single");
    j["k_mode"] = "bogus";
    CHECK(error_of(j).find("k_mode") != std::string::npos);

    j = small_spec("single");
    j["experiment"] = "nope";
    CHECK(!error_of(j).empty());
}

TEST_CASE("spec echo round trips")
{
    auto j = small_spec("snr_sweep");
    j["k_mode"] = json::array({"sampled", "zero", {{"fixed_db", 12}}});
    j["correlation"] = json::array({"unequal", "equal"});
    j["profiles"] = json::array({"umi-microwave-2ghz", {{"base", "umi-mmwave-28ghz"}, {"name", "mm2"}, {"p_out", 0.1}}});
    const auto s = parse_spec(j);
    CHECK(s.k_modes.size() == 3);
    CHECK(s.profiles[1].name == "mm2");
    CHECK(s.profiles[1].p_out == 0.1);
    CHECK(s.supports[0].hi == Approx(std::numbers::pi / 16));
    const auto echo = spec_to_json(s);
    CHECK(spec_to_json(parse_spec(echo)) == echo);
}

TEST_CASE("variant drops")
{
    auto spec = parse_spec(small_spec("single"));
    const auto prof = umi_microwave_profile();
    const AngularSupport sup{-0.2, 0.2};

    const auto eq = draw_variant_drop(spec, prof, sup, KMode{}, CorrelationMode::EqualShared, 1.0, 3);
    for (const auto& l : eq) {
        CHECK(l.diffuse_angles_rad == eq[0].diffuse_angles_rad);
        CHECK(l.los_angle_rad == eq[0].los_angle_rad);
    }
    const auto un = draw_variant_drop(spec, prof, sup, KMode{}, CorrelationMode::UnequalPerTerminal, 1.0, 3);
    CHECK(un[0].diffuse_angles_rad != un[1].diffuse_angles_rad);
    for (std::size_t i = 0; i < un.size(); ++i) {
        CHECK(un[i].distance_m == eq[i].distance_m);
        CHECK(un[i].beta == eq[i].beta);
    }

    const auto zero = draw_variant_drop(spec, prof, sup, KMode{KMode::Kind::Zero, 0.0},
                                        CorrelationMode::UnequalPerTerminal, 1.0, 3);
    for (const auto& l : zero)
        CHECK(l.k_factor == 0.0);
    const auto fixed = draw_variant_drop(spec, prof, sup, KMode{KMode::Kind::Fixed, 12.0},
                                         CorrelationMode::UnequalPerTerminal, 1.0, 3);
    for (const auto& l : fixed)
        CHECK(l.k_factor == Approx(db_to_linear(12.0)));
}

TEST_CASE("experiments run and serialise")
{
    for (const char* kind : {"single", "snr_sweep", "sum_se_cdf"}) {
        auto j = small_spec(kind);
        if (std::string(kind) == "single")
            j["snr_db"] = 10.0;
        const auto spec = parse_spec(j);
        const auto table = run_experiment(spec);
        CHECK(!table.rows.empty());
        CHECK(table_from_json(to_json(table)) == table);
        const auto csv = to_csv(table);
        CHECK(csv.find("experiment,sweep_var,sweep_value,terminal,method,value_linear,value_db,std_err,seed") !=
              std::string::npos);
    }

    auto j = small_spec("antenna_sweep");
    j["system"]["M"] = json::array({16, 64});
    j["limit_mode"] = "both";
    const auto t = run_experiment(parse_spec(j));
    bool paper = false, full = false;
    for (const auto& r : t.rows) {
        paper |= r.method == "Theorem2";
        full |= r.method == "FullLimit";
    }
    CHECK(paper);
    CHECK(full);
}

TEST_CASE("output is independent of the thread count")
{
    auto j = small_spec("snr_sweep");
    j["threads"] = 1;
    const auto a = to_csv(run_experiment(parse_spec(j)));
    j["threads"] = 3;
    const auto b = to_csv(run_experiment(parse_spec(j)));
    CHECK(a == b);
}

TEST_CASE("emit writes the requested format")
{
    auto j = small_spec("single");
    j["snr_db"] = 10.0;
    const auto table = run_experiment(parse_spec(j));
    const auto dir = std::filesystem::temp_directory_path() / "scmimo_test_emit";
    std::filesystem::create_directories(dir);
    emit_results(table, dir / "r.json", "json");
    std::ifstream in(dir / "r.json");
    const json back = json::parse(in);
    CHECK(back.at("format") == "scmimo-results-1");
    CHECK(table_from_json(back) == table);
    std::filesystem::remove_all(dir);
}
