// SPDX-License-Identifier: Apache-2.0

#include "scmimo/harness.hpp"
#include "scmimo/asymptotics.hpp"
#include "scmimo/closedform.hpp"
#include "scmimo/mrc.hpp"
#include "scmimo/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace scmimo {

namespace {

// Stream identifiers for the hierarchical seed.
constexpr std::uint64_t kDropStream = 1;
constexpr std::uint64_t kSharedAngleStream = 2;
constexpr std::uint64_t kFadingStream = 3;
constexpr std::uint64_t kCalibrationStream = 4;
constexpr std::uint64_t kCalibrationCheckStream = 5;

constexpr double kConvergenceTolerance = 0.05;

std::string num(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void report(const ProgressFn& progress, const std::string& msg)
{
    if (progress)
        progress(msg);
}

struct Variant {
    std::size_t profile_index = 0;
    AngularSupport support;
    KMode k_mode;
    CorrelationMode correlation = CorrelationMode::UnequalPerTerminal;
    double aperture_wl = 8.0;
};

std::vector<Variant> enumerate_variants(const ExperimentSpec& spec)
{
    std::vector<Variant> out;
    for (std::size_t p = 0; p < spec.profiles.size(); ++p)
        for (const auto& sup : spec.supports)
            for (const auto& k : spec.k_modes)
                for (auto corr : spec.correlation_modes)
                    for (double ap : spec.apertures_wl)
                        out.push_back({p, sup, k, corr, ap});
    return out;
}

std::string variant_label(const ExperimentSpec& spec, const Variant& v)
{
    return spec.id + ";profile=" + spec.profiles[v.profile_index].name + ";k=" + v.k_mode.label()
           + ";support=" + num(v.support.lo) + ":" + num(v.support.hi) + ";corr="
           + std::string(correlation_name(v.correlation)) + ";d0=" + num(v.aperture_wl);
}

std::optional<double> db_of(double x)
{
    return linear_to_db(x);
}

void add_row(ResultTable& t, const ExperimentSpec& spec, std::string experiment, std::string sweep_var,
             double sweep_value, std::string terminal, std::string_view method, double value,
             std::optional<double> value_db, std::optional<double> std_err)
{
    t.rows.push_back({std::move(experiment), std::move(sweep_var), sweep_value, std::move(terminal),
                      std::string(method), value, value_db, std_err, spec.seed});
}

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

// Closed-form special case matching the variant, if one applies.
std::optional<std::pair<Method, std::vector<double>>> corollary_sinrs(const std::vector<PreparedLink>& links,
                                                                      std::span<const double> betas, double snr,
                                                                      const Variant& v)
{
    const int M = static_cast<int>(links.front().steering.entries.rows());
    const int P = static_cast<int>(links.front().steering.entries.cols());
    const std::size_t L = links.size();
    std::vector<double> out(L);
    if (v.k_mode.kind == KMode::Kind::Zero && v.correlation == CorrelationMode::UnequalPerTerminal) {
        std::vector<SteeringMatrix> steering;
        for (const auto& l : links)
            steering.push_back(l.steering);
        for (std::size_t l = 0; l < L; ++l)
            out[l] = corollary1_sinr(steering, betas, snr, static_cast<int>(l), P, M);
        return std::make_pair(Method::Corollary1, out);
    }
    if (v.correlation != CorrelationMode::EqualShared)
        return std::nullopt;
    const SteeringMatrix& A = links.front().steering;
    if (v.k_mode.kind == KMode::Kind::Zero) {
        for (std::size_t l = 0; l < L; ++l)
            out[l] = corollary2_sinr(A, betas, snr, static_cast<int>(l), P, M);
        return std::make_pair(Method::Corollary2, out);
    }
    std::vector<CVector> h_bars;
    std::vector<double> ks;
    for (const auto& l : links) {
        h_bars.push_back(l.specular);
        ks.push_back(l.k_factor);
    }
    for (std::size_t l = 0; l < L; ++l)
        out[l] = corollary3_sinr(A, h_bars, ks, betas, snr, static_cast<int>(l));
    return std::make_pair(Method::Corollary3, out);
}

// Rows for the tracked terminal and for the terminal average.
void add_sinr_rows(ResultTable& t, const ExperimentSpec& spec, const std::string& label, const std::string& sweep_var,
                   double sweep_value, Method method, const std::vector<double>& values,
                   const std::vector<double>* std_errs = nullptr, std::optional<double> avg_std_err = std::nullopt)
{
    const auto tracked = static_cast<std::size_t>(spec.tracked_terminal);
    std::optional<double> se;
    if (std_errs)
        se = (*std_errs)[tracked];
    add_row(t, spec, label, sweep_var, sweep_value, std::to_string(tracked), method_name(method), values[tracked],
            db_of(values[tracked]), se);
    const double avg = mean_of(values);
    add_row(t, spec, label, sweep_var, sweep_value, "avg", method_name(method), avg, db_of(avg), avg_std_err);
}

McOptions fading_options(const ExperimentSpec& spec, std::initializer_list<std::uint64_t> path, unsigned threads)
{
    McOptions o;
    o.seed = derive_seed(spec.seed, path);
    o.threads = threads;
    return o;
}

} // namespace

std::vector<TerminalLink> draw_variant_drop(const ExperimentSpec& spec, const PropagationProfile& profile,
                                            const AngularSupport& support, const KMode& k_mode,
                                            CorrelationMode correlation, double rho_const, std::uint64_t drop)
{
    CellConfig cell;
    cell.radius_m = spec.radius_m;
    cell.exclusion_radius_m = spec.exclusion_radius_m;
    cell.rho_const = rho_const;
    cell.num_terminals = spec.terminals;
    cell.num_paths = spec.paths;
    cell.angular_support = support;
    cell.los_angle_mode = spec.los_angle_mode;
    cell.validate();

    Rng rng = make_stream(spec.seed, {kDropStream, drop});
    auto links = sample_drop(rng, cell, profile);

    if (correlation == CorrelationMode::EqualShared) {
        Rng shared = make_stream(spec.seed, {kSharedAngleStream, drop});
        std::uniform_real_distribution<double> doa(support.lo, support.hi);
        std::vector<double> angles(static_cast<std::size_t>(spec.paths));
        for (auto& a : angles)
            a = support.lo == support.hi ? support.lo : doa(shared);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double los = los_angle_from_uniform(unit(shared), spec.los_angle_mode, support);
        for (auto& l : links) {
            l.diffuse_angles_rad = angles;
            l.los_angle_rad = los;
        }
    }
    switch (k_mode.kind) {
    case KMode::Kind::Sampled: break;
    case KMode::Kind::Zero:
        for (auto& l : links)
            l.k_factor = 0.0;
        break;
    case KMode::Kind::Fixed:
        for (auto& l : links)
            l.k_factor = db_to_linear(k_mode.fixed_db);
        break;
    }
    return links;
}

std::vector<double> resolve_rho_constants(const ExperimentSpec& spec, const ProgressFn& progress)
{
    if (spec.rho_const)
        return std::vector<double>(spec.profiles.size(), *spec.rho_const);
    std::vector<double> out;
    for (std::size_t p = 0; p < spec.profiles.size(); ++p) {
        CellConfig tmpl;
        tmpl.radius_m = spec.radius_m;
        tmpl.exclusion_radius_m = spec.exclusion_radius_m;
        tmpl.num_paths = spec.paths;
        tmpl.angular_support = spec.calibration_support.value_or(spec.supports.front());
        tmpl.los_angle_mode = spec.los_angle_mode;
        CalibrationOptions opts = spec.calibration;
        opts.threads = spec.threads;
        const auto res = calibrate_rho_const(tmpl, spec.profiles[p],
                                             derive_seed(spec.seed, {kCalibrationStream, p}), opts);
        report(progress, "calibrated " + spec.profiles[p].name + ": rho_const = " + num(res.rho_const) + " ("
                             + std::to_string(res.iterations) + " iterations)");
        out.push_back(res.rho_const);
    }
    return out;
}

ResultTable run_snr_sweep(const ExperimentSpec& spec, const ProgressFn& progress)
{
    ResultTable table;
    table.parameters = spec_to_json(spec);
    const auto rhos = resolve_rho_constants(spec, progress);
    std::vector<double> snrs;
    for (double db : spec.snr_db)
        snrs.push_back(db_to_linear(db));

    for (const auto& v : enumerate_variants(spec)) {
        const std::string label = variant_label(spec, v);
        report(progress, "snr sweep: " + label);
        const auto& profile = spec.profiles[v.profile_index];
        const auto links = draw_variant_drop(spec, profile, v.support, v.k_mode, v.correlation,
                                             rhos[v.profile_index], 0);
        const ArrayGeometry geom(spec.antennas.front(), v.aperture_wl);
        const auto prepared = prepare_links(geom, links);
        const auto betas = betas_of(links);
        const MomentSet moments = compute_moments(prepared);

        std::vector<McPoint> mc;
        if (spec.monte_carlo)
            mc = mc_fading_sweep(prepared, snrs, spec.n_fading, fading_options(spec, {kFadingStream, 0}, spec.threads));

        for (std::size_t s = 0; s < snrs.size(); ++s) {
            if (spec.monte_carlo)
                add_sinr_rows(table, spec, label, "snr_db", spec.snr_db[s], Method::MonteCarlo, mc[s].sinr_mean,
                              &mc[s].sinr_std_err, mc[s].avg_sinr_std_err);
            add_sinr_rows(table, spec, label, "snr_db", spec.snr_db[s], Method::Theorem1,
                          theorem1_sinrs(moments, betas, snrs[s]));
            if (auto c = corollary_sinrs(prepared, betas, snrs[s], v))
                add_sinr_rows(table, spec, label, "snr_db", spec.snr_db[s], c->first, c->second);
        }
    }
    return table;
}

ResultTable run_sum_se_cdf(const ExperimentSpec& spec, const ProgressFn& progress)
{
    ResultTable table;
    table.parameters = spec_to_json(spec);
    const auto rhos = resolve_rho_constants(spec, progress);

    for (const auto& v : enumerate_variants(spec)) {
        const std::string label = variant_label(spec, v);
        report(progress, "sum-SE CDF: " + label);
        const auto& profile = spec.profiles[v.profile_index];

        for (double snr_db : spec.snr_db) {
            const double snr = db_to_linear(snr_db);
            const std::string exp_label = label + ";snr_db=" + num(snr_db);
            std::vector<double> mc_se(spec.n_drops), mc_err(spec.n_drops), t1_se(spec.n_drops), cor_se(spec.n_drops);
            std::optional<Method> cor_method;

            std::vector<std::optional<Method>> cor_methods(spec.n_drops);
            parallel_for(spec.n_drops, spec.threads, [&](std::size_t d) {
                const auto links = draw_variant_drop(spec, profile, v.support, v.k_mode, v.correlation,
                                                     rhos[v.profile_index], d);
                const ArrayGeometry geom(spec.antennas.front(), v.aperture_wl);
                const auto prepared = prepare_links(geom, links);
                const auto betas = betas_of(links);
                if (spec.monte_carlo) {
                    const double snrs[] = {snr};
                    const auto mc = mc_fading_sweep(prepared, snrs, spec.n_fading,
                                                    fading_options(spec, {kFadingStream, d}, 1));
                    mc_se[d] = mc.front().sum_se_mean;
                    mc_err[d] = mc.front().sum_se_std_err;
                }
                t1_se[d] = approx_sum_se(betas, compute_moments(prepared), snr);
                if (auto c = corollary_sinrs(prepared, betas, snr, v)) {
                    cor_methods[d] = c->first;
                    cor_se[d] = sum_rate(c->second);
                }
            });
            cor_method = cor_methods.front();

            for (std::size_t d = 0; d < spec.n_drops; ++d) {
                const double dv = static_cast<double>(d);
                if (spec.monte_carlo)
                    add_row(table, spec, exp_label, "drop", dv, "sum", method_name(Method::MonteCarlo), mc_se[d],
                            std::nullopt, mc_err[d]);
                add_row(table, spec, exp_label, "drop", dv, "sum", method_name(Method::Theorem1), t1_se[d],
                        std::nullopt, std::nullopt);
                if (cor_method)
                    add_row(table, spec, exp_label, "drop", dv, "sum", method_name(*cor_method), cor_se[d],
                            std::nullopt, std::nullopt);
            }

            auto add_cdf = [&](Method m, std::vector<double> values) {
                std::sort(values.begin(), values.end());
                const double n = static_cast<double>(values.size());
                for (std::size_t i = 0; i < values.size(); ++i)
                    add_row(table, spec, exp_label, "cdf", static_cast<double>(i + 1) / n, "sum", method_name(m),
                            values[i], std::nullopt, std::nullopt);
            };
            if (spec.monte_carlo)
                add_cdf(Method::MonteCarlo, mc_se);
            add_cdf(Method::Theorem1, t1_se);
            if (cor_method)
                add_cdf(*cor_method, cor_se);
        }
    }
    return table;
}

ResultTable run_antenna_sweep(const ExperimentSpec& spec, const ProgressFn& progress)
{
    ResultTable table;
    table.parameters = spec_to_json(spec);
    const auto rhos = resolve_rho_constants(spec, progress);
    const bool want_paper = spec.limit_mode != LimitMode::FullLimit;
    const bool want_full = spec.limit_mode != LimitMode::PaperFaithful;

    for (const auto& v : enumerate_variants(spec)) {
        const auto& profile = spec.profiles[v.profile_index];
        const auto links = draw_variant_drop(spec, profile, v.support, v.k_mode, v.correlation,
                                             rhos[v.profile_index], 0);
        const auto betas = betas_of(links);
        const LimitTable limits = compute_limit_table(links, v.aperture_wl);
        const std::size_t L = links.size();

        for (double snr_db : spec.snr_db) {
            const double snr = db_to_linear(snr_db);
            const std::string label = variant_label(spec, v) + ";snr_db=" + num(snr_db);
            report(progress, "antenna sweep: " + label);

            std::vector<double> paper(L), full(L);
            for (std::size_t l = 0; l < L; ++l) {
                paper[l] = theorem2_sinr(limits, betas, snr, static_cast<int>(l));
                full[l] = full_limit_sinr(limits, betas, snr, static_cast<int>(l));
            }
            const double paper_avg = mean_of(paper);
            const double full_avg = mean_of(full);
            double converged_paper = std::numeric_limits<double>::quiet_NaN();
            double converged_full = std::numeric_limits<double>::quiet_NaN();

            for (int M : spec.antennas) {
                const double Md = M;
                const ArrayGeometry geom(M, v.aperture_wl);
                const auto prepared = prepare_links(geom, links);
                const auto t1 = theorem1_sinrs(compute_moments(prepared), betas, snr);
                if (spec.monte_carlo) {
                    const double snrs[] = {snr};
                    const auto mc = mc_fading_sweep(
                        prepared, snrs, spec.n_fading,
                        fading_options(spec, {kFadingStream, 0, static_cast<std::uint64_t>(M)}, spec.threads));
                    add_sinr_rows(table, spec, label, "M", Md, Method::MonteCarlo, mc.front().sinr_mean,
                                  &mc.front().sinr_std_err, mc.front().avg_sinr_std_err);
                }
                add_sinr_rows(table, spec, label, "M", Md, Method::Theorem1, t1);
                if (want_paper)
                    add_sinr_rows(table, spec, label, "M", Md, Method::Theorem2, paper);
                if (want_full)
                    add_sinr_rows(table, spec, label, "M", Md, Method::FullLimit, full);

                const double t1_avg = mean_of(t1);
                if (std::isnan(converged_paper) && std::abs(t1_avg / paper_avg - 1.0) < kConvergenceTolerance)
                    converged_paper = Md;
                if (std::isnan(converged_full) && std::abs(t1_avg / full_avg - 1.0) < kConvergenceTolerance)
                    converged_full = Md;
            }
            if (want_paper)
                add_row(table, spec, label, "convergence_M", kConvergenceTolerance, "avg",
                        method_name(Method::Theorem2), converged_paper, std::nullopt, std::nullopt);
            if (want_full)
                add_row(table, spec, label, "convergence_M", kConvergenceTolerance, "avg",
                        method_name(Method::FullLimit), converged_full, std::nullopt, std::nullopt);
        }
    }
    return table;
}

ResultTable run_single(const ExperimentSpec& spec, const ProgressFn& progress)
{
    ResultTable table;
    table.parameters = spec_to_json(spec);
    const auto rhos = resolve_rho_constants(spec, progress);
    std::vector<double> snrs;
    for (double db : spec.snr_db)
        snrs.push_back(db_to_linear(db));
    const bool want_paper = spec.limit_mode != LimitMode::FullLimit;
    const bool want_full = spec.limit_mode != LimitMode::PaperFaithful;

    for (const auto& v : enumerate_variants(spec)) {
        const std::string label = variant_label(spec, v);
        report(progress, "single: " + label);
        const auto links = draw_variant_drop(spec, spec.profiles[v.profile_index], v.support, v.k_mode,
                                             v.correlation, rhos[v.profile_index], 0);
        const ArrayGeometry geom(spec.antennas.front(), v.aperture_wl);
        const auto prepared = prepare_links(geom, links);
        const auto betas = betas_of(links);
        const MomentSet moments = compute_moments(prepared);
        const std::size_t L = links.size();
        std::optional<LimitTable> limits;
        if (L >= 2)
            limits = compute_limit_table(links, v.aperture_wl);

        std::vector<McPoint> mc;
        if (spec.monte_carlo)
            mc = mc_fading_sweep(prepared, snrs, spec.n_fading, fading_options(spec, {kFadingStream, 0}, spec.threads));

        for (std::size_t s = 0; s < snrs.size(); ++s) {
            std::vector<std::pair<Method, std::vector<double>>> methods;
            methods.emplace_back(Method::Theorem1, theorem1_sinrs(moments, betas, snrs[s]));
            if (auto c = corollary_sinrs(prepared, betas, snrs[s], v))
                methods.push_back(*c);
            if (limits && snrs[s] > 0.0) {
                std::vector<double> paper(L), full(L);
                for (std::size_t l = 0; l < L; ++l) {
                    paper[l] = theorem2_sinr(*limits, betas, snrs[s], static_cast<int>(l));
                    full[l] = full_limit_sinr(*limits, betas, snrs[s], static_cast<int>(l));
                }
                if (want_paper)
                    methods.emplace_back(Method::Theorem2, paper);
                if (want_full)
                    methods.emplace_back(Method::FullLimit, full);
            }
            auto emit = [&](Method m, const std::vector<double>& values, const std::vector<double>* errs,
                            std::optional<double> avg_err) {
                for (std::size_t l = 0; l < L; ++l)
                    add_row(table, spec, label, "snr_db", spec.snr_db[s], std::to_string(l), method_name(m),
                            values[l], db_of(values[l]), errs ? std::optional<double>((*errs)[l]) : std::nullopt);
                const double avg = mean_of(values);
                add_row(table, spec, label, "snr_db", spec.snr_db[s], "avg", method_name(m), avg, db_of(avg),
                        avg_err);
            };
            if (spec.monte_carlo)
                emit(Method::MonteCarlo, mc[s].sinr_mean, &mc[s].sinr_std_err, mc[s].avg_sinr_std_err);
            for (const auto& [m, values] : methods)
                emit(m, values, nullptr, std::nullopt);
            if (spec.monte_carlo)
                add_row(table, spec, label, "snr_db", spec.snr_db[s], "sum", "MonteCarloSumSE", mc[s].sum_se_mean,
                        std::nullopt, mc[s].sum_se_std_err);
            add_row(table, spec, label, "snr_db", spec.snr_db[s], "sum", "Theorem1SumSE",
                    approx_sum_se(betas, moments, snrs[s]), std::nullopt, std::nullopt);
        }
    }
    return table;
}

ResultTable run_calibrate(const ExperimentSpec& spec, const ProgressFn& progress)
{
    ResultTable table;
    table.parameters = spec_to_json(spec);
    ExperimentSpec calibrating = spec;
    calibrating.rho_const.reset();
    const auto rhos = resolve_rho_constants(calibrating, progress);
    for (std::size_t p = 0; p < spec.profiles.size(); ++p) {
        const std::string label = spec.id + ";profile=" + spec.profiles[p].name;
        add_row(table, spec, label, "calibration", 0.0, "all", "RhoConst", rhos[p], db_of(rhos[p]), std::nullopt);

        CellConfig cell;
        cell.radius_m = spec.radius_m;
        cell.exclusion_radius_m = spec.exclusion_radius_m;
        cell.num_paths = spec.paths;
        cell.angular_support = spec.calibration_support.value_or(spec.supports.front());
        cell.los_angle_mode = spec.los_angle_mode;
        cell.rho_const = rhos[p];
        CalibrationOptions opts = spec.calibration;
        opts.threads = spec.threads;
        const double check_db = pooled_percentile_db(cell, spec.profiles[p],
                                                     derive_seed(spec.seed, {kCalibrationCheckStream, p}), opts);
        add_row(table, spec, label, "calibration", 0.0, "all", "PercentileCheck", db_to_linear(check_db), check_db,
                std::nullopt);
    }
    return table;
}

ResultTable run_experiment(const ExperimentSpec& spec, const ProgressFn& progress)
{
    switch (spec.kind) {
    case ExperimentKind::SnrSweep: return run_snr_sweep(spec, progress);
    case ExperimentKind::SumSeCdf: return run_sum_se_cdf(spec, progress);
    case ExperimentKind::AntennaSweep: return run_antenna_sweep(spec, progress);
    case ExperimentKind::Calibrate: return run_calibrate(spec, progress);
    case ExperimentKind::Single: return run_single(spec, progress);
    }
    throw ConfigError("unknown experiment kind");
}

} // namespace scmimo
