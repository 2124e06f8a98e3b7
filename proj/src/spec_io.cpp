// SPDX-License-Identifier: Apache-2.0
//
// Experiment description parsing and result serialisation.

#include "scmimo/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace scmimo {

using nlohmann::json;

std::string KMode::label() const
{
    switch (kind) {
    case Kind::Sampled: return "sampled";
    case Kind::Zero: return "zero";
    case Kind::Fixed: {
        std::ostringstream os;
        os << "fixed" << fixed_db << "dB";
        return os.str();
    }
    }
    return "?";
}

std::string_view kind_name(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::SnrSweep: return "snr_sweep";
    case ExperimentKind::SumSeCdf: return "sum_se_cdf";
    case ExperimentKind::AntennaSweep: return "antenna_sweep";
    case ExperimentKind::Calibrate: return "calibrate";
    case ExperimentKind::Single: return "single";
    }
    return "?";
}

std::string_view correlation_name(CorrelationMode m)
{
    return m == CorrelationMode::EqualShared ? "equal" : "unequal";
}

std::string_view limit_mode_name(LimitMode m)
{
    switch (m) {
    case LimitMode::PaperFaithful: return "paper";
    case LimitMode::FullLimit: return "full";
    case LimitMode::Both: return "both";
    }
    return "?";
}

LimitMode limit_mode_from_name(std::string_view name)
{
    if (name == "paper")
        return LimitMode::PaperFaithful;
    if (name == "full")
        return LimitMode::FullLimit;
    if (name == "both")
        return LimitMode::Both;
    throw ConfigError("limit_mode: expected one of paper, full, both (got '" + std::string(name) + "')");
}

namespace {

constexpr double kPi = std::numbers::pi;

// Tracks which keys of a JSON object were consumed so leftovers can be
// reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(where() + "expected an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key)
    {
        known_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key)
    {
        const json* v = find(key);
        if (!v)
            throw ConfigError(key_path(key) + ": required key missing");
        return *v;
    }

    void finish() const
    {
        for (const auto& item : j_.items())
            if (!known_.count(item.key()))
                throw ConfigError(key_path(item.key()) + ": unknown key");
    }

private:
    std::string where() const { return path_.empty() ? "" : path_ + ": "; }

    const json& j_;
    std::string path_;
    std::set<std::string> known_;
};

double as_number(const json& v, const std::string& path)
{
    if (!v.is_number())
        throw ConfigError(path + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(path + ": expected a finite number");
    return x;
}

long long as_integer(const json& v, const std::string& path, long long min_value)
{
    if (!v.is_number_integer())
        throw ConfigError(path + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < min_value)
        throw ConfigError(path + ": must be >= " + std::to_string(min_value));
    return x;
}

std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string())
        throw ConfigError(path + ": expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean())
        throw ConfigError(path + ": expected true or false");
    return v.get<bool>();
}

// Accepts a scalar or a non-empty array of scalars.
template <class F>
auto scalar_or_list(const json& v, const std::string& path, F&& convert)
{
    using T = decltype(convert(v, path));
    std::vector<T> out;
    if (v.is_array()) {
        if (v.empty())
            throw ConfigError(path + ": list must not be empty");
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(convert(v[i], path + "[" + std::to_string(i) + "]"));
    } else {
        out.push_back(convert(v, path));
    }
    return out;
}

AngularSupport parse_interval(const json& v, const std::string& path, double unit)
{
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(path + ": expected [lower, upper]");
    AngularSupport s{as_number(v[0], path + "[0]") * unit, as_number(v[1], path + "[1]") * unit};
    constexpr double eps = 1e-12;
    if (s.lo > s.hi)
        throw ConfigError(path + ": lower bound exceeds upper bound");
    if (s.lo < -kPi / 2 - eps || s.hi > kPi / 2 + eps)
        throw ConfigError(path + ": must lie inside [-pi/2, pi/2]");
    s.lo = std::max(s.lo, -kPi / 2);
    s.hi = std::min(s.hi, kPi / 2);
    return s;
}

std::optional<std::vector<AngularSupport>> parse_supports(ObjectReader& r)
{
    const json* rad = r.find("angular_support");
    const json* pi = r.find("angular_support_pi");
    if (rad && pi)
        throw ConfigError(r.key_path("angular_support_pi") + ": give either angular_support or angular_support_pi");
    const json* v = rad ? rad : pi;
    if (!v)
        return std::nullopt;
    const std::string path = r.key_path(rad ? "angular_support" : "angular_support_pi");
    const double unit = rad ? 1.0 : kPi;
    std::vector<AngularSupport> out;
    if (v->is_array() && !v->empty() && (*v)[0].is_array()) {
        for (std::size_t i = 0; i < v->size(); ++i)
            out.push_back(parse_interval((*v)[i], path + "[" + std::to_string(i) + "]", unit));
    } else {
        out.push_back(parse_interval(*v, path, unit));
    }
    return out;
}

PropagationProfile parse_profile(const json& v, const std::string& path)
{
    if (v.is_string()) {
        try {
            return profile_by_name(v.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    ObjectReader r(v, path);
    PropagationProfile p;
    try {
        p = profile_by_name(as_string(r.require("base"), r.key_path("base")));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(r.key_path("base") + ": " + e.what());
    }
    if (const json* n = r.find("name"))
        p.name = as_string(*n, r.key_path("name"));
    const std::pair<const char*, double PropagationProfile::*> fields[] = {
        {"carrier_freq_ghz", &PropagationProfile::carrier_freq_ghz},
        {"alpha_los", &PropagationProfile::alpha_los},
        {"alpha_nlos", &PropagationProfile::alpha_nlos},
        {"sigma_sh_los_db", &PropagationProfile::sigma_sh_los_db},
        {"sigma_sh_nlos_db", &PropagationProfile::sigma_sh_nlos_db},
        {"k_mean_db", &PropagationProfile::k_mean_db},
        {"k_std_db", &PropagationProfile::k_std_db},
        {"omega_los_inv_m", &PropagationProfile::omega_los_inv_m},
        {"p_out", &PropagationProfile::p_out},
    };
    for (const auto& [key, member] : fields)
        if (const json* x = r.find(key))
            p.*member = as_number(*x, r.key_path(key));
    r.finish();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return p;
}

KMode parse_k_mode(const json& v, const std::string& path)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "sampled")
            return {KMode::Kind::Sampled, 0.0};
        if (s == "zero")
            return {KMode::Kind::Zero, 0.0};
        throw ConfigError(path + ": expected \"sampled\", \"zero\" or {\"fixed_db\": x}");
    }
    ObjectReader r(v, path);
    KMode k{KMode::Kind::Fixed, as_number(r.require("fixed_db"), r.key_path("fixed_db"))};
    r.finish();
    return k;
}

CorrelationMode parse_correlation(const json& v, const std::string& path)
{
    const auto s = as_string(v, path);
    if (s == "unequal")
        return CorrelationMode::UnequalPerTerminal;
    if (s == "equal")
        return CorrelationMode::EqualShared;
    throw ConfigError(path + ": expected \"unequal\" or \"equal\"");
}

ExperimentKind parse_kind(const json& v, const std::string& path)
{
    const auto s = as_string(v, path);
    for (auto k : {ExperimentKind::SnrSweep, ExperimentKind::SumSeCdf, ExperimentKind::AntennaSweep,
                   ExperimentKind::Calibrate, ExperimentKind::Single})
        if (kind_name(k) == s)
            return k;
    throw ConfigError(path + ": unknown experiment '" + s + "'");
}

json support_json(const AngularSupport& s)
{
    return json::array({s.lo, s.hi});
}

json profile_json(const PropagationProfile& p)
{
    return {{"base", p.band == Band::Microwave ? "umi-microwave-2ghz" : "umi-mmwave-28ghz"},
            {"name", p.name},
            {"carrier_freq_ghz", p.carrier_freq_ghz},
            {"alpha_los", p.alpha_los},
            {"alpha_nlos", p.alpha_nlos},
            {"sigma_sh_los_db", p.sigma_sh_los_db},
            {"sigma_sh_nlos_db", p.sigma_sh_nlos_db},
            {"k_mean_db", p.k_mean_db},
            {"k_std_db", p.k_std_db},
            {"omega_los_inv_m", p.omega_los_inv_m},
            {"p_out", p.p_out}};
}

} // namespace

ExperimentSpec parse_spec(const json& j)
{
    ObjectReader top(j, "");
    ExperimentSpec s;
    s.kind = parse_kind(top.require("experiment"), "experiment");
    s.id = std::string(kind_name(s.kind));
    if (const json* v = top.find("id"))
        s.id = as_string(*v, "id");

    {
        ObjectReader sys(top.require("system"), "system");
        s.antennas.clear();
        for (long long m : scalar_or_list(sys.require("M"), "system.M",
                                          [](const json& x, const std::string& p) { return as_integer(x, p, 2); }))
            s.antennas.push_back(static_cast<int>(m));
        s.terminals = static_cast<int>(as_integer(sys.require("L"), "system.L", 1));
        s.paths = static_cast<int>(as_integer(sys.require("P"), "system.P", 1));
        if (const json* v = sys.find("aperture_wl")) {
            s.apertures_wl = scalar_or_list(*v, "system.aperture_wl", as_number);
            for (double a : s.apertures_wl)
                if (!(a > 0.0))
                    throw ConfigError("system.aperture_wl: must be positive");
        }
        if (auto sup = parse_supports(sys))
            s.supports = *sup;
        if (const json* v = sys.find("los_angle")) {
            const auto m = as_string(*v, "system.los_angle");
            if (m == "support")
                s.los_angle_mode = LosAngleMode::WithinSupport;
            else if (m == "geometric")
                s.los_angle_mode = LosAngleMode::Geometric;
            else
                throw ConfigError("system.los_angle: expected \"support\" or \"geometric\"");
        }
        sys.finish();
    }

    s.profiles = {umi_microwave_profile()};
    if (const json* v = top.find("profiles"))
        s.profiles = scalar_or_list(*v, "profiles", parse_profile);

    if (const json* v = top.find("cell")) {
        ObjectReader cell(*v, "cell");
        if (const json* x = cell.find("radius_m"))
            s.radius_m = as_number(*x, "cell.radius_m");
        if (const json* x = cell.find("exclusion_radius_m"))
            s.exclusion_radius_m = as_number(*x, "cell.exclusion_radius_m");
        if (const json* x = cell.find("rho_const")) {
            if (x->is_string()) {
                if (x->get<std::string>() != "calibrate")
                    throw ConfigError("cell.rho_const: expected a positive number or \"calibrate\"");
            } else {
                s.rho_const = as_number(*x, "cell.rho_const");
                if (!(*s.rho_const > 0.0))
                    throw ConfigError("cell.rho_const: must be positive");
            }
        }
        cell.finish();
        if (!(s.exclusion_radius_m > 0.0 && s.exclusion_radius_m < s.radius_m))
            throw ConfigError("cell: need 0 < exclusion_radius_m < radius_m");
    }

    if (const json* v = top.find("calibration")) {
        ObjectReader c(*v, "calibration");
        auto& o = s.calibration;
        if (const json* x = c.find("M"))
            o.num_antennas = static_cast<int>(as_integer(*x, "calibration.M", 2));
        if (const json* x = c.find("L"))
            o.num_terminals = static_cast<int>(as_integer(*x, "calibration.L", 1));
        if (const json* x = c.find("aperture_wl")) {
            o.aperture_wl = as_number(*x, "calibration.aperture_wl");
            if (!(o.aperture_wl > 0.0))
                throw ConfigError("calibration.aperture_wl: must be positive");
        }
        if (const json* x = c.find("snr_db"))
            o.snr = db_to_linear(as_number(*x, "calibration.snr_db"));
        if (const json* x = c.find("n_drops"))
            o.n_drops = static_cast<std::size_t>(as_integer(*x, "calibration.n_drops", 1));
        if (const json* x = c.find("n_fading"))
            o.n_fading = static_cast<std::size_t>(as_integer(*x, "calibration.n_fading", 1));
        if (const json* x = c.find("percentile")) {
            o.percentile = as_number(*x, "calibration.percentile");
            if (!(o.percentile > 0.0 && o.percentile < 1.0))
                throw ConfigError("calibration.percentile: must lie in (0, 1)");
        }
        if (const json* x = c.find("statistic")) {
            const auto st = as_string(*x, "calibration.statistic");
            if (st == "sinr")
                o.statistic = CalibrationStatistic::Sinr;
            else if (st == "snr")
                o.statistic = CalibrationStatistic::Snr;
            else
                throw ConfigError("calibration.statistic: expected \"sinr\" or \"snr\"");
        }
        if (const json* x = c.find("target_db"))
            o.target_db = as_number(*x, "calibration.target_db");
        if (auto sup = parse_supports(c)) {
            if (sup->size() != 1)
                throw ConfigError("calibration.angular_support: exactly one interval expected");
            s.calibration_support = sup->front();
        }
        c.finish();
    }

    if (const json* v = top.find("snr_db"))
        s.snr_db = scalar_or_list(*v, "snr_db", as_number);
    else if (s.kind == ExperimentKind::SnrSweep)
        throw ConfigError("snr_db: required key missing");

    if (s.kind == ExperimentKind::SumSeCdf)
        s.n_drops = 100;
    if (const json* v = top.find("n_fading"))
        s.n_fading = static_cast<std::size_t>(as_integer(*v, "n_fading", 1));
    if (const json* v = top.find("n_drops"))
        s.n_drops = static_cast<std::size_t>(as_integer(*v, "n_drops", 1));
    if (const json* v = top.find("correlation"))
        s.correlation_modes = scalar_or_list(*v, "correlation", parse_correlation);
    if (const json* v = top.find("k_mode"))
        s.k_modes = scalar_or_list(*v, "k_mode", parse_k_mode);
    if (const json* v = top.find("limit_mode"))
        s.limit_mode = limit_mode_from_name(as_string(*v, "limit_mode"));
    if (const json* v = top.find("monte_carlo"))
        s.monte_carlo = as_bool(*v, "monte_carlo");
    if (const json* v = top.find("tracked_terminal"))
        s.tracked_terminal = static_cast<int>(as_integer(*v, "tracked_terminal", 0));
    if (const json* v = top.find("seed")) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
            throw ConfigError("seed: expected a non-negative integer");
        s.seed = v->get<std::uint64_t>();
    }
    if (const json* v = top.find("threads"))
        s.threads = static_cast<unsigned>(as_integer(*v, "threads", 1));
    if (const json* v = top.find("output")) {
        ObjectReader out(*v, "output");
        if (const json* x = out.find("path"))
            s.output_path = as_string(*x, "output.path");
        if (const json* x = out.find("format")) {
            s.output_format = as_string(*x, "output.format");
            if (s.output_format != "csv" && s.output_format != "json")
                throw ConfigError("output.format: expected \"csv\" or \"json\"");
        }
        out.finish();
    }
    top.finish();

    if (s.tracked_terminal >= s.terminals)
        throw ConfigError("tracked_terminal: must be smaller than system.L");
    if (s.kind != ExperimentKind::AntennaSweep && s.antennas.size() != 1)
        throw ConfigError("system.M: a list of antenna counts is only valid for antenna_sweep");
    if (s.kind == ExperimentKind::AntennaSweep && s.terminals < 2)
        throw ConfigError("system.L: antenna_sweep needs at least two terminals for the limiting SINR");
    return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_spec(j);
}

json spec_to_json(const ExperimentSpec& s)
{
    json supports = json::array();
    for (const auto& sup : s.supports)
        supports.push_back(support_json(sup));
    json profiles = json::array();
    for (const auto& p : s.profiles)
        profiles.push_back(profile_json(p));
    json k_modes = json::array();
    for (const auto& k : s.k_modes) {
        if (k.kind == KMode::Kind::Fixed)
            k_modes.push_back({{"fixed_db", k.fixed_db}});
        else
            k_modes.push_back(k.label());
    }
    json corr = json::array();
    for (auto c : s.correlation_modes)
        corr.push_back(correlation_name(c));

    const AngularSupport cal_support = s.calibration_support.value_or(s.supports.front());
    json rho = s.rho_const ? json(*s.rho_const) : json("calibrate");
    return {{"id", s.id},
            {"experiment", kind_name(s.kind)},
            {"system",
             {{"M", s.antennas}, {"L", s.terminals}, {"P", s.paths}, {"aperture_wl", s.apertures_wl},
              {"angular_support", supports},
              {"los_angle", s.los_angle_mode == LosAngleMode::Geometric ? "geometric" : "support"}}},
            {"profiles", profiles},
            {"cell", {{"radius_m", s.radius_m}, {"exclusion_radius_m", s.exclusion_radius_m}, {"rho_const", rho}}},
            {"calibration",
             {{"statistic", s.calibration.statistic == CalibrationStatistic::Sinr ? "sinr" : "snr"},
              {"M", s.calibration.num_antennas},
              {"L", s.calibration.num_terminals},
              {"aperture_wl", s.calibration.aperture_wl},
              {"snr_db", linear_to_db(s.calibration.snr)},
              {"n_drops", s.calibration.n_drops},
              {"n_fading", s.calibration.n_fading},
              {"percentile", s.calibration.percentile},
              {"target_db", s.calibration.target_db},
              {"angular_support", support_json(cal_support)}}},
            {"snr_db", s.snr_db},
            {"n_fading", s.n_fading},
            {"n_drops", s.n_drops},
            {"correlation", corr},
            {"k_mode", k_modes},
            {"limit_mode", limit_mode_name(s.limit_mode)},
            {"monte_carlo", s.monte_carlo},
            {"tracked_terminal", s.tracked_terminal},
            {"seed", s.seed}};
}

namespace {

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& x)
{
    return x ? format_double(*x) : std::string();
}

json number_json(double x)
{
    if (std::isfinite(x))
        return x;
    return format_double(x);
}

json optional_json(const std::optional<double>& x)
{
    if (!x)
        return nullptr;
    return number_json(*x);
}

double number_from_json(const json& v)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "nan")
            return std::nan("");
        if (s == "inf")
            return INFINITY;
        if (s == "-inf")
            return -INFINITY;
        throw ConfigError("results: unexpected numeric string '" + s + "'");
    }
    return v.get<double>();
}

} // namespace

std::string to_csv(const ResultTable& table)
{
    std::string out;
    out += "# scmimo results\n";
    out += "# units: sweep_value = SNR [dB] | antennas | drop index | empirical probability; "
           "value_linear = SINR [linear] | sum spectral efficiency [bit/s/Hz] | rho_const [linear]; "
           "value_db = 10 log10(value_linear) for SINR and rho_const; std_err in units of value_linear\n";
    out += "# parameters: " + table.parameters.dump() + "\n";
    out += "experiment,sweep_var,sweep_value,terminal,method,value_linear,value_db,std_err,seed\n";
    for (const auto& r : table.rows) {
        out += r.experiment;
        out += ',';
        out += r.sweep_var;
        out += ',';
        out += format_double(r.sweep_value);
        out += ',';
        out += r.terminal;
        out += ',';
        out += r.method;
        out += ',';
        out += format_double(r.value_linear);
        out += ',';
        out += format_optional(r.value_db);
        out += ',';
        out += format_optional(r.std_err);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

json to_json(const ResultTable& table)
{
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"experiment", r.experiment},
                        {"sweep_var", r.sweep_var},
                        {"sweep_value", number_json(r.sweep_value)},
                        {"terminal", r.terminal},
                        {"method", r.method},
                        {"value_linear", number_json(r.value_linear)},
                        {"value_db", optional_json(r.value_db)},
                        {"std_err", optional_json(r.std_err)},
                        {"seed", r.seed}});
    return {{"format", "scmimo-results-1"}, {"parameters", table.parameters}, {"rows", rows}};
}

ResultTable table_from_json(const json& j)
{
    ResultTable t;
    t.parameters = j.at("parameters");
    for (const auto& r : j.at("rows")) {
        ResultRow row;
        row.experiment = r.at("experiment").get<std::string>();
        row.sweep_var = r.at("sweep_var").get<std::string>();
        row.sweep_value = number_from_json(r.at("sweep_value"));
        row.terminal = r.at("terminal").get<std::string>();
        row.method = r.at("method").get<std::string>();
        row.value_linear = number_from_json(r.at("value_linear"));
        if (!r.at("value_db").is_null())
            row.value_db = number_from_json(r.at("value_db"));
        if (!r.at("std_err").is_null())
            row.std_err = number_from_json(r.at("std_err"));
        row.seed = r.at("seed").get<std::uint64_t>();
        t.rows.push_back(std::move(row));
    }
    return t;
}

void emit_results(const ResultTable& table, const std::filesystem::path& path, std::string_view format)
{
    std::string payload;
    if (format == "csv")
        payload = to_csv(table);
    else if (format == "json")
        payload = to_json(table).dump(2) + "\n";
    else
        throw ConfigError("output.format: expected \"csv\" or \"json\"");

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace scmimo
