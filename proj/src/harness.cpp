#include "anderson/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "anderson/errors.hpp"
#include "anderson/fit.hpp"
#include "anderson/model.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectrum.hpp"
#include "anderson/stats.hpp"
#include "anderson/transfer.hpp"

#ifndef ANDERSON_VERSION_STRING
#define ANDERSON_VERSION_STRING "0.1.0"
#endif

namespace anderson::harness {

namespace {

enum class Kind { number, integer, boolean, numbers, integers };

struct Param {
    std::string key;
    Kind kind;
    bool required;
    Json fallback;  // null: optional without default
};

Param req(std::string key, Kind kind) { return {std::move(key), kind, true, nullptr}; }
Param opt(std::string key, Kind kind, Json fallback = nullptr) { return {std::move(key), kind, false, std::move(fallback)}; }

using Schema = std::vector<Param>;

const std::map<std::string, Schema>& schemas() {
    static const std::map<std::string, Schema> table = [] {
        std::map<std::string, Schema> t;
        const auto seed = opt("seed", Kind::integer, 0);
        const auto margin = opt("band_margin", Kind::number, 0.1);
        t["validate-coupling"] = {req("lambda", Kind::number), req("poly", Kind::integers), req("C", Kind::number),
                                  req("lambda0", Kind::number), seed};
        t["lyapunov"] = {req("lambda", Kind::number),
                         req("energies", Kind::numbers),
                         opt("N", Kind::integer, 10000),
                         opt("trials", Kind::integer, 200),
                         opt("tail_sigma", Kind::number),
                         opt("tail_sizes", Kind::integers, Json::array({250, 500, 1000, 2000})),
                         opt("tail_trials", Kind::integer, 2000),
                         opt("uniform_kappa", Kind::number),
                         opt("uniform_alpha", Kind::number, 0.5),
                         opt("uniform_c", Kind::number, 1.0),
                         opt("uniform_grid", Kind::integer, 21),
                         opt("uniform_sizes", Kind::integers, Json::array({200, 400, 800})),
                         opt("uniform_trials", Kind::integer, 1000),
                         seed};
        t["furstenberg"] = {req("E", Kind::number),
                            req("lambda", Kind::number),
                            opt("bins", Kind::integer, 512),
                            opt("burn_in", Kind::integer, 1000),
                            opt("steps", Kind::integer, 1000000),
                            opt("batches", Kind::integer, 20),
                            opt("tau_eps", Kind::numbers, Json::array({0.05, 0.1, 0.2, 0.4})),
                            opt("mirror", Kind::boolean, false),
                            opt("angle_eps", Kind::number),
                            opt("angle_N", Kind::integer, 500),
                            opt("angle_trials", Kind::integer, 10000),
                            opt("angle_log_factor", Kind::number, 10.0),
                            opt("angle_tau_scale", Kind::number, 4.0),
                            opt("angle_bound_factor", Kind::number, 4.0),
                            seed};
        t["ids"] = {req("lambda", Kind::number),
                    req("N", Kind::integer),
                    opt("trials", Kind::integer, 100),
                    opt("energies", Kind::numbers),
                    opt("E_min", Kind::number),
                    opt("E_max", Kind::number),
                    opt("E_step", Kind::number),
                    opt("bandwidth", Kind::number),
                    opt("E0", Kind::number),
                    seed};
        const Schema window = {req("lambda", Kind::number), req("E0", Kind::number), req("N", Kind::integer), margin,
                               seed};
        auto with = [&](Schema extra) {
            Schema s = window;
            s.insert(s.end(), extra.begin(), extra.end());
            return s;
        };
        t["wegner"] = with({req("deltas", Kind::numbers), opt("trials", Kind::integer, 20000)});
        t["minami"] = with({req("deltas", Kind::numbers), opt("trials", Kind::integer, 50000),
                            opt("log_constant", Kind::number, 1.0)});
        t["resonance"] = with({req("deltas", Kind::numbers), opt("trials", Kind::integer, 100000),
                               opt("exponent", Kind::number, 10.0)});
        t["trace"] = with({req("delta", Kind::number), req("k_at_E0", Kind::number), opt("trials", Kind::integer, 10000),
                           opt("log_constant", Kind::number, 1.0)});
        t["poisson"] = with({req("L", Kind::number), opt("trials", Kind::integer, 2000), opt("k_at_E0", Kind::number),
                             opt("level", Kind::number, 0.01), opt("self_test_regenerations", Kind::integer, 0)});
        return t;
    }();
    return table;
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::number: return "a number";
        case Kind::integer: return "a nonnegative integer";
        case Kind::boolean: return "a boolean";
        case Kind::numbers: return "an array of numbers";
        case Kind::integers: return "an array of integers";
    }
    return "?";
}

bool is_integral(const Json& v) {
    if (v.is_number_unsigned()) return true;
    if (v.is_number_integer()) return v.get<std::int64_t>() >= 0;
    if (v.is_number_float()) {
        const double d = v.get<double>();
        return std::isfinite(d) && d >= 0 && d == std::floor(d) && d < 1.8446744073709552e19;
    }
    return false;
}

bool is_signed_integral(const Json& v) {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
        const double d = v.get<double>();
        return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.2e18;
    }
    return false;
}

// Checks a value and returns its canonical form (integers stored as integers).
Json canonical(const Param& p, const Json& v) {
    const auto bad = [&] { return InvalidArgument("config key '" + p.key + "' must be " + kind_name(p.kind)); };
    switch (p.kind) {
        case Kind::number:
            if (!v.is_number() || !std::isfinite(v.get<double>())) throw bad();
            return v.get<double>();
        case Kind::integer:
            if (!is_integral(v)) throw bad();
            return v.is_number_float() ? Json(static_cast<std::uint64_t>(v.get<double>())) : Json(v.get<std::uint64_t>());
        case Kind::boolean:
            if (!v.is_boolean()) throw bad();
            return v;
        case Kind::numbers: {
            if (!v.is_array()) throw bad();
            Json out = Json::array();
            for (const auto& x : v) {
                if (!x.is_number() || !std::isfinite(x.get<double>())) throw bad();
                out.push_back(x.get<double>());
            }
            return out;
        }
        case Kind::integers: {
            if (!v.is_array()) throw bad();
            Json out = Json::array();
            for (const auto& x : v) {
                if (!is_signed_integral(x)) throw bad();
                out.push_back(x.is_number_float() ? static_cast<std::int64_t>(x.get<double>()) : x.get<std::int64_t>());
            }
            return out;
        }
    }
    throw bad();
}

std::string format_integer(std::uint64_t x) { return std::to_string(x); }

Json binomial_json(const BinomialEstimate& e) {
    return Json{{"successes", e.successes},
                {"trials", e.trials},
                {"probability", e.probability},
                {"ci_low", e.ci_low},
                {"ci_high", e.ci_high}};
}

Json nullable(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json slope_json(const stats::SlopeFit& f) {
    Json j{{"fitted", f.fitted}, {"cells_used", f.cells_used}};
    if (f.fitted) {
        j["slope"] = f.slope;
        j["slope_stderr"] = f.slope_stderr;
        j["slope_ci_low"] = f.slope - 1.959963984540054 * f.slope_stderr;
        j["slope_ci_high"] = f.slope + 1.959963984540054 * f.slope_stderr;
        j["intercept"] = f.intercept;
    }
    j["dropped_deltas"] = f.dropped_deltas;
    if (!f.note.empty()) j["note"] = f.note;
    return j;
}

std::size_t as_size(const Json& v) { return static_cast<std::size_t>(v.get<std::uint64_t>()); }

std::optional<double> optional_number(const Json& c, const char* key) {
    if (c[key].is_null()) return std::nullopt;
    return c[key].get<double>();
}

stats::WindowExperiment window_of(const ExperimentDescriptor& d) {
    const auto& c = d.config;
    stats::WindowExperiment w;
    w.energy0 = c["E0"].get<double>();
    w.lambda = c["lambda"].get<double>();
    w.n = as_size(c["N"]);
    w.trials = as_size(c["trials"]);
    w.seed = d.seed;
    w.band_margin = optional_number(c, "band_margin");
    return w;
}

void sweep_table(const stats::ScalingExperiment& s, RunOutput& out) {
    out.table.columns = {"delta", "successes", "trials", "probability", "ci_low", "ci_high"};
    Json cells = Json::array();
    for (const auto& c : s.cells) {
        out.table.rows.push_back({format_number(c.delta), format_integer(c.estimate.successes),
                                  format_integer(c.estimate.trials), format_number(c.estimate.probability),
                                  format_number(c.estimate.ci_low), format_number(c.estimate.ci_high)});
        Json cell = binomial_json(c.estimate);
        cell["delta"] = c.delta;
        cells.push_back(cell);
    }
    out.results["cells"] = cells;
    out.results["fit"] = slope_json(s.fit);
}

// --- experiments --------------------------------------------------------------

void run_validate_coupling(const ExperimentDescriptor& d, RunOutput& out) {
    const auto& c = d.config;
    model::CouplingSpec spec;
    spec.lambda = c["lambda"].get<double>();
    spec.poly_coeffs = c["poly"].get<std::vector<std::int64_t>>();
    spec.coeff_bound_exponent = c["C"].get<double>();
    spec.lambda0 = c["lambda0"].get<double>();
    const auto r = model::validate_coupling(spec);

    out.table.columns = {"root", "re", "im", "modulus"};
    Json conj = Json::array();
    for (std::size_t i = 0; i < r.conjugates.size(); ++i) {
        out.table.rows.push_back({format_integer(i), format_number(r.conjugates[i].real()),
                                  format_number(r.conjugates[i].imag()), format_number(r.conjugate_moduli[i])});
        conj.push_back(Json{{"re", r.conjugates[i].real()},
                            {"im", r.conjugates[i].imag()},
                            {"modulus", r.conjugate_moduli[i]}});
    }
    out.results = Json{{"small_coupling", r.small_coupling},
                       {"algebraic_bounds", r.algebraic_bounds},
                       {"large_conjugate", r.large_conjugate},
                       {"all_pass", r.all_pass()},
                       {"irreducibility", "not checked"},
                       {"degree", r.degree},
                       {"primitive_coeffs", r.primitive_coeffs},
                       {"max_coefficient", r.max_coefficient},
                       {"coefficient_bound", nullable(r.coefficient_bound)},
                       {"root_residual", r.root_residual},
                       {"conjugates", conj}};
}

void run_lyapunov(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    const auto& c = d.config;
    const double lambda = c["lambda"].get<double>();
    const auto energies = c["energies"].get<std::vector<double>>();
    const std::size_t n = as_size(c["N"]);
    const std::size_t trials = as_size(c["trials"]);
    if (energies.empty()) throw InvalidArgument("config key 'energies' must not be empty");

    out.table.columns = {"E", "value", "stderr"};
    Json rows = Json::array();
    std::vector<transfer::LyapunovEstimate> ests;
    for (double e : energies) {
        const auto l = transfer::lyapunov_exponent(e, lambda, n, trials, d.seed, pool);
        ests.push_back(l);
        out.table.rows.push_back({format_number(e), format_number(l.value), format_number(l.std_error)});
        rows.push_back(Json{{"E", e}, {"value", l.value}, {"stderr", l.std_error}});
    }
    out.results["lyapunov"] = rows;

    const double e0 = energies.front();
    const double l0 = ests.front().value;
    if (const auto sigma = optional_number(c, "tail_sigma")) {
        std::vector<std::size_t> sizes;
        for (auto s : c["tail_sizes"].get<std::vector<std::int64_t>>()) {
            if (s < 1) throw InvalidArgument("config key 'tail_sizes' must hold positive sizes");
            sizes.push_back(static_cast<std::size_t>(s));
        }
        std::vector<BinomialEstimate> tails;
        Json cells = Json::array();
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            tails.push_back(transfer::deviation_tail(e0, lambda, sizes[i], *sigma, l0, as_size(c["tail_trials"]),
                                                     mix64(d.seed ^ (0x7A11ULL + i)), pool));
            Json cell = binomial_json(tails.back());
            cell["N"] = sizes[i];
            cells.push_back(cell);
        }
        const auto fit = transfer::fit_tail_decay(sizes, tails);
        Json f{{"fitted", fit.fitted}, {"cells_used", fit.cells_used}};
        if (fit.fitted) {
            f["rate"] = fit.rate;
            f["rate_stderr"] = fit.rate_stderr;
            f["intercept"] = fit.intercept;
        }
        if (!fit.note.empty()) f["note"] = fit.note;
        out.results["deviation_tail"] = Json{{"E", e0}, {"sigma", *sigma}, {"L", l0}, {"cells", cells}, {"fit", f}};
    }

    if (const auto kappa = optional_number(c, "uniform_kappa")) {
        Json cells = Json::array();
        const auto sizes = c["uniform_sizes"].get<std::vector<std::int64_t>>();
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (sizes[i] < 1) throw InvalidArgument("config key 'uniform_sizes' must hold positive sizes");
            transfer::UniformNormOptions o;
            o.energy0 = e0;
            o.lambda = lambda;
            o.kappa = *kappa;
            o.alpha = c["uniform_alpha"].get<double>();
            o.constant = c["uniform_c"].get<double>();
            o.lyapunov = l0;
            o.n = static_cast<std::size_t>(sizes[i]);
            o.grid_size = as_size(c["uniform_grid"]);
            o.trials = as_size(c["uniform_trials"]);
            o.seed = mix64(d.seed ^ (0x0B0DULL + i));
            Json cell = binomial_json(transfer::uniform_norm_bound(o, pool));
            cell["N"] = o.n;
            cells.push_back(cell);
        }
        out.results["uniform_norm"] = Json{{"E0", e0}, {"kappa", *kappa}, {"L", l0}, {"cells", cells}};
    }
}

void run_furstenberg(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    const auto& c = d.config;
    transfer::FurstenbergOptions o;
    o.bins = as_size(c["bins"]);
    o.burn_in = as_size(c["burn_in"]);
    o.steps = as_size(c["steps"]);
    o.batches = as_size(c["batches"]);
    o.seed = d.seed;
    const double e = c["E"].get<double>();
    const double lambda = c["lambda"].get<double>();
    const auto est = transfer::furstenberg_estimate(e, lambda, o);

    out.table.columns = {"bin_center", "value", "stderr"};
    for (std::size_t i = 0; i < est.bins(); ++i)
        out.table.rows.push_back(
            {format_number(est.bin_center(i)), format_number(est.mass[i]), format_number(est.std_error[i])});

    out.results["stationarity_residual"] = est.stationarity_residual;
    out.results["bin_center_residual"] = est.bin_center_residual;
    Json tau = Json::array();
    for (double eps : c["tau_eps"].get<std::vector<double>>())
        tau.push_back(Json{{"eps", eps}, {"tau", transfer::tau_max_interval(est, eps)}});
    out.results["tau"] = tau;

    if (c["mirror"].get<bool>()) {
        const auto other = transfer::furstenberg_estimate(-e, lambda, o);
        const double dist = transfer::mirror_distance(est, other);
        out.results["mirror"] = Json{{"distance", dist},
                                     {"residual_minus_E", other.stationarity_residual},
                                     {"within_twice_residual", dist <= 2.0 * est.stationarity_residual}};
    }

    if (const auto eps = optional_number(c, "angle_eps")) {
        transfer::AngleConcentrationOptions a;
        a.energy = e;
        a.lambda = lambda;
        a.eps = *eps;
        a.n = as_size(c["angle_N"]);
        a.trials = as_size(c["angle_trials"]);
        a.seed = mix64(d.seed ^ 0xA71EULL);
        a.log_factor = c["angle_log_factor"].get<double>();
        const auto p = transfer::angle_concentration(a, pool);
        const double scale = c["angle_tau_scale"].get<double>();
        const double factor = c["angle_bound_factor"].get<double>();
        const double tau = transfer::tau_max_interval(est, std::min(scale * *eps, std::numbers::pi));
        Json j = binomial_json(p);
        j["eps"] = *eps;
        j["tau_eps"] = scale * *eps;
        j["tau"] = tau;
        j["bound"] = factor * tau;
        j["within_bound"] = p.probability <= factor * tau;
        out.results["angle_concentration"] = j;
    }
}

std::vector<double> ids_grid(const Json& c) {
    if (!c["energies"].is_null()) return c["energies"].get<std::vector<double>>();
    for (const char* k : {"E_min", "E_max", "E_step"})
        if (c[k].is_null())
            throw InvalidArgument(std::string("missing required key '") + k + "' (or give 'energies')");
    const double lo = c["E_min"].get<double>(), hi = c["E_max"].get<double>(), step = c["E_step"].get<double>();
    if (!(step > 0.0) || !(hi > lo)) throw InvalidArgument("energy grid needs E_max > E_min and E_step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step * (1 + 1e-12))) + 1;
    if (count > 10'000'000) throw InvalidArgument("energy grid is too fine");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = lo + step * static_cast<double>(i);
    return grid;
}

void run_ids(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    const auto& c = d.config;
    spectrum::IdsOptions o;
    o.lambda = c["lambda"].get<double>();
    o.n = as_size(c["N"]);
    o.trials = as_size(c["trials"]);
    o.grid = ids_grid(c);
    o.bandwidth = optional_number(c, "bandwidth");
    o.seed = d.seed;
    const auto curve = spectrum::ids_dos(o, pool);

    out.table.columns = {"E", "ids", "ids_stderr", "dos", "dos_stderr"};
    for (std::size_t i = 0; i < curve.energies.size(); ++i) {
        const bool dos = !curve.dos_withheld;
        out.table.rows.push_back({format_number(curve.energies[i]), format_number(curve.ids[i]),
                                  format_number(curve.ids_stderr[i]), dos ? format_number(curve.dos[i]) : "",
                                  dos ? format_number(curve.dos_stderr[i]) : ""});
    }
    out.results["bandwidth"] = curve.bandwidth;
    out.results["dos_withheld"] = curve.dos_withheld;
    if (!curve.dos_withheld) {
        out.results["dos_integral"] = curve.dos_integral();
        if (const auto e0 = optional_number(c, "E0")) {
            out.results["E0"] = *e0;
            out.results["dos_at_E0"] = curve.dos_at(*e0);
        }
    }
}

void run_wegner(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    sweep_table(stats::wegner_sweep(window_of(d), d.config["deltas"].get<std::vector<double>>(), pool), out);
}

void run_minami(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    sweep_table(stats::minami_sweep(window_of(d), d.config["deltas"].get<std::vector<double>>(),
                                    d.config["log_constant"].get<double>(), pool),
                out);
}

void run_resonance(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    const auto w = window_of(d);
    sweep_table(stats::near_resonance_sweep(w, d.config["deltas"].get<std::vector<double>>(),
                                            d.config["exponent"].get<double>(), pool),
                out);
    out.results["boundary_zone_width"] = stats::boundary_zone_width(w.n);
    out.results["threshold"] = std::pow(static_cast<double>(w.n), -d.config["exponent"].get<double>());
}

void run_trace(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    const auto& c = d.config;
    const auto t = stats::expected_trace(window_of(d), c["delta"].get<double>(), c["k_at_E0"].get<double>(),
                                         c["log_constant"].get<double>(), pool);
    out.table.columns = {"delta", "mean", "stderr", "prediction", "ratio", "ratio_stderr"};
    out.table.rows.push_back({format_number(t.delta), format_number(t.mean), format_number(t.stderr_of_mean),
                              format_number(t.prediction), format_number(t.ratio), format_number(t.ratio_stderr)});
    out.results = Json{{"delta", t.delta},
                       {"mean", t.mean},
                       {"stderr", t.stderr_of_mean},
                       {"prediction", t.prediction},
                       {"ratio", nullable(t.ratio)},
                       {"ratio_stderr", nullable(t.ratio_stderr)},
                       {"correction_scale", t.correction_scale}};
}

Json poisson_json(const stats::PoissonTestReport& r, double level) {
    Json bins = Json::array();
    for (std::size_t i = 0; i < r.count_expected.size(); ++i)
        bins.push_back(Json{{"from", r.count_bin_lower[i]},
                            {"observed", r.count_observed[i]},
                            {"expected", r.count_expected[i]}});
    Json j{{"samples", r.samples},
           {"count", Json{{"mean", r.count_mean},
                          {"variance", r.count_variance},
                          {"chi2", r.count_chi2},
                          {"dof", r.count_dof},
                          {"p", r.count_p},
                          {"bins", bins}}},
           {"gap", Json{{"gaps", r.gap_count}, {"rate", r.gap_rate}, {"ks", r.gap_ks}, {"p", r.gap_p}}},
           {"pooled_spacing", Json{{"spacings", r.pooled_count}, {"ks", r.pooled_ks}, {"p", r.pooled_p}}},
           {"half_window_correlation", Json{{"rho", r.correlation},
                                            {"ci_low", r.correlation_ci_low},
                                            {"ci_high", r.correlation_ci_high},
                                            {"p", r.correlation_p}}},
           {"level", level},
           {"all_pass", r.passes(level)}};
    if (r.expected_mean) j["count"]["expected_mean"] = *r.expected_mean;
    return j;
}

void run_poisson(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    const auto& c = d.config;
    const auto w = window_of(d);
    const double length = c["L"].get<double>();
    const double level = c["level"].get<double>();
    const auto samples = stats::poisson_samples(w, length, pool);

    out.table.columns = {"trial", "count", "points"};
    for (std::size_t t = 0; t < samples.size(); ++t) {
        std::string pts;
        for (double p : samples[t].points) {
            if (!pts.empty()) pts += ' ';
            pts += format_number(p);
        }
        out.table.rows.push_back({format_integer(t), format_integer(samples[t].points.size()), pts});
    }
    out.results = poisson_json(stats::poisson_tests(samples, optional_number(c, "k_at_E0")), level);
    out.results["L"] = length;

    const std::size_t regenerations = as_size(c["self_test_regenerations"]);
    if (regenerations > 0) {
        // True Poisson data with the observed mean count, same sample size.
        const double mean = std::max(out.results["count"]["mean"].get<double>(), 1e-3);
        std::size_t rejected[3] = {0, 0, 0};
        std::size_t any = 0;
        const auto reports = pool.map<stats::PoissonTestReport>(regenerations, [&](std::size_t g) {
            const auto s = stats::synthetic_poisson_samples(samples.size(), mean / length, length,
                                                            seed_for_trial(mix64(d.seed ^ 0x5E1FULL), g));
            return stats::poisson_tests(s);
        });
        for (const auto& r : reports) {
            rejected[0] += r.count_p <= level;
            rejected[1] += r.gap_p <= level;
            rejected[2] += r.correlation_p <= level;
            any += !r.passes(level);
        }
        const double g = static_cast<double>(regenerations);
        out.results["self_test"] = Json{{"regenerations", regenerations},
                                        {"rejection_rate_count", rejected[0] / g},
                                        {"rejection_rate_gap", rejected[1] / g},
                                        {"rejection_rate_correlation", rejected[2] / g},
                                        {"joint_pass_rate", 1.0 - static_cast<double>(any) / g}};
    }
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"validate-coupling", "lyapunov", "furstenberg",
                                                   "ids",               "wegner",   "trace",
                                                   "minami",            "resonance", "poisson"};
    return names;
}

std::string_view version() noexcept { return ANDERSON_VERSION_STRING; }

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string Table::to_csv() const {
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
        s += '\n';
    }
    return s;
}

ExperimentDescriptor parse_descriptor(std::string_view experiment, const Json& config,
                                      std::optional<std::uint64_t> seed_override) {
    const auto it = schemas().find(std::string(experiment));
    if (it == schemas().end()) {
        std::string known;
        for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
        throw InvalidArgument("unknown experiment '" + std::string(experiment) + "' (expected one of " + known + ")");
    }
    if (!config.is_object()) throw InvalidArgument("config must be a JSON object");

    const Json* params = &config;
    if (config.contains("config") && config["config"].is_object()) {
        // A summary written by a previous run.
        if (config.contains("experiment") && config["experiment"] != experiment)
            throw InvalidArgument("summary is for experiment '" + config["experiment"].get<std::string>() + "'");
        params = &config["config"];
    }

    const auto& schema = it->second;
    for (const auto& [key, value] : params->items()) {
        if (key == "experiment") {
            if (value != experiment)
                throw InvalidArgument("config names experiment " + value.dump() + " but '" + std::string(experiment) +
                                      "' was requested");
            continue;
        }
        if (std::none_of(schema.begin(), schema.end(), [&](const Param& p) { return p.key == key; }))
            throw InvalidArgument("unknown config key '" + key + "' for experiment '" + std::string(experiment) + "'");
    }

    ExperimentDescriptor d;
    d.experiment = std::string(experiment);
    d.config = Json::object();
    for (const auto& p : schema) {
        if (params->contains(p.key) && !(*params)[p.key].is_null()) {
            d.config[p.key] = canonical(p, (*params)[p.key]);
        } else if (p.required) {
            throw InvalidArgument("missing required key '" + p.key + "' for experiment '" + std::string(experiment) +
                                  "'");
        } else {
            d.config[p.key] = p.fallback;
        }
    }
    if (seed_override) d.config["seed"] = *seed_override;
    d.seed = d.config["seed"].get<std::uint64_t>();
    return d;
}

void execute(const ExperimentDescriptor& d, const WorkerPool& pool, RunOutput& out) {
    const auto& e = d.experiment;
    if (e == "validate-coupling") return run_validate_coupling(d, out);
    if (e == "lyapunov") return run_lyapunov(d, pool, out);
    if (e == "furstenberg") return run_furstenberg(d, pool, out);
    if (e == "ids") return run_ids(d, pool, out);
    if (e == "wegner") return run_wegner(d, pool, out);
    if (e == "trace") return run_trace(d, pool, out);
    if (e == "minami") return run_minami(d, pool, out);
    if (e == "resonance") return run_resonance(d, pool, out);
    if (e == "poisson") return run_poisson(d, pool, out);
    throw InvalidArgument("unknown experiment '" + e + "'");
}

RunReport run(const ExperimentDescriptor& d, const std::filesystem::path& out_dir, unsigned threads) {
    RunReport report;
    RunOutput out;
    const auto start = std::chrono::steady_clock::now();
    std::string status = "ok";
    try {
        execute(d, WorkerPool(threads), out);
    } catch (const NumericalFailure& e) {
        report.exit_code = kExitNumeric;
        report.error = e.what();
        status = "numerical_failure";
    } catch (const InvalidArgument& e) {
        report.exit_code = kExitConfig;
        report.error = e.what();
        status = "invalid_config";
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    report.summary = Json{{"version", std::string(version())},
                          {"experiment", d.experiment},
                          {"config", d.config},
                          {"status", status}};
    if (!report.error.empty()) report.summary["error"] = report.error;
    report.summary["results"] = out.results;
    report.summary["runtime"] = Json{{"threads", threads}, {"wall_time_seconds", wall}};

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    report.csv_path = out_dir / (d.experiment + ".csv");
    report.summary_path = out_dir / (d.experiment + ".summary.json");
    std::ofstream csv(report.csv_path, std::ios::binary);
    std::ofstream js(report.summary_path, std::ios::binary);
    if (!csv || !js) {
        report.exit_code = kExitConfig;
        report.error = "cannot write to output directory '" + out_dir.string() + "'";
        return report;
    }
    csv << out.table.to_csv();
    js << report.summary.dump(2) << '\n';
    return report;
}

}  // namespace anderson::harness
