#pragma once

// Run orchestration behind the CLI: simulate, check, spectrum, fit, sweep.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "cwave/certificate.hpp"
#include "cwave/config.hpp"
#include "cwave/dynamics.hpp"
#include "cwave/energy.hpp"
#include "cwave/fit.hpp"
#include "cwave/generator.hpp"
#include "cwave/semigroup.hpp"

#define CWAVE_VERSION "0.1.0"

namespace cwave {

// ---------------------------------------------------------------------------
// Serialization helpers

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// JSON has no infinities; they are written as strings.
inline json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

inline json versions_json() {
    return {{"cwave", CWAVE_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__clang__)
            {"compiler", std::string("clang ") + __clang_version__}
#elif defined(__GNUC__)
            {"compiler", std::string("gcc ") + __VERSION__}
#else
            {"compiler", "unknown"}
#endif
    };
}

inline json to_json(const ConditionCheck& c) {
    return {{"lhs", json_number(c.lhs)},
            {"rhs", json_number(c.rhs)},
            {"margin", json_number(c.margin)},
            {"pass", c.pass}};
}

inline json to_json(const SemigroupEstimate& e) {
    json j = {{"M", json_number(e.M)},
              {"alpha", json_number(e.alpha)},
              {"method", to_string(e.method)},
              {"abscissa", json_number(e.abscissa)},
              {"exponentially_stable", e.exponentially_stable},
              {"n_samples", e.n_samples},
              {"seed", e.seed},
              {"T_probe", e.T_probe},
              {"safety_margin", e.safety_margin}};
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

inline json to_json(const StabilityCertificate& c) {
    json j = {{"mode", to_string(c.mode)},
              {"M", json_number(c.M)},
              {"alpha", json_number(c.alpha)},
              {"tau", c.tau},
              {"a2_inf", c.a2_inf},
              {"a2_minus_inf", c.a2_minus_inf},
              {"condition", to_json(c.condition)},
              {"short_circuited", c.short_circuited},
              {"passed", c.passed},
              {"notes", c.notes}};
    if (c.short_circuited) return j;
    j["T"] = c.T;
    j["C_T"] = json_number(c.horizon_value);
    j["C_T_target"] = c.horizon_target;
    j["C_of_T"] = json_number(c.C_of_T);
    j["gronwall_rate"] = c.gronwall_rate;
    j["rho_h"] = json_number(c.rho_h);
    j["rho_lipschitz"] = json_number(c.rho_lip);
    j["rho"] = json_number(c.rho);
    j["C_rho"] = json_number(c.C_rho);
    j["L_at_Crho"] = json_number(c.L_at_Crho);
    j["lipschitz"] = to_json(c.lipschitz);
    j["data"] = to_json(c.data);
    j["energy_threshold"] = to_json(c.energy_threshold);
    j["initial_norm"] = c.initial_norm;
    j["history_term"] = c.history_term;
    j["initial_energy"] = c.initial_energy;
    j["envelope_prefactor"] = json_number(c.envelope_prefactor);
    j["envelope_rate"] = json_number(c.envelope_rate);
    return j;
}

inline json to_json(const EnergyBoundReport& r) {
    return {{"n_samples", r.n_samples},
            {"worst_lower_margin", json_number(r.worst_lower_margin)},
            {"lower_violations", r.lower_violations},
            {"worst_gronwall_ratio", json_number(r.worst_gronwall_ratio)},
            {"gronwall_violations", r.gronwall_violations},
            {"worst_envelope_ratio", json_number(r.worst_envelope_ratio)},
            {"envelope_violations", r.envelope_violations},
            {"energy_growth", r.energy_growth},
            {"certificate_passed", r.certificate_passed},
            {"passed", r.passed}};
}

inline json to_json(const DecayFit& f) {
    return {{"rate", f.rate}, {"amplitude", f.amplitude}, {"r_squared", f.r_squared}, {"n_points", f.n_points}};
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

inline void ensure_directory(const std::filesystem::path& p) {
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + p.string() + "': " + ec.message());
}

// ---------------------------------------------------------------------------
// Series

inline const std::vector<std::string>& series_columns() {
    static const std::vector<std::string> cols{"t",       "E_total", "E_kin_u", "E_pot_u", "E_kin_y", "E_pot_y",
                                               "E_nl_u",  "E_nl_y",  "E_window", "norm_H", "l2_ut",  "l2_yt"};
    return cols;
}

inline std::string series_header() {
    std::string h;
    for (const auto& c : series_columns()) h += (h.empty() ? "" : ",") + c;
    return h + "\n";
}

inline std::vector<double> series_row(const Grid1D& g, const State& s, double window, Mode mode,
                                      const Nonlinearity& nl1, const Nonlinearity& nl2) {
    const EnergyReport e = energy_for_mode(g, s, window, mode, nl1, nl2);
    return {s.t,
            e.total,
            e.kinetic_u,
            e.potential_u,
            e.kinetic_y,
            e.potential_y,
            e.nonlinear_u,
            e.nonlinear_y,
            e.delay_window,
            state_norm(g, s),
            std::sqrt(l2_norm_sq(g, s.v())),
            std::sqrt(l2_norm_sq(g, s.w()))};
}

inline std::string format_row(const std::vector<double>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) line += ',';
        line += format_double(row[i]);
    }
    return line + "\n";
}

inline std::size_t series_column_index(const std::string& name) {
    const auto& cols = series_columns();
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw ConfigError("unknown series column '" + name + "'");
    return static_cast<std::size_t>(it - cols.begin());
}

// ---------------------------------------------------------------------------
// Classification

struct Classifier {
    double threshold = 0.01;
    std::optional<std::pair<double, double>> window;  // default: last third of the run
};

inline json to_json(const Classifier& c, double T_final) {
    const auto w = c.window ? *c.window : std::pair{2.0 * T_final / 3.0, T_final};
    return {{"threshold", c.threshold},
            {"window", {w.first, w.second}},
            {"quantity", "norm_H"},
            {"rule", "blow-up or rate < -threshold: growth; rate > threshold: decay; else inconclusive"}};
}

struct RateOutcome {
    std::optional<DecayFit> fit;
    std::string flag;  // why no rate, if fit is empty
};

/// Fits the series over the window; zero or underflowed series are flagged instead of thrown.
inline RateOutcome fit_series(const std::vector<double>& t, const std::vector<double>& v,
                              std::pair<double, double> window) {
    RateOutcome out;
    bool all_zero = true;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= window.first && t[i] <= window.second && v[i] != 0.0) all_zero = false;
    if (all_zero) {
        out.flag = "rate undefined: series vanishes on the fit window";
        return out;
    }
    try {
        out.fit = fit_decay(t, v, window);
    } catch (const InvalidInput& e) {
        out.flag = e.what();
    }
    return out;
}

inline std::string classify(bool diverged, const RateOutcome& r, double threshold) {
    if (diverged) return "growth";
    if (!r.fit) return "inconclusive";
    if (r.fit->rate < -threshold) return "growth";
    if (r.fit->rate > threshold) return "decay";
    return "inconclusive";
}

// ---------------------------------------------------------------------------
// Semigroup constants and certificates

/// Reference generator whose semigroup constants enter the certificate for `mode`.
inline GeneratorMode reference_generator(Mode mode) {
    switch (mode) {
        case Mode::delayed:
        case Mode::linear_reference:
            return GeneratorMode::linear_reference;
        case Mode::indefinite:
            return GeneratorMode::indefinite_plus;
        case Mode::definite:
            return GeneratorMode::definite;
    }
    return GeneratorMode::linear_reference;
}

inline SemigroupEstimate estimate_for(const CertificateSpec& spec, SemigroupEstimate::Method method,
                                      const RunDescription& run, std::uint64_t seed) {
    if (method == SemigroupEstimate::Method::given) {
        SemigroupEstimate e;
        e.method = method;
        e.M = spec.M;
        e.alpha = spec.alpha;
        e.abscissa = std::numeric_limits<double>::quiet_NaN();
        e.exponentially_stable = spec.alpha > 0.0;
        e.note = "constants supplied by the configuration";
        return e;
    }
    // Sweep points often share the reference generator; the estimate is a pure function of it.
    struct Entry {
        Eigen::MatrixXd G;
        SemigroupEstimate::Method method;
        int n_samples;
        std::uint64_t seed;
        double T_probe, safety_margin;
        SemigroupEstimate est;
    };
    static std::mutex mu;
    static std::vector<Entry> cache;
    const GeneratorMode gm = reference_generator(run.mode);
    Eigen::MatrixXd G = assemble_generator(run.grid, run.coeffs, gm);
    auto same = [&](const Entry& e) {
        return e.method == method && e.n_samples == spec.n_samples && e.seed == seed && e.T_probe == spec.T_probe &&
               e.safety_margin == spec.safety_margin && e.G.rows() == G.rows() && e.G == G;
    };
    {
        std::lock_guard lock(mu);
        for (const auto& e : cache)
            if (same(e)) return e.est;
    }
    const SemigroupEstimate est = estimate_semigroup_constants(run.grid, run.coeffs, gm, method, spec.n_samples,
                                                               seed, spec.T_probe, spec.safety_margin);
    std::lock_guard lock(mu);
    if (cache.size() >= 8) cache.erase(cache.begin());
    cache.push_back({std::move(G), method, spec.n_samples, seed, spec.T_probe, spec.safety_margin, est});
    return est;
}

struct CertificateOutcome {
    SemigroupEstimate estimate;
    std::optional<SemigroupEstimate> cross;
    std::optional<StabilityCertificate> certificate;
    std::vector<std::string> warnings;
};

inline CertificateOutcome compute_certificate(const RunConfig& cfg, const RunDescription& run) {
    const CertificateSpec spec = cfg.certificate.value_or(CertificateSpec{});
    CertificateOutcome out;
    out.estimate = estimate_for(spec, spec.method, run, cfg.seed);
    if (spec.cross_check && spec.method != SemigroupEstimate::Method::given) {
        const auto other = spec.method == SemigroupEstimate::Method::spectral ? SemigroupEstimate::Method::ensemble
                                                                               : SemigroupEstimate::Method::spectral;
        out.cross = estimate_for(spec, other, run, cfg.seed);
        const double a = out.estimate.alpha, b = out.cross->alpha;
        if (a > 0.0 && b > 0.0 && std::abs(a - b) > 0.25 * std::max(a, b)) {
            std::ostringstream os;
            os << "spectral and ensemble alpha disagree by more than 25% (" << a << " vs " << b << ")";
            out.warnings.push_back(os.str());
        }
    }
    if (run.mode != Mode::delayed && run.mode != Mode::indefinite) {
        out.warnings.push_back(std::string("no smallness certificate for mode=") + to_string(run.mode));
        return out;
    }
    CertificateOptions opt;
    opt.T_grid_step = spec.T_grid_step;
    opt.seed = cfg.seed;
    if (run.mode == Mode::delayed) {
        const HistoryBuffer buf = init_history(run.history, run.tau, effective_dt(run.dt, run.T_final), run.grid);
        out.certificate = smallness_certificate(run.grid, run.initial, &buf, run.coeffs, run.nl_u, run.nl_y,
                                                out.estimate, run.mode, run.tau, opt);
    } else {
        out.certificate = smallness_certificate(run.grid, run.initial, nullptr, run.coeffs, run.nl_u, run.nl_y,
                                                out.estimate, run.mode, 0.0, opt);
    }
    return out;
}

inline json to_json(const CertificateOutcome& o) {
    json j;
    j["semigroup"] = to_json(o.estimate);
    if (o.cross) j["cross_check"] = to_json(*o.cross);
    if (o.certificate) j["certificate"] = to_json(*o.certificate);
    j["warnings"] = o.warnings;
    return j;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulationResult {
    IntegrationSummary summary;
    std::vector<double> times;
    std::vector<double> fit_values;  // the configured fit column
    RateOutcome rate;
    std::string classification;
    std::optional<CertificateOutcome> certificate;
    std::optional<EnergyBoundReport> bounds;
    json manifest;
};

/// Runs one configuration. `series_out`, when given, receives the CSV rows as they are produced.
inline SimulationResult simulate(const RunConfig& cfg, std::ostream* series_out, const Classifier& classifier = {}) {
    const RunDescription run = make_run(cfg);
    SimulationResult res;
    if (cfg.certificate) res.certificate = compute_certificate(cfg, run);

    std::optional<EnergyBoundChecker> checker;
    if (res.certificate && res.certificate->certificate && res.certificate->certificate->passed)
        checker.emplace(*res.certificate->certificate);

    const std::size_t col = series_column_index(cfg.fit.column);
    if (series_out) *series_out << series_header();
    res.summary = integrate(run, [&](const State& s, const StepInfo& info) {
        const std::vector<double> row = series_row(run.grid, s, info.window_energy, run.mode, run.nl_u, run.nl_y);
        if (series_out) *series_out << format_row(row);
        res.times.push_back(s.t);
        res.fit_values.push_back(row[col]);
        if (checker) checker->observe(s.t, row[1], row[9] * row[9], row[8]);
    });
    if (checker) res.bounds = checker->report();

    const bool diverged = res.summary.status == IntegrationSummary::Status::diverged;
    Classifier cl = classifier;
    if (!cl.window) cl.window = cfg.fit_window();
    res.rate = fit_series(res.times, res.fit_values, *cl.window);
    res.classification = classify(diverged, res.rate, cl.threshold);

    json& m = res.manifest;
    m["status"] = diverged ? "diverged" : "completed";
    m["blowup_time"] = res.summary.blowup_time ? json(*res.summary.blowup_time) : json(nullptr);
    m["config"] = cfg.echo;
    m["seed"] = cfg.seed;
    m["versions"] = versions_json();
    m["dt_effective"] = res.summary.dt;
    m["n_steps"] = res.summary.n_steps;
    m["n_outputs"] = res.times.size();
    json fit = {{"column", cfg.fit.column}, {"window", {cl.window->first, cl.window->second}}};
    if (res.rate.fit)
        fit.update(to_json(*res.rate.fit));
    else
        fit["rate"] = nullptr, fit["flag"] = res.rate.flag;
    m["fit"] = fit;
    m["classifier"] = to_json(cl, cfg.T_final);
    m["classification"] = res.classification;
    if (res.certificate) {
        m["certificate"] = to_json(*res.certificate);
        if (res.bounds) m["energy_bounds"] = to_json(*res.bounds);
        const auto& cert = res.certificate->certificate;
        if (cert && cert->passed && res.rate.fit) {
            const double half = 0.5 * cert->envelope_rate;
            m["rate_vs_envelope"] = {{"fitted_rate", res.rate.fit->rate},
                                     {"half_envelope_rate", half},
                                     {"tolerance", cl.threshold},
                                     {"pass", res.rate.fit->rate >= half - cl.threshold}};
        }
    }
    return res;
}

/// Writes series.csv and manifest.json into out_dir.
inline SimulationResult run_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    ensure_directory(out_dir);
    const auto series_path = out_dir / "series.csv";
    std::ofstream series(series_path, std::ios::binary);
    if (!series) throw std::runtime_error("cannot write '" + series_path.string() + "'");
    SimulationResult res = simulate(cfg, &series);
    series.close();
    write_text_file(out_dir / "manifest.json", res.manifest.dump(2) + "\n");
    return res;
}

// ---------------------------------------------------------------------------
// check / spectrum / fit

inline json run_check(const RunConfig& cfg) {
    const RunDescription run = make_run(cfg);
    const CertificateOutcome o = compute_certificate(cfg, run);
    json j = to_json(o);
    j["mode"] = to_string(cfg.mode);
    return j;
}

inline json run_spectrum(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const RunDescription run = make_run(cfg);
    const GeneratorMode gm = reference_generator(cfg.mode);
    const Eigen::MatrixXd G = assemble_generator(run.grid, run.coeffs, gm);
    const auto ev = generator_eigenvalues(G);
    ensure_directory(out_dir);
    std::string csv = "index,re,im\n";
    for (std::size_t i = 0; i < ev.size(); ++i)
        csv += std::to_string(i) + "," + format_double(ev[i].real()) + "," + format_double(ev[i].imag()) + "\n";
    write_text_file(out_dir / "eigenvalues.csv", csv);
    json j = {{"abscissa", ev.front().real()},
              {"generator", to_string(gm)},
              {"n_eigenvalues", ev.size()},
              {"config", cfg.echo},
              {"versions", versions_json()}};
    write_text_file(out_dir / "spectrum.json", j.dump(2) + "\n");
    return j;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();  // getline drops a trailing empty cell
    return out;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
    t.header = split_csv_line(line);
    t.columns.resize(t.header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != t.header.size())
            throw InvalidInput(path + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                               " fields, expected " + std::to_string(t.header.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            char* end = nullptr;
            const double x = std::strtod(cells[i].c_str(), &end);
            if (end == cells[i].c_str() || *end != '\0')
                throw InvalidInput(path + ": line " + std::to_string(lineno) + ": '" + cells[i] + "' is not a number");
            t.columns[i].push_back(x);
        }
    }
    return t;
}

/// Fits `column` (default norm_H; a two-column file uses its second column) against `t`.
inline json run_fit(const std::string& series_path, std::pair<double, double> window,
                    const std::optional<std::string>& column = std::nullopt) {
    const CsvTable t = read_csv(series_path);
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        if (it == t.header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - t.header.begin());
    };
    const auto ti = find("t");
    if (!ti) throw InvalidInput(series_path + ": no 't' column");
    std::optional<std::size_t> ci;
    if (column) {
        ci = find(*column);
        if (!ci) throw InvalidInput(series_path + ": no column '" + *column + "'");
    } else {
        ci = find("norm_H");
        if (!ci && t.header.size() == 2) ci = 1 - *ti;
        if (!ci) throw InvalidInput(series_path + ": no norm_H column; pass --column");
    }
    const DecayFit f = fit_decay(t.columns[*ti], t.columns[*ci], window);
    json j = to_json(f);
    j["column"] = t.header[*ci];
    j["window"] = {window.first, window.second};
    return j;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepAxis {
    std::string path;
    double min = 0.0;
    double max = 0.0;
    int steps = 2;

    double value(int i) const { return min + (max - min) * static_cast<double>(i) / (steps - 1); }
};

struct SweepSpec {
    json base;
    std::vector<SweepAxis> axes;
    Classifier classifier;
    json echo;
};

/// Splits "a.b.0.c" into components; numeric components index arrays.
inline json* resolve_path(json& doc, const std::string& path) {
    json* cur = &doc;
    std::istringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) return nullptr;
        if (cur->is_object()) {
            if (!cur->contains(part)) return nullptr;
            cur = &(*cur)[part];
        } else if (cur->is_array()) {
            if (!std::all_of(part.begin(), part.end(), ::isdigit)) return nullptr;
            const std::size_t idx = std::stoul(part);
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else {
            return nullptr;
        }
    }
    return cur;
}

inline SweepSpec parse_sweep_json(json doc) {
    SweepSpec spec;
    detail::StrictObject root(doc, "");
    spec.base = root.at("base");
    if (!spec.base.is_object()) throw ConfigError("base: expected a run configuration object");
    (void)parse_config_json(spec.base);  // validate once up front

    const json& axes = root.at("axes");
    if (!axes.is_array() || axes.empty() || axes.size() > 2) throw ConfigError("axes: expected 1 or 2 axes");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        json ax = axes[i];
        const std::string where = "axes." + std::to_string(i);
        detail::StrictObject o(ax, where);
        SweepAxis a;
        a.path = o.string("path");
        a.min = o.number("min");
        a.max = o.number("max");
        const long long steps = o.integer("steps");
        if (steps < 2) throw ConfigError(where + ".steps: must be >= 2");
        a.steps = static_cast<int>(steps);
        o.finish();
        const json* target = resolve_path(spec.base, a.path);
        if (!target) throw ConfigError(where + ".path: '" + a.path + "' does not resolve in base");
        if (!target->is_number()) throw ConfigError(where + ".path: '" + a.path + "' is not a numeric field");
        spec.axes.push_back(a);
    }
    if (spec.axes.size() == 2 && spec.axes[0].path == spec.axes[1].path)
        throw ConfigError("axes: the two axes must differ");

    if (root.has("classifier")) {
        detail::StrictObject c(root.at("classifier"), "classifier");
        spec.classifier.threshold = c.number_or("threshold", 0.01);
        if (!(spec.classifier.threshold >= 0.0)) throw ConfigError("classifier.threshold: must be nonnegative");
        if (c.has("window")) {
            const auto w = c.numbers("window");
            if (w.size() != 2 || !(w[1] > w[0]))
                throw ConfigError("classifier.window: expected [t_lo, t_hi] with t_lo < t_hi");
            spec.classifier.window = std::pair{w[0], w[1]};
        }
        c.finish();
    }
    root.finish();
    spec.echo = std::move(doc);
    return spec;
}

inline SweepSpec parse_sweep_file(const std::string& path) {
    return parse_sweep_json(parse_json_text(read_text_file(path), path));
}

struct SweepRow {
    std::vector<double> axis_values;
    std::string classification = "error";
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    std::string certificate = "none";  // pass / fail / none
    double margin = std::numeric_limits<double>::quiet_NaN();
    std::string status;
    std::string error;
};

inline SweepRow run_sweep_point(const SweepSpec& spec, const std::vector<double>& values) {
    SweepRow row;
    row.axis_values = values;
    try {
        json doc = spec.base;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) *resolve_path(doc, spec.axes[a].path) = values[a];
        const RunConfig cfg = parse_config_json(std::move(doc));
        const SimulationResult res = simulate(cfg, nullptr, spec.classifier);
        row.classification = res.classification;
        row.status = res.summary.status == IntegrationSummary::Status::diverged ? "diverged" : "completed";
        if (res.rate.fit) row.fitted_rate = res.rate.fit->rate;
        if (res.certificate && res.certificate->certificate) {
            const auto& cert = *res.certificate->certificate;
            row.certificate = cert.passed ? "pass" : "fail";
            row.margin = cert.condition.margin;
        }
    } catch (const std::exception& e) {
        row.classification = "error";
        row.status = "error";
        row.error = e.what();
    }
    return row;
}

inline std::string csv_safe(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = (ch == ',') ? ';' : ' ';
    return s;
}

struct SweepResult {
    std::vector<SweepRow> rows;
    int containment_violations = 0;  // certificate pass with empirical growth
    json manifest;
};

/// Evaluates the grid with up to `parallel` worker threads; rows are written in axis-major order.
inline SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, int parallel) {
    if (parallel < 1) throw ConfigError("parallel: must be >= 1");
    std::vector<std::vector<double>> points;
    if (spec.axes.size() == 1) {
        for (int i = 0; i < spec.axes[0].steps; ++i) points.push_back({spec.axes[0].value(i)});
    } else {
        for (int i = 0; i < spec.axes[0].steps; ++i)
            for (int k = 0; k < spec.axes[1].steps; ++k)
                points.push_back({spec.axes[0].value(i), spec.axes[1].value(k)});
    }

    SweepResult res;
    res.rows.resize(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) res.rows[i] = run_sweep_point(spec, points[i]);
    };
    const int n_threads = std::min<int>(parallel, static_cast<int>(points.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::string csv;
    for (const auto& ax : spec.axes) csv += ax.path + ",";
    csv += "classification,fitted_rate,certificate,margin,status,error\n";
    for (const auto& r : res.rows) {
        for (double v : r.axis_values) csv += format_double(v) + ",";
        csv += r.classification + "," + format_double(r.fitted_rate) + "," + r.certificate + "," +
               format_double(r.margin) + "," + r.status + "," + csv_safe(r.error) + "\n";
        if (r.certificate == "pass" && r.classification == "growth") ++res.containment_violations;
    }
    ensure_directory(out_dir);
    write_text_file(out_dir / "stability_map.csv", csv);

    const double T_final = spec.base["time"]["T_final"].get<double>();
    json m;
    m["spec"] = spec.echo;
    m["n_points"] = res.rows.size();
    m["classifier"] = to_json(spec.classifier, T_final);
    m["containment_violations"] = res.containment_violations;
    m["versions"] = versions_json();
    res.manifest = m;
    write_text_file(out_dir / "manifest.json", m.dump(2) + "\n");
    return res;
}

}  // namespace cwave
