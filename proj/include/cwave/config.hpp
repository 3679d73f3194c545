#pragma once

// Run configuration: strict JSON parsing (unknown keys rejected), defaults written
// back into the echoed document, and assembly of a RunDescription.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwave/coefficients.hpp"
#include "cwave/dynamics.hpp"
#include "cwave/errors.hpp"
#include "cwave/grid.hpp"
#include "cwave/history.hpp"
#include "cwave/nonlinearity.hpp"
#include "cwave/random_fields.hpp"
#include "cwave/semigroup.hpp"

namespace cwave {

using json = nlohmann::json;

/// Spatial field preset used for initial data and history profiles.
struct FieldSpec {
    enum class Kind { zero, sine, random_fourier, bump };
    Kind kind = Kind::zero;
    std::vector<std::pair<int, double>> modes;  // sine: (k, amplitude)
    int n_modes = 8;                            // random_fourier
    double decay = 1.0;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
    double center = 0.5;  // bump
    double width = 0.25;
    double height = 1.0;
};

struct InitialSpec {
    FieldSpec u0, u1, y0, y1;
    std::optional<double> norm_H;  // rescale U0 to this energy norm
};

/// g(x, s) = profile(x) * sum_k poly[k] s^k  (separable), y1 (match_initial) or 0.
struct HistorySpec {
    enum class Kind { zero, match_initial, separable };
    Kind kind = Kind::zero;
    FieldSpec profile;
    std::vector<double> poly{1.0};
};

struct NonlinearitySpec {
    enum class Kind { zero, odd_power, tabulated };
    Kind kind = Kind::zero;
    double kappa = 1.0;
    double p = 3.0;
    std::vector<double> s, f, r, h;
};

struct CertificateSpec {
    SemigroupEstimate::Method method = SemigroupEstimate::Method::spectral;
    double M = 1.0;      // given
    double alpha = 0.0;  // given
    int n_samples = 16;
    double T_probe = 20.0;
    double safety_margin = 0.05;
    double T_grid_step = 0.01;
    bool cross_check = false;
};

struct FitSpec {
    std::optional<std::pair<double, double>> window;  // default: last third of the run
    std::string column = "norm_H";
};

struct RunConfig {
    int n_interior = 0;
    double L = 1.0;
    std::optional<double> dt;
    double cfl = 0.5;
    double T_final = 0.0;
    int output_stride = 1;
    Mode mode = Mode::linear_reference;
    std::optional<double> tau;
    CoefficientSpec coefficients;
    NonlinearitySpec nl_u, nl_y;
    InitialSpec initial;
    std::optional<HistorySpec> history;
    std::optional<CertificateSpec> certificate;
    FitSpec fit;
    std::uint64_t seed = 0;
    json echo;  // the input document with defaults filled in

    double resolved_dt() const { return dt ? *dt : cfl * L / (n_interior + 1); }
    std::pair<double, double> fit_window() const {
        return fit.window ? *fit.window : std::pair{2.0 * T_final / 3.0, T_final};
    }
};

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

/// View of a JSON object that records which keys were read and rejects the rest.
class StrictObject {
public:
    StrictObject(json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(label() + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.push_back(key);
        return j_.contains(key);
    }

    json& at(const std::string& key) {
        if (!has(key)) throw ConfigError(where(key) + ": required field missing");
        return j_[key];
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(where(key) + ": must be finite");
        return x;
    }

    double number_or(const std::string& key, double fallback) {
        if (!has(key)) {
            j_[key] = fallback;
            return fallback;
        }
        return number(key);
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    long long integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v.get<long long>();
    }

    long long integer_or(const std::string& key, long long fallback) {
        if (!has(key)) {
            j_[key] = fallback;
            return fallback;
        }
        return integer(key);
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::string string_or(const std::string& key, const std::string& fallback) {
        if (!has(key)) {
            j_[key] = fallback;
            return fallback;
        }
        return string(key);
    }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) {
            j_[key] = fallback;
            return fallback;
        }
        const json& v = j_[key];
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = at(key);
        if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void forbid(const std::string& key, const std::string& why) {
        if (j_.contains(key)) throw ConfigError(where(key) + ": " + why);
    }

    /// Throws on the first key that was never looked at.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw ConfigError(where(it.key()) + ": unknown key");
    }

    std::string where(const std::string& key) const { return join_path(path_, key); }
    std::string label() const { return path_.empty() ? "config" : path_; }

private:
    json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

inline std::vector<std::pair<double, double>> parse_intervals(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a nonempty array of [lo, hi] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& iv : v) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
            throw ConfigError(path + ": each interval must be [lo, hi]");
        out.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    return out;
}

inline ProfileSpec parse_profile(json& j, const std::string& path) {
    if (j.is_number()) return ProfileSpec::make_constant(j.get<double>());
    StrictObject o(j, path);
    const std::string kind = o.string("kind");
    ProfileSpec p;
    if (kind == "constant") {
        p = ProfileSpec::make_constant(o.number("value"));
    } else if (kind == "step") {
        const json& pcs = o.at("pieces");
        if (!pcs.is_array()) throw ConfigError(o.where("pieces") + ": expected an array of [left, right, value]");
        std::vector<ProfileSpec::Piece> pieces;
        for (const auto& pc : pcs) {
            if (!pc.is_array() || pc.size() != 3 || !pc[0].is_number() || !pc[1].is_number() || !pc[2].is_number())
                throw ConfigError(o.where("pieces") + ": each piece must be [left, right, value]");
            pieces.push_back({pc[0].get<double>(), pc[1].get<double>(), pc[2].get<double>()});
            if (!(pieces.back().right > pieces.back().left))
                throw ConfigError(o.where("pieces") + ": piece with right <= left");
        }
        p = ProfileSpec::make_step(std::move(pieces), o.number_or("background", 0.0));
    } else if (kind == "bump") {
        const double center = o.number("center");
        const double width = o.number("width");
        if (!(width > 0.0)) throw ConfigError(o.where("width") + ": must be positive");
        p = ProfileSpec::make_bump(center, width, o.number("height"), o.number_or("background", 0.0));
    } else {
        throw ConfigError(o.where("kind") + ": unknown profile kind '" + kind + "'");
    }
    o.finish();
    return p;
}

inline FieldSpec parse_field(json& j, const std::string& path, std::uint64_t default_seed) {
    StrictObject o(j, path);
    const std::string kind = o.string("kind");
    FieldSpec f;
    if (kind == "zero") {
        f.kind = FieldSpec::Kind::zero;
    } else if (kind == "sine") {
        f.kind = FieldSpec::Kind::sine;
        const json& ms = o.at("modes");
        if (!ms.is_array() || ms.empty()) throw ConfigError(o.where("modes") + ": expected [[k, amplitude], ...]");
        for (const auto& m : ms) {
            if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number())
                throw ConfigError(o.where("modes") + ": each mode must be [k, amplitude] with integer k");
            const int k = m[0].get<int>();
            if (k < 1) throw ConfigError(o.where("modes") + ": mode index must be >= 1");
            f.modes.emplace_back(k, m[1].get<double>());
        }
    } else if (kind == "random_fourier") {
        f.kind = FieldSpec::Kind::random_fourier;
        f.n_modes = static_cast<int>(o.integer_or("n_modes", 8));
        if (f.n_modes < 1) throw ConfigError(o.where("n_modes") + ": must be >= 1");
        f.decay = o.number_or("decay", 1.0);
        f.amplitude = o.number_or("amplitude", 1.0);
        const long long s = o.integer_or("seed", static_cast<long long>(default_seed));
        if (s < 0) throw ConfigError(o.where("seed") + ": must be nonnegative");
        f.seed = static_cast<std::uint64_t>(s);
    } else if (kind == "bump") {
        f.kind = FieldSpec::Kind::bump;
        f.center = o.number("center");
        f.width = o.number("width");
        if (!(f.width > 0.0)) throw ConfigError(o.where("width") + ": must be positive");
        f.height = o.number("height");
    } else {
        throw ConfigError(o.where("kind") + ": unknown field preset '" + kind + "'");
    }
    o.finish();
    return f;
}

inline NonlinearitySpec parse_nonlinearity(json& j, const std::string& path) {
    StrictObject o(j, path);
    const std::string kind = o.string("kind");
    NonlinearitySpec n;
    if (kind == "zero") {
        n.kind = NonlinearitySpec::Kind::zero;
    } else if (kind == "odd_power") {
        n.kind = NonlinearitySpec::Kind::odd_power;
        n.kappa = o.number("kappa");
        n.p = o.number("p");
    } else if (kind == "tabulated") {
        n.kind = NonlinearitySpec::Kind::tabulated;
        n.s = o.numbers("s");
        n.f = o.numbers("f");
        n.r = o.numbers("r");
        n.h = o.numbers("h");
    } else {
        throw ConfigError(o.where("kind") + ": unknown nonlinearity kind '" + kind + "'");
    }
    o.finish();
    return n;
}

inline SemigroupEstimate::Method method_from_string(const std::string& s, const std::string& where) {
    if (s == "spectral") return SemigroupEstimate::Method::spectral;
    if (s == "ensemble") return SemigroupEstimate::Method::ensemble;
    if (s == "given") return SemigroupEstimate::Method::given;
    throw ConfigError(where + ": unknown method '" + s + "' (spectral, ensemble, given)");
}

inline CertificateSpec parse_certificate(json& j, const std::string& path) {
    StrictObject o(j, path);
    CertificateSpec c;
    c.method = method_from_string(o.string_or("method", "spectral"), o.where("method"));
    if (c.method == SemigroupEstimate::Method::given) {
        c.M = o.number("M");
        c.alpha = o.number("alpha");
        if (!(c.M >= 1.0)) throw ConfigError(o.where("M") + ": must be >= 1");
        if (!(c.alpha > 0.0)) throw ConfigError(o.where("alpha") + ": must be positive");
    } else {
        o.forbid("M", "only allowed with method=given");
        o.forbid("alpha", "only allowed with method=given");
    }
    c.n_samples = static_cast<int>(o.integer_or("n_samples", 16));
    if (c.n_samples < 1) throw ConfigError(o.where("n_samples") + ": must be >= 1");
    c.T_probe = o.number_or("T_probe", 20.0);
    if (!(c.T_probe > 0.0)) throw ConfigError(o.where("T_probe") + ": must be positive");
    c.safety_margin = o.number_or("safety_margin", 0.05);
    if (!(c.safety_margin >= 0.0 && c.safety_margin < 1.0))
        throw ConfigError(o.where("safety_margin") + ": must lie in [0, 1)");
    c.T_grid_step = o.number_or("T_grid_step", 0.01);
    if (!(c.T_grid_step > 0.0)) throw ConfigError(o.where("T_grid_step") + ": must be positive");
    c.cross_check = o.boolean_or("cross_check", false);
    o.finish();
    return c;
}

}  // namespace detail

/// Byte offset -> 1-based (line, column).
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline json parse_json_text(const std::string& text, const std::string& source = "config") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte is 1-based and points just past the offending character
        const std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = line_column(text, off);
        throw ConfigError(source + ": JSON parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col));
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Validates a parsed document; the returned echo carries filled-in defaults.
inline RunConfig parse_config_json(json doc) {
    RunConfig cfg;
    detail::StrictObject root(doc, "");

    const long long seed = root.integer_or("seed", 0);
    if (seed < 0) throw ConfigError("seed: must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);

    {
        detail::StrictObject grid(root.at("grid"), "grid");
        const long long n = grid.integer("n_interior");
        if (n < 1 || n > 100000) throw ConfigError("grid.n_interior: must lie in [1, 100000]");
        cfg.n_interior = static_cast<int>(n);
        cfg.L = grid.number_or("L", 1.0);
        if (!(cfg.L > 0.0)) throw ConfigError("grid.L: must be positive");
        grid.finish();
    }
    {
        detail::StrictObject time(root.at("time"), "time");
        cfg.T_final = time.number("T_final");
        if (!(cfg.T_final > 0.0)) throw ConfigError("time.T_final: must be positive");
        cfg.cfl = time.number_or("cfl", 0.5);
        if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw ConfigError("time.cfl: must lie in (0, 1]");
        cfg.dt = time.optional_number("dt");
        if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("time.dt: must be positive");
        const long long stride = time.integer_or("output_stride", 1);
        if (stride < 1) throw ConfigError("time.output_stride: must be >= 1");
        cfg.output_stride = static_cast<int>(stride);
        time.finish();
    }

    const std::string mode = root.string("mode");
    try {
        cfg.mode = mode_from_string(mode);
    } catch (const std::exception&) {
        throw ConfigError("mode: unknown mode '" + mode + "' (delayed, indefinite, definite, linear_reference)");
    }
    const bool delayed = cfg.mode == Mode::delayed;
    if (delayed) {
        cfg.tau = root.number("tau");
        if (!(*cfg.tau > 0.0)) throw ConfigError("tau: must be positive");
    } else {
        root.forbid("tau", std::string("tau forbidden for mode=") + to_string(cfg.mode));
        root.forbid("history", std::string("history forbidden for mode=") + to_string(cfg.mode));
    }

    {
        detail::StrictObject co(root.at("coefficients"), "coefficients");
        CoefficientSpec& cs = cfg.coefficients;
        cs.a1 = co.has("a1") ? detail::parse_profile(co.at("a1"), "coefficients.a1") : ProfileSpec::make_constant(0.0);
        cs.a2 = co.has("a2") ? detail::parse_profile(co.at("a2"), "coefficients.a2") : ProfileSpec::make_constant(0.0);
        cs.b = co.has("b") ? detail::parse_profile(co.at("b"), "coefficients.b") : ProfileSpec::make_constant(0.0);
        if (co.has("omega")) cs.omega.intervals = detail::parse_intervals(co.at("omega"), "coefficients.omega");
        if (co.has("omega_b"))
            cs.omega_b.intervals = detail::parse_intervals(co.at("omega_b"), "coefficients.omega_b");
        cs.enforce_support = co.boolean_or("enforce_support", true);
        cs.a0 = co.number_or("a0", 0.0);
        co.finish();
    }

    if (root.has("nonlinearity")) {
        detail::StrictObject nl(root.at("nonlinearity"), "nonlinearity");
        if (nl.has("u")) cfg.nl_u = detail::parse_nonlinearity(nl.at("u"), "nonlinearity.u");
        if (nl.has("y")) cfg.nl_y = detail::parse_nonlinearity(nl.at("y"), "nonlinearity.y");
        nl.finish();
    }

    {
        detail::StrictObject in(root.at("initial"), "initial");
        // Distinct default seeds per component keep random presets independent.
        FieldSpec* slots[] = {&cfg.initial.u0, &cfg.initial.u1, &cfg.initial.y0, &cfg.initial.y1};
        const char* names[] = {"u0", "u1", "y0", "y1"};
        for (int i = 0; i < 4; ++i)
            if (in.has(names[i]))
                *slots[i] = detail::parse_field(in.at(names[i]), std::string("initial.") + names[i],
                                                cfg.seed * 4 + static_cast<std::uint64_t>(i) + 1);
        cfg.initial.norm_H = in.optional_number("norm_H");
        if (cfg.initial.norm_H && !(*cfg.initial.norm_H >= 0.0))
            throw ConfigError("initial.norm_H: must be nonnegative");
        in.finish();
    }

    if (delayed) {
        detail::StrictObject hs(root.at("history"), "history");
        HistorySpec h;
        const std::string kind = hs.string("kind");
        if (kind == "zero") {
            h.kind = HistorySpec::Kind::zero;
        } else if (kind == "match_initial") {
            h.kind = HistorySpec::Kind::match_initial;
        } else if (kind == "separable") {
            h.kind = HistorySpec::Kind::separable;
            h.profile = detail::parse_field(hs.at("profile"), "history.profile", cfg.seed * 4 + 5);
            if (hs.has("poly")) {
                h.poly = hs.numbers("poly");
                if (h.poly.empty()) throw ConfigError("history.poly: must not be empty");
            }
        } else {
            throw ConfigError("history.kind: unknown history kind '" + kind + "' (zero, match_initial, separable)");
        }
        hs.finish();
        cfg.history = h;
    }

    if (root.has("certificate")) cfg.certificate = detail::parse_certificate(root.at("certificate"), "certificate");

    if (root.has("fit")) {
        detail::StrictObject fo(root.at("fit"), "fit");
        if (fo.has("window")) {
            const auto w = fo.numbers("window");
            if (w.size() != 2 || !(w[1] > w[0])) throw ConfigError("fit.window: expected [t_lo, t_hi] with t_lo < t_hi");
            cfg.fit.window = std::pair{w[0], w[1]};
        }
        cfg.fit.column = fo.string_or("column", "norm_H");
        fo.finish();
    }

    root.finish();

    const double h = cfg.L / (cfg.n_interior + 1);
    if (cfg.dt && *cfg.dt > cfg.cfl * h * (1.0 + 1e-12))
        throw ConfigError("time.dt: CFL violation, dt=" + std::to_string(*cfg.dt) + " exceeds cfl*h=" +
                          std::to_string(cfg.cfl * h));
    if (delayed && effective_dt(cfg.resolved_dt(), cfg.T_final) > *cfg.tau * (1.0 + 1e-12))
        throw ConfigError("tau: must be at least the time step");
    cfg.echo = std::move(doc);
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text, const std::string& source = "config") {
    return parse_config_json(parse_json_text(text, source));
}

inline RunConfig parse_config_file(const std::string& path) { return parse_config_text(read_text_file(path), path); }

// ---------------------------------------------------------------------------
// Assembly

inline Field build_field(const FieldSpec& f, const Grid1D& g) {
    switch (f.kind) {
        case FieldSpec::Kind::zero:
            return g.zeros();
        case FieldSpec::Kind::sine: {
            Field out = g.zeros();
            for (const auto& [k, amp] : f.modes)
                for (int j = 0; j < g.n_interior; ++j)
                    out[j] += amp * std::sin(k * std::numbers::pi * g.x(j) / g.length);
            return out;
        }
        case FieldSpec::Kind::random_fourier: {
            Rng rng(f.seed);
            return f.amplitude * random_sine_field(g, rng, f.n_modes, f.decay);
        }
        case FieldSpec::Kind::bump: {
            const ProfileSpec p = ProfileSpec::make_bump(f.center, f.width, f.height);
            return p.sample(g);
        }
    }
    return g.zeros();
}

inline Nonlinearity build_nonlinearity(const NonlinearitySpec& s, double length) {
    switch (s.kind) {
        case NonlinearitySpec::Kind::zero:
            return Nonlinearity::zero();
        case NonlinearitySpec::Kind::odd_power:
            return Nonlinearity::odd_power(s.kappa, s.p, length);
        case NonlinearitySpec::Kind::tabulated:
            return Nonlinearity::tabulated(s.s, s.f, s.r, s.h, length);
    }
    return Nonlinearity::zero();
}

inline State build_initial_state(const RunConfig& cfg, const Grid1D& g) {
    State s(build_field(cfg.initial.u0, g), build_field(cfg.initial.u1, g), build_field(cfg.initial.y0, g),
            build_field(cfg.initial.y1, g), 0.0);
    if (cfg.initial.norm_H) {
        const double nrm = state_norm(g, s);
        if (nrm == 0.0 && *cfg.initial.norm_H > 0.0)
            throw ConfigError("initial.norm_H: cannot rescale zero initial data");
        if (nrm > 0.0) s.data *= *cfg.initial.norm_H / nrm;
    }
    return s;
}

inline HistoryFunction build_history(const RunConfig& cfg, const Grid1D& g, const State& U0) {
    if (!cfg.history) return {};
    const HistorySpec& h = *cfg.history;
    switch (h.kind) {
        case HistorySpec::Kind::zero: {
            Field z = g.zeros();
            return [z](double) { return z; };
        }
        case HistorySpec::Kind::match_initial: {
            Field w0 = U0.w();
            return [w0](double) { return w0; };
        }
        case HistorySpec::Kind::separable: {
            Field prof = build_field(h.profile, g);
            if (cfg.initial.norm_H && h.profile.kind != FieldSpec::Kind::zero) {
                // the history follows the same scaling as the initial data
                const State raw(build_field(cfg.initial.u0, g), build_field(cfg.initial.u1, g),
                                build_field(cfg.initial.y0, g), build_field(cfg.initial.y1, g), 0.0);
                const double nrm = state_norm(g, raw);
                if (nrm > 0.0) prof *= *cfg.initial.norm_H / nrm;
            }
            std::vector<double> poly = h.poly;
            return [prof, poly](double s) {
                double acc = 0.0;
                for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * s + *it;
                return Field(prof * acc);
            };
        }
    }
    return {};
}

inline RunDescription make_run(const RunConfig& cfg) {
    RunDescription run;
    run.grid = build_grid(cfg.n_interior, cfg.L);
    run.coeffs = make_coefficients(cfg.coefficients, run.grid);
    run.nl_u = build_nonlinearity(cfg.nl_u, cfg.L);
    run.nl_y = build_nonlinearity(cfg.nl_y, cfg.L);
    run.mode = cfg.mode;
    run.tau = cfg.tau.value_or(0.0);
    run.initial = build_initial_state(cfg, run.grid);
    run.history = build_history(cfg, run.grid, run.initial);
    run.cfl = cfg.cfl;
    run.dt = cfg.resolved_dt();
    run.T_final = cfg.T_final;
    run.output_stride = cfg.output_stride;
    return run;
}

}  // namespace cwave
