#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cwave/harness.hpp"

using namespace cwave;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const std::string kConfigs = CWAVE_CONFIG_DIR;
const std::string kCli = CWAVE_CLI;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cwave_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json minimal_delayed() {
    return json::parse(R"({
        "grid": {"n_interior": 19},
        "time": {"T_final": 1.0},
        "mode": "delayed",
        "tau": 0.1,
        "coefficients": {"a1": 1.0, "a2": 0.2, "b": 1.0, "a0": 1.0},
        "initial": {"u0": {"kind": "sine", "modes": [[1, 1.0]]}},
        "history": {"kind": "zero"}
    })");
}

json small_linear(double T = 4.0) {
    json j = json::parse(R"({
        "seed": 2,
        "grid": {"n_interior": 19},
        "time": {"output_stride": 2},
        "mode": "linear_reference",
        "coefficients": {"a1": 2.0, "b": 2.0, "a0": 1.0},
        "initial": {
            "u0": {"kind": "random_fourier", "n_modes": 5},
            "y1": {"kind": "sine", "modes": [[2, 0.4]]}
        }
    })");
    j["time"]["T_final"] = T;
    return j;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

// ---------------------------------------------------------------- parsing

TEST(Config, MinimalDelayedGetsDefaults) {
    const RunConfig cfg = parse_config_json(minimal_delayed());
    EXPECT_DOUBLE_EQ(cfg.cfl, 0.5);
    EXPECT_EQ(cfg.output_stride, 1);
    EXPECT_DOUBLE_EQ(cfg.L, 1.0);
    EXPECT_EQ(cfg.seed, 0u);
    EXPECT_FALSE(cfg.dt.has_value());
    EXPECT_DOUBLE_EQ(cfg.resolved_dt(), 0.5 / 20.0);
    EXPECT_EQ(cfg.fit.column, "norm_H");
    EXPECT_DOUBLE_EQ(cfg.fit_window().first, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(cfg.fit_window().second, 1.0);
    // the echo carries the filled-in defaults
    EXPECT_EQ(cfg.echo["time"]["cfl"], 0.5);
    EXPECT_EQ(cfg.echo["time"]["output_stride"], 1);
}

TEST(Config, TauForbiddenOutsideDelayedMode) {
    json j = minimal_delayed();
    j["mode"] = "indefinite";
    j.erase("history");
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("tau forbidden for mode=indefinite"), std::string::npos);
    j.erase("tau");
    j["history"] = {{"kind", "zero"}};
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("history forbidden for mode=indefinite"),
              std::string::npos);
}

TEST(Config, DelayedNeedsTauAndHistory) {
    json j = minimal_delayed();
    j.erase("tau");
    EXPECT_THROW(parse_config_json(j), ConfigError);
    j = minimal_delayed();
    j.erase("history");
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("history"), std::string::npos);
    j = minimal_delayed();
    j["tau"] = 0.001;  // below the step
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("tau"), std::string::npos);
}

TEST(Config, ParseErrorReportsLineAndColumn) {
    const std::string text = "{\n  \"grid\": {\"n_interior\": 5},\n  \"time\": {,\n}";
    const std::string msg = message_of([&] { parse_config_text(text, "bad.json"); });
    EXPECT_NE(msg.find("bad.json"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3, column 12"), std::string::npos) << msg;
}

TEST(Config, UnknownKeysRejectedWithPath) {
    json j = minimal_delayed();
    j["grid"]["nodes"] = 3;
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("grid.nodes: unknown key"), std::string::npos);
    j = minimal_delayed();
    j["extra"] = true;
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("extra: unknown key"), std::string::npos);
    j = minimal_delayed();
    j["initial"]["u0"]["amp"] = 1;
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("initial.u0.amp"), std::string::npos);
}

TEST(Config, ValidationNamesTheField) {
    json j = minimal_delayed();
    j["grid"]["n_interior"] = 0;
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("grid.n_interior"), std::string::npos);
    j = minimal_delayed();
    j["time"]["dt"] = 0.5;
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("CFL"), std::string::npos);
    j = minimal_delayed();
    j["mode"] = "sideways";
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("mode"), std::string::npos);
    j = minimal_delayed();
    j["nonlinearity"] = {{"u", {{"kind", "odd_power"}, {"kappa", 1.0}, {"p", 1.0}}}};
    EXPECT_THROW(make_run(parse_config_json(j)), ConfigError);
    j = minimal_delayed();
    j["certificate"] = {{"method", "spectral"}, {"alpha", 1.0}};
    EXPECT_NE(message_of([&] { parse_config_json(j); }).find("certificate.alpha"), std::string::npos);
}

TEST(Config, SampleConfigsParse) {
    for (const char* name : {"conservation.json", "localized_damping.json", "certified_delay.json", "indefinite.json"})
        EXPECT_NO_THROW(parse_config_file(kConfigs + "/" + name)) << name;
    for (const char* name : {"delay_sweep.json", "indefinite_sweep.json"})
        EXPECT_NO_THROW(parse_sweep_file(kConfigs + "/" + name)) << name;
}

TEST(Config, NormRescalingAndSeededPresets) {
    json j = small_linear();
    j["initial"]["norm_H"] = 0.25;
    const RunDescription run = make_run(parse_config_json(j));
    EXPECT_NEAR(state_norm(run.grid, run.initial), 0.25, 1e-15);
    // a different top-level seed changes the random preset
    json k = small_linear();
    k["seed"] = 3;
    EXPECT_NE(make_run(parse_config_json(k)).initial.u(), make_run(parse_config_json(small_linear())).initial.u());
    EXPECT_EQ(make_run(parse_config_json(small_linear())).initial.u(),
              make_run(parse_config_json(small_linear())).initial.u());
}

// ---------------------------------------------------------------- formatting

TEST(Series, HeaderAndNumberFormat) {
    EXPECT_EQ(series_header(),
              "t,E_total,E_kin_u,E_pot_u,E_kin_y,E_pot_y,E_nl_u,E_nl_y,E_window,norm_H,l2_ut,l2_yt\n");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0 / 3.0), "0.33333333333333331");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(kInf), "inf");
    EXPECT_EQ(format_double(-kInf), "-inf");
    EXPECT_EQ(std::stod(format_double(pi)), pi);
    EXPECT_EQ(format_row({1.0, 0.5}), "1,0.5\n");
}

// ---------------------------------------------------------------- simulate

TEST(Simulate, WritesSeriesAndManifest) {
    const fs::path out = scratch("sim");
    const RunConfig cfg = parse_config_json(small_linear());
    const SimulationResult res = run_simulate(cfg, out);
    const std::string csv = slurp(out / "series.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line + "\n", series_header());
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
        ++rows;
    }
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(static_cast<std::size_t>(rows), res.times.size());
    const json m = json::parse(slurp(out / "manifest.json"));
    for (const char* key : {"status", "blowup_time", "config", "seed", "versions", "fit", "classification"})
        EXPECT_TRUE(m.contains(key)) << key;
    EXPECT_EQ(m["status"], "completed");
    EXPECT_TRUE(m["blowup_time"].is_null());
    EXPECT_EQ(m["seed"], 2);
    EXPECT_EQ(m["classification"], "decay");
    EXPECT_GT(m["fit"]["rate"].get<double>(), 0.0);
}

TEST(Simulate, ZeroInitialDataFlagsRate) {
    json j = small_linear();
    j["initial"] = json::object();
    const fs::path out = scratch("zero");
    const SimulationResult res = run_simulate(parse_config_json(j), out);
    EXPECT_FALSE(res.rate.fit.has_value());
    EXPECT_NE(res.rate.flag.find("rate undefined"), std::string::npos);
    EXPECT_EQ(res.classification, "inconclusive");
    const json m = json::parse(slurp(out / "manifest.json"));
    EXPECT_TRUE(m["fit"]["rate"].is_null());
    std::istringstream in(slurp(out / "series.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto cells = split_csv_line(line);
        for (std::size_t c = 1; c < cells.size(); ++c) EXPECT_EQ(cells[c], "0");
    }
}

TEST(Simulate, ConservingConfigKeepsEnergy) {
    RunConfig cfg = parse_config_file(kConfigs + "/conservation.json");
    cfg.fit.column = "E_total";
    const SimulationResult res = simulate(cfg, nullptr);
    const double E0 = res.fit_values.front();
    for (double e : res.fit_values) EXPECT_NEAR(e, E0, 1e-6 * E0);
}

TEST(Simulate, BlowUpIsReportedWithPartialSeries) {
    json j = small_linear(5.0);
    j["mode"] = "indefinite";
    j["coefficients"] = {{"a1", 0.0}, {"a2", 0.0}, {"b", 0.0}, {"enforce_support", false}};
    j["nonlinearity"] = {{"u", {{"kind", "odd_power"}, {"kappa", 1.0}, {"p", 5.0}}}};
    j["initial"] = {{"u0", {{"kind", "sine"}, {"modes", {{1, 50.0}}}}}};
    const fs::path out = scratch("blowup");
    const SimulationResult res = run_simulate(parse_config_json(j), out);
    EXPECT_EQ(res.summary.status, IntegrationSummary::Status::diverged);
    EXPECT_EQ(res.classification, "growth");
    const json m = json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(m["status"], "diverged");
    EXPECT_GT(m["blowup_time"].get<double>(), 0.0);
    EXPECT_LT(m["blowup_time"].get<double>(), 5.0);
    const std::string csv = slurp(out / "series.csv");
    EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Simulate, PassingCertificateRecordsRateAgainstEnvelope) {
    json j = parse_json_text(slurp(kConfigs + "/certified_delay.json"));
    j["grid"]["n_interior"] = 49;
    j["time"]["T_final"] = 12.0;
    const SimulationResult res = simulate(parse_config_json(j), nullptr);
    ASSERT_TRUE(res.certificate && res.certificate->certificate);
    const StabilityCertificate& c = *res.certificate->certificate;
    ASSERT_TRUE(c.passed);
    ASSERT_TRUE(res.bounds.has_value());
    EXPECT_TRUE(res.bounds->passed);
    const json& rv = res.manifest["rate_vs_envelope"];
    EXPECT_TRUE(rv["pass"].get<bool>());
    EXPECT_NEAR(rv["half_envelope_rate"].get<double>(), 0.5 * c.envelope_rate, 1e-15);
    EXPECT_GE(res.rate.fit->rate, 0.5 * c.envelope_rate - 0.01);
    EXPECT_TRUE(res.manifest.contains("energy_bounds"));
}

TEST(Simulate, ManifestAloneReproducesTheSeries) {
    const RunConfig cfg = parse_config_file(kConfigs + "/indefinite.json");
    json doc = parse_json_text(slurp(kConfigs + "/indefinite.json"));
    doc["grid"]["n_interior"] = 29;
    doc["time"]["T_final"] = 2.0;
    doc.erase("certificate");
    std::ostringstream a, b;
    const SimulationResult first = simulate(parse_config_json(doc), &a);
    simulate(parse_config_json(first.manifest["config"]), &b);
    EXPECT_EQ(a.str(), b.str());
    (void)cfg;
}

TEST(Simulate, DeterministicAcrossRuns) {
    json j = small_linear();
    j["initial"]["y0"] = {{"kind", "random_fourier"}, {"n_modes", 7}};
    std::ostringstream a, b;
    simulate(parse_config_json(j), &a);
    simulate(parse_config_json(j), &b);
    EXPECT_EQ(a.str(), b.str());
}

// ---------------------------------------------------------------- check / spectrum / fit

TEST(Check, WorkedDelayConstants) {
    json j = minimal_delayed();
    j["coefficients"]["a2"] = 0.3;
    j["certificate"] = {{"method", "given"}, {"M", 2.0}, {"alpha", 1.0}};
    const json out = run_check(parse_config_json(j));
    const json& cond = out["certificate"]["condition"];
    EXPECT_TRUE(cond["pass"].get<bool>());
    EXPECT_NEAR(cond["margin"].get<double>(), 0.1684, 1e-4);
    EXPECT_EQ(out["semigroup"]["method"], "given");
}

TEST(Check, ModesWithoutCertificateWarn) {
    json j = small_linear();
    const json out = run_check(parse_config_json(j));
    EXPECT_FALSE(out.contains("certificate"));
    ASSERT_EQ(out["warnings"].size(), 1u);
    EXPECT_TRUE(out["semigroup"]["exponentially_stable"].get<bool>());
}

TEST(Spectrum, UndampedUncoupledIsOnTheAxis) {
    json j = small_linear();
    j["coefficients"] = {{"a1", 0.0}, {"b", 0.0}, {"enforce_support", false}};
    const fs::path out = scratch("spectrum");
    const RunConfig cfg = parse_config_json(j);
    const json s = run_spectrum(cfg, out);
    EXPECT_NEAR(s["abscissa"].get<double>(), 0.0, 1e-10);
    const CsvTable t = read_csv((out / "eigenvalues.csv").string());
    ASSERT_EQ(t.columns[0].size(), 4u * 19u);
    const Grid1D g = build_grid(19, 1.0);
    for (int k = 1; k <= 19; ++k) {
        const double om = std::sqrt(g.laplacian_eigenvalue(k));
        int hits = 0;
        for (std::size_t i = 0; i < t.columns[1].size(); ++i)
            if (std::abs(t.columns[1][i]) < 1e-9 && std::abs(std::abs(t.columns[2][i]) - om) < 1e-8 * om) ++hits;
        EXPECT_EQ(hits, 4) << "k=" << k;
    }
    EXPECT_TRUE(fs::exists(out / "spectrum.json"));
}

TEST(Fit, SyntheticExponential) {
    const fs::path dir = scratch("fit");
    std::string csv = "t,norm_H\n";
    for (int i = 0; i <= 100; ++i) csv += format_double(0.05 * i) + "," + format_double(5.0 * std::exp(-0.1 * i)) + "\n";
    write(dir / "s.csv", csv);
    const json f = run_fit((dir / "s.csv").string(), {0.0, 5.0});
    EXPECT_NEAR(f["rate"].get<double>(), 2.0, 1e-10);
    EXPECT_NEAR(f["amplitude"].get<double>(), 5.0, 1e-9);

    write(dir / "two.csv", "t,v\n" + csv.substr(csv.find('\n') + 1));
    EXPECT_NEAR(run_fit((dir / "two.csv").string(), {1.0, 4.0})["rate"].get<double>(), 2.0, 1e-10);
    EXPECT_THROW(run_fit((dir / "two.csv").string(), {1.0, 4.0}, std::string("E_total")), InvalidInput);
    EXPECT_THROW(run_fit((dir / "missing.csv").string(), {1.0, 4.0}), std::exception);
}

TEST(Fit, FitsASimulatedSeriesByColumn) {
    const fs::path out = scratch("fit_sim");
    const SimulationResult res = run_simulate(parse_config_json(small_linear()), out);
    const json f = run_fit((out / "series.csv").string(), {2.0, 4.0});
    EXPECT_DOUBLE_EQ(f["rate"].get<double>(), fit_decay(res.times, res.fit_values, {2.0, 4.0}).rate);
    const json e = run_fit((out / "series.csv").string(), {2.0, 4.0}, std::string("E_total"));
    EXPECT_NEAR(e["rate"].get<double>(), 2.0 * f["rate"].get<double>(), 0.2 * f["rate"].get<double>());
}

// ---------------------------------------------------------------- sweep

namespace {

json linear_delay_sweep() {
    json base = json::parse(R"({
        "seed": 1,
        "grid": {"n_interior": 29},
        "time": {"T_final": 20.0, "output_stride": 10},
        "mode": "delayed",
        "tau": 0.5,
        "coefficients": {"a1": 2.0, "a2": 0.0, "b": 2.0, "a0": 1.0},
        "initial": {
            "u0": {"kind": "sine", "modes": [[1, 1.0], [2, 0.3]]},
            "y0": {"kind": "sine", "modes": [[1, 0.5]]},
            "norm_H": 1e-3
        },
        "history": {"kind": "match_initial"}
    })");
    return {{"base", base}, {"axes", {{{"path", "coefficients.a2"}, {"min", 0.0}, {"max", 2.0}, {"steps", 5}}}}};
}

}  // namespace

TEST(Sweep, DelayGainHasASingleDecayToGrowthTransition) {
    const SweepSpec spec = parse_sweep_json(linear_delay_sweep());
    const SweepResult res = run_sweep(spec, scratch("sweep1"), 2);
    ASSERT_EQ(res.rows.size(), 5u);
    EXPECT_EQ(res.rows.front().classification, "decay");  // a2 = 0: undelayed damped system
    EXPECT_EQ(res.rows.back().classification, "growth");
    int transitions = 0;
    for (std::size_t i = 1; i < res.rows.size(); ++i) {
        EXPECT_NE(res.rows[i].classification, "error") << res.rows[i].error;
        if (res.rows[i].classification == "decay") {
            EXPECT_NE(res.rows[i - 1].classification, "growth");
        }
        if (res.rows[i].classification != res.rows[i - 1].classification) ++transitions;
    }
    EXPECT_LE(transitions, 2);  // decay -> (inconclusive ->) growth
}

TEST(Sweep, RowsAreAxisMajorAndCsvMatches) {
    json s = linear_delay_sweep();
    s["base"]["time"]["T_final"] = 2.0;
    s["base"]["time"]["output_stride"] = 1;
    s["axes"] = {{{"path", "coefficients.a2"}, {"min", 0.0}, {"max", 0.2}, {"steps", 3}},
                 {{"path", "tau"}, {"min", 0.1}, {"max", 0.3}, {"steps", 2}}};
    const fs::path out = scratch("sweep2");
    const SweepResult res = run_sweep(parse_sweep_json(s), out, 3);
    ASSERT_EQ(res.rows.size(), 6u);
    const double a2[] = {0.0, 0.0, 0.1, 0.1, 0.2, 0.2}, tau[] = {0.1, 0.3, 0.1, 0.3, 0.1, 0.3};
    for (int i = 0; i < 6; ++i) {
        EXPECT_DOUBLE_EQ(res.rows[i].axis_values[0], a2[i]);
        EXPECT_DOUBLE_EQ(res.rows[i].axis_values[1], tau[i]);
    }
    std::istringstream in(slurp(out / "stability_map.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "coefficients.a2,tau,classification,fitted_rate,certificate,margin,status,error");
    for (int i = 0; i < 6; ++i) {
        ASSERT_TRUE(std::getline(in, line));
        const auto cells = split_csv_line(line);
        ASSERT_EQ(cells.size(), 8u);
        EXPECT_EQ(cells[0], format_double(a2[i]));
        EXPECT_EQ(cells[2], res.rows[i].classification);
        EXPECT_EQ(cells[4], "none");
    }
    EXPECT_FALSE(std::getline(in, line));
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST(Sweep, PerPointFailuresStayInTheirRow) {
    json s = linear_delay_sweep();
    s["base"]["time"]["T_final"] = 2.0;
    // the first tau is below the time step; that row fails validation
    s["axes"] = {{{"path", "tau"}, {"min", 0.0001}, {"max", 0.2001}, {"steps", 3}}};
    const SweepResult res = run_sweep(parse_sweep_json(s), scratch("sweep3"), 1);
    ASSERT_EQ(res.rows.size(), 3u);
    EXPECT_EQ(res.rows[0].classification, "error");
    EXPECT_EQ(res.rows[0].status, "error");
    EXPECT_NE(res.rows[0].error.find("tau"), std::string::npos);
    EXPECT_NE(res.rows[1].classification, "error");
    EXPECT_NE(res.rows[2].classification, "error");
}

TEST(Sweep, DeterministicRegardlessOfParallelism) {
    json s = linear_delay_sweep();
    s["base"]["time"]["T_final"] = 3.0;
    s["axes"][0]["steps"] = 6;
    const SweepSpec spec = parse_sweep_json(s);
    run_sweep(spec, scratch("sweep_p1"), 1);
    run_sweep(spec, scratch("sweep_p4"), 4);
    EXPECT_EQ(slurp(fs::temp_directory_path() / "cwave_test_sweep_p1" / "stability_map.csv"),
              slurp(fs::temp_directory_path() / "cwave_test_sweep_p4" / "stability_map.csv"));
}

TEST(Sweep, CertifiedPointsAreContainedInDecay) {
    json s = linear_delay_sweep();
    s["base"]["certificate"] = {{"method", "spectral"}};
    s["base"]["tau"] = 0.2;
    s["axes"] = {{{"path", "coefficients.a2"}, {"min", 0.0}, {"max", 1.5}, {"steps", 4}}};
    const SweepResult res = run_sweep(parse_sweep_json(s), scratch("sweep_cert"), 1);
    EXPECT_EQ(res.containment_violations, 0);
    int passes = 0;
    for (const auto& r : res.rows) {
        if (r.certificate == "pass") {
            ++passes;
            EXPECT_EQ(r.classification, "decay");
            EXPECT_GT(r.margin, 0.0);
        }
        EXPECT_NE(r.certificate, "none");
    }
    EXPECT_GE(passes, 1);
}

TEST(Sweep, SpecValidation) {
    json s = linear_delay_sweep();
    s["axes"][0]["steps"] = 1;
    EXPECT_THROW(parse_sweep_json(s), ConfigError);
    s = linear_delay_sweep();
    s["axes"][0]["path"] = "coefficients.a9";
    EXPECT_THROW(parse_sweep_json(s), ConfigError);
    s = linear_delay_sweep();
    s["axes"][0]["path"] = "mode";
    EXPECT_THROW(parse_sweep_json(s), ConfigError);
    s = linear_delay_sweep();
    s["axes"] = json::array();
    EXPECT_THROW(parse_sweep_json(s), ConfigError);
    s = linear_delay_sweep();
    s["axes"] = {s["axes"][0], s["axes"][0], s["axes"][0]};
    EXPECT_THROW(parse_sweep_json(s), ConfigError);
    s = linear_delay_sweep();
    s["base"]["grid"]["n_interior"] = -1;
    EXPECT_THROW(parse_sweep_json(s), ConfigError);
}

TEST(Sweep, ResolvePathIndexesArrays) {
    json doc = json::parse(R"({"a": {"pieces": [[0, 0.5, -0.1], [0.5, 1, 0.4]]}})");
    ASSERT_NE(resolve_path(doc, "a.pieces.1.2"), nullptr);
    EXPECT_DOUBLE_EQ(resolve_path(doc, "a.pieces.1.2")->get<double>(), 0.4);
    EXPECT_EQ(resolve_path(doc, "a.pieces.2.0"), nullptr);
    EXPECT_EQ(resolve_path(doc, "a.pieces.x"), nullptr);
    EXPECT_EQ(resolve_path(doc, "a..pieces"), nullptr);
}

// ---------------------------------------------------------------- CLI

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("cli");
    write(dir / "ok.json", small_linear(1.0).dump());
    json blow = small_linear(5.0);
    blow["mode"] = "indefinite";
    blow["coefficients"] = {{"a1", 0.0}, {"b", 0.0}, {"enforce_support", false}};
    blow["nonlinearity"] = {{"u", {{"kind", "odd_power"}, {"kappa", 1.0}, {"p", 5.0}}}};
    blow["initial"] = {{"u0", {{"kind", "sine"}, {"modes", {{1, 50.0}}}}}};
    write(dir / "blow.json", blow.dump());
    write(dir / "bad.json", "{\"grid\": ");

    EXPECT_EQ(run_cli("simulate --config " + (dir / "ok.json").string() + " --out " + (dir / "o1").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "o1" / "series.csv"));
    EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " + (dir / "o2").string()), 1);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "nope.json").string() + " --out " + (dir / "o3").string()), 1);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "blow.json").string() + " --out " + (dir / "o4").string()), 2);
    EXPECT_TRUE(fs::exists(dir / "o4" / "series.csv"));
    EXPECT_TRUE(fs::exists(dir / "o4" / "manifest.json"));
    EXPECT_EQ(run_cli("check --config " + (dir / "ok.json").string()), 0);
    EXPECT_EQ(run_cli("spectrum --config " + (dir / "ok.json").string() + " --out " + (dir / "o5").string()), 0);
    EXPECT_EQ(run_cli("fit --series " + (dir / "o1" / "series.csv").string() + " --window 0.2,1"), 0);
    EXPECT_EQ(run_cli("fit --series " + (dir / "o1" / "series.csv").string() + " --window 1"), 1);
    EXPECT_EQ(run_cli("fit --series " + (dir / "o1" / "series.csv").string() + " --window 0.99,1"), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "ok.json").string()), 1);

    json sw = linear_delay_sweep();
    sw["base"]["time"]["T_final"] = 1.0;
    sw["axes"][0]["steps"] = 2;
    write(dir / "sweep.json", sw.dump());
    EXPECT_EQ(run_cli("sweep --spec " + (dir / "sweep.json").string() + " --out " + (dir / "o6").string() +
                      " --parallel 2"),
              0);
    EXPECT_TRUE(fs::exists(dir / "o6" / "stability_map.csv"));
    EXPECT_EQ(run_cli("sweep --spec " + (dir / "sweep.json").string() + " --out " + (dir / "o7").string() +
                      " --parallel 0"),
              1);
}
