// Command-line front end. Exit codes: 0 success, 1 configuration error,
// 2 numerical divergence (partial output written), 3 internal error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cwave/harness.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, diverged = 2, internal_error = 3 };

std::pair<double, double> parse_window(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw cwave::ConfigError("--window: expected t_lo,t_hi");
    try {
        std::size_t used = 0;
        const double lo = std::stod(text.substr(0, comma), &used);
        const double hi = std::stod(text.substr(comma + 1));
        if (!(hi > lo)) throw cwave::ConfigError("--window: need t_lo < t_hi");
        return {lo, hi};
    } catch (const std::invalid_argument&) {
        throw cwave::ConfigError("--window: expected t_lo,t_hi");
    } catch (const std::out_of_range&) {
        throw cwave::ConfigError("--window: value out of range");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cwave: coupled damped wave simulator and stability checks"};
    app.require_subcommand(1);

    std::string config, out, series, window, column, spec;
    int parallel = 1;

    auto* sim = app.add_subcommand("simulate", "integrate a configuration and write series.csv + manifest.json");
    sim->add_option("--config", config, "run configuration (JSON)")->required();
    sim->add_option("--out", out, "output directory")->required();

    auto* chk = app.add_subcommand("check", "print semigroup constants and the stability certificate");
    chk->add_option("--config", config, "run configuration (JSON)")->required();

    auto* spc = app.add_subcommand("spectrum", "eigenvalues of the reference generator");
    spc->add_option("--config", config, "run configuration (JSON)")->required();
    spc->add_option("--out", out, "output directory")->required();

    auto* fit = app.add_subcommand("fit", "exponential rate of a series column");
    fit->add_option("--series", series, "series CSV")->required();
    fit->add_option("--window", window, "t_lo,t_hi")->required();
    fit->add_option("--column", column, "column to fit (default norm_H)");

    auto* swp = app.add_subcommand("sweep", "parameter sweep into stability_map.csv");
    swp->add_option("--spec", spec, "sweep specification (JSON)")->required();
    swp->add_option("--out", out, "output directory")->required();
    swp->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (*sim) {
            const auto cfg = cwave::parse_config_file(config);
            const auto res = cwave::run_simulate(cfg, out);
            if (res.summary.status == cwave::IntegrationSummary::Status::diverged) {
                std::cerr << "diverged at t=" << *res.summary.blowup_time << "; partial series written\n";
                return diverged;
            }
            std::cout << res.manifest["fit"].dump() << "\n";
        } else if (*chk) {
            const auto cfg = cwave::parse_config_file(config);
            std::cout << cwave::run_check(cfg).dump(2) << "\n";
        } else if (*spc) {
            const auto cfg = cwave::parse_config_file(config);
            const auto j = cwave::run_spectrum(cfg, out);
            std::cout << "abscissa " << cwave::format_double(j["abscissa"].get<double>()) << "\n";
        } else if (*fit) {
            const auto w = parse_window(window);
            const auto j = cwave::run_fit(series, w, column.empty() ? std::nullopt : std::optional(column));
            std::cout << j.dump(2) << "\n";
        } else if (*swp) {
            const auto s = cwave::parse_sweep_file(spec);
            const auto res = cwave::run_sweep(s, out, parallel);
            std::cout << res.rows.size() << " points, " << res.containment_violations
                      << " containment violations\n";
        }
    } catch (const cwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const cwave::HypothesisViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const cwave::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal_error;
    }
    return ok;
}
