#ifndef FASTHZ_CLI_HPP
#define FASTHZ_CLI_HPP

// Subcommands of the fas-thz tool. Each renders a complete CSV document
// (comment header, column row, data rows) from a validated configuration;
// rows are always written in grid order.

#include <fasthz/analytic.hpp>
#include <fasthz/config.hpp>
#include <fasthz/montecarlo.hpp>
#include <fasthz/propagation.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fasthz::cli {

inline constexpr const char* tool_version = "0.1.0";

enum class Subcommand { op_curve, rate_sweep, mc_validate, corr, link_budget };

inline const char* to_string(Subcommand s) {
    switch (s) {
    case Subcommand::op_curve: return "op-curve";
    case Subcommand::rate_sweep: return "rate-sweep";
    case Subcommand::mc_validate: return "mc-validate";
    case Subcommand::corr: return "corr";
    case Subcommand::link_budget: return "link-budget";
    }
    return "?";
}

inline Subcommand parse_subcommand(const std::string& name) {
    for (auto s : {Subcommand::op_curve, Subcommand::rate_sweep, Subcommand::mc_validate, Subcommand::corr,
                   Subcommand::link_budget})
        if (name == to_string(s)) return s;
    throw config_error("unknown subcommand '" + name + "'");
}

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> workers;
};

inline void apply(const Overrides& o, ExperimentConfig& c) {
    if (o.out) c.output_path = *o.out;
    if (o.seed) c.mc.seed = *o.seed;
    if (o.trials) c.mc.trials = *o.trials;
    if (o.workers) c.mc.workers = *o.workers;
    try {
        c.mc.validate();
    } catch (const domain_error& e) {
        throw config_error(std::string("command line: ") + e.what());
    }
}

/// Column sets, a pure function of the subcommand.
inline std::vector<std::string> columns(Subcommand s) {
    switch (s) {
    case Subcommand::op_curve:
    case Subcommand::rate_sweep:
        return {"sweep_value", "op_analytic", "op_mc", "mc_half_width", "method",
                "r_used", "gamma_bar_db", "gamma_th_db", "error"};
    case Subcommand::mc_validate:
        return {"sweep_value", "op_analytic", "op_mc", "mc_half_width", "method",
                "r_used", "gamma_bar_db", "gamma_th_db", "agree", "error"};
    case Subcommand::corr: return {"num_ports", "size_wavelengths", "r", "r_raw", "clamped"};
    case Subcommand::link_budget: return {"quantity", "value", "unit"};
    }
    return {};
}

namespace detail {

inline std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + field(cells[i]);
    return line + "\n";
}

inline std::string header(Subcommand s, const ExperimentConfig& c, const std::vector<std::string>& notes) {
    std::string h = std::string("# fas-thz ") + tool_version + "\n";
    h += std::string("# subcommand: ") + to_string(s) + "\n";
    h += "# config: " + to_json(c).dump() + "\n";
    for (const auto& n : notes) h += "# warning: " + n + "\n";
    return h + join(columns(s));
}

// Runs body(i) for i in [0, n) on up to `workers` threads.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

struct Row {
    double sweep_value = std::nan("");
    double op_analytic = std::nan("");
    double op_mc = std::nan("");
    double half_width = std::nan("");
    std::string method;
    double r_used = std::nan("");
    double gamma_bar_db = std::nan("");
    double gamma_th_db = std::nan("");
    std::string agree;
    std::string error;
    std::string warning;
};

inline void evaluate_row(Row& row, const OutageScenario& s, bool want_mc, const MCSettings& mc) {
    const PortLayout full = s.layout();
    const PortLayout used = s.diversity.scheme == Scheme::none ? full : s.diversity.tube_layout(full);
    row.r_used = used.corr();
    if (used.clamped()) row.warning = "port correlation clamped to 0 (raw " + num(used.raw_corr()) + ")";
    row.gamma_bar_db = units::linear_to_db(s.gamma_bar);
    row.gamma_th_db = units::linear_to_db(s.effective_threshold());

    const bool analytic = s.diversity.scheme != Scheme::mgc;
    row.method = analytic ? "analytic" : "mc";
    if (analytic) row.op_analytic = op_analytic(s);
    if (want_mc || !analytic) {
        const auto est = op_monte_carlo(s, mc);
        row.op_mc = est.value;
        row.half_width = est.half_width;
    }
    if (want_mc && analytic)
        row.agree = std::abs(row.op_analytic - row.op_mc) <= 3.0 * row.half_width ? "true" : "false";
}

inline std::string render_sweep(Subcommand sub, const ExperimentConfig& c) {
    if (sub == Subcommand::rate_sweep && c.sweep.axis != ConfigAxis::rate_gbps)
        throw config_error("rate-sweep needs sweep.axis = \"rate_gbps\"");
    const bool want_mc = sub == Subcommand::mc_validate;
    const OutageScenario base = c.scenario();
    const auto axis = c.sweep.core_axis();
    const auto grid = c.sweep.core_grid();
    std::vector<Row> rows(grid.size());

    auto point = [&](std::size_t i, const MCSettings& mc) {
        Row& row = rows[i];
        row.sweep_value = c.sweep.grid[i];
        try {
            evaluate_row(row, base.with(axis, grid[i]), want_mc, mc);
        } catch (const std::exception& e) {
            row.op_analytic = row.op_mc = row.half_width = std::nan("");
            row.agree.clear();
            row.error = "grid[" + std::to_string(i) + "]=" + num(c.sweep.grid[i]) + ": " + e.what();
        }
    };
    // Sampling points parallelize over trials, analytic points over the grid.
    if (want_mc || base.diversity.scheme == Scheme::mgc) {
        for (std::size_t i = 0; i < grid.size(); ++i) point(i, c.mc);
    } else {
        parallel_for(grid.size(), c.mc.workers, [&](std::size_t i) { point(i, c.mc); });
    }

    std::vector<std::string> notes;
    for (const auto& r : rows)
        if (!r.warning.empty()) notes.push_back("sweep_value=" + num(r.sweep_value) + ": " + r.warning);
    std::string out = header(sub, c, notes);
    for (const auto& r : rows) {
        std::vector<std::string> cells{num(r.sweep_value), num(r.op_analytic), num(r.op_mc), num(r.half_width),
                                       r.method, num(r.r_used), num(r.gamma_bar_db), num(r.gamma_th_db)};
        if (want_mc) cells.push_back(r.agree);
        cells.push_back(r.error);
        out += join(cells);
    }
    return out;
}

inline std::string render_corr(const ExperimentConfig& c) {
    const auto ports = c.corr.ports.empty() ? std::vector<int>{c.layout.num_ports} : c.corr.ports;
    const auto sizes =
        c.corr.size_wavelengths.empty() ? std::vector<double>{c.layout.size_wavelengths} : c.corr.size_wavelengths;
    std::vector<std::string> notes;
    std::string body;
    for (int L : ports)
        for (double W : sizes) {
            const PortLayout layout(L, W);
            if (layout.clamped())
                notes.push_back("L=" + std::to_string(L) + " W=" + num(W) + ": port correlation clamped to 0 (raw " +
                                num(layout.raw_corr()) + ")");
            body += join({std::to_string(L), num(W), num(layout.corr()), num(layout.raw_corr()),
                          layout.clamped() ? "true" : "false"});
        }
    return header(Subcommand::corr, c, notes) + body;
}

inline std::string render_link_budget(const ExperimentConfig& c) {
    const ThzLink link = c.thz_link();
    const double d3 = link.distance_3d();
    const double pi = boost::math::constants::pi<double>();
    const double spreading_db =
        units::linear_to_db(16.0 * pi * pi * link.freq_hz * link.freq_hz * d3 * d3 / (units::speed_of_light * units::speed_of_light));
    const double absorption_db = units::linear_to_db(std::exp(link.absorb_coeff * d3));
    const double p = received_power(link);
    const double snr = average_snr(link);
    const double gbar = c.gamma_bar();
    const double gth = c.gamma_th();
    std::string out = header(Subcommand::link_budget, c, {});
    auto row = [&](const char* q, double v, const char* unit) { out += join({q, num(v), unit}); };
    row("tx_power", link.tx_power_w, "W");
    row("tx_power", c.link.tx_power_dbm, "dBm");
    row("tx_gain", c.link.tx_gain_dbi, "dBi");
    row("rx_gain", c.link.rx_gain_dbi, "dBi");
    row("frequency", link.freq_hz, "Hz");
    row("distance_3d", d3, "m");
    row("spreading_loss", spreading_db, "dB");
    row("absorption_loss", absorption_db, "dB");
    row("received_power", p, "W");
    row("received_power", units::watts_to_dbm(p), "dBm");
    row("noise_power", link.noise_power_w, "W");
    row("noise_power", units::watts_to_dbm(link.noise_power_w), "dBm");
    row("link_snr", snr, "linear");
    row("link_snr", units::linear_to_db(snr), "dB");
    row("gamma_bar", gbar, "linear");
    row("gamma_bar", units::linear_to_db(gbar), "dB");
    row("gamma_th", gth, "linear");
    row("gamma_th", units::linear_to_db(gth), "dB");
    if (c.query.envelope_threshold) {
        const double eff = std::pow(gth, c.channel.alpha);
        row("gamma_th_effective", eff, "linear");
        row("gamma_th_effective", units::linear_to_db(eff), "dB");
    }
    return out;
}

} // namespace detail

/// Full CSV document for a subcommand.
inline std::string render(Subcommand s, const ExperimentConfig& c) {
    switch (s) {
    case Subcommand::op_curve:
    case Subcommand::rate_sweep:
    case Subcommand::mc_validate: return detail::render_sweep(s, c);
    case Subcommand::corr: return detail::render_corr(c);
    case Subcommand::link_budget: return detail::render_link_budget(c);
    }
    throw config_error("unknown subcommand");
}

/// Loads the config, applies overrides, renders and writes the CSV to the
/// output path (stdout when none). Returns the process exit status:
/// 0 success, 2 configuration error, 1 any other failure.
inline int run(Subcommand s, const std::string& config_path, const Overrides& o, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    try {
        ExperimentConfig c = load_config(config_path);
        apply(o, c);
        const std::string csv = render(s, c);
        if (c.output_path) {
            std::ofstream f(*c.output_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open output file " + *c.output_path);
            f << csv;
            if (!f) throw std::runtime_error("failed writing " + *c.output_path);
        } else {
            out << csv << std::flush;
        }
        return 0;
    } catch (const config_error& e) {
        err << "fas-thz: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "fas-thz: " << e.what() << "\n";
        return 1;
    }
}

} // namespace fasthz::cli

#endif // FASTHZ_CLI_HPP
