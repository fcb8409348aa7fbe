#ifndef FASTHZ_ANALYTIC_HPP
#define FASTHZ_ANALYTIC_HPP

// Outage probability of the non-diversity FAS receiver and of M-order
// selection combining over independent sub-tubes.
//
// The outage event is gamma_bar * H^alpha <= gamma_th on every port, i.e.
// S_k <= t with t = gamma_th / (gamma_bar * beta_bar). Integrating the
// conditionally independent ports over the shared power U gives
//
//   OP = E_U[ Pr(S <= t | U)^L ],   U ~ Gamma(mu, 1),
//
// evaluated with generalized Gauss-Laguerre rules whose weight is exactly
// the Gamma(mu, 1) density.

#include <fasthz/channel.hpp>
#include <fasthz/errors.hpp>
#include <fasthz/propagation.hpp>
#include <fasthz/quadrature.hpp>
#include <fasthz/specfun.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace fasthz {

enum class Scheme { none, sc, mgc };

inline const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::none: return "none";
    case Scheme::sc: return "sc";
    case Scheme::mgc: return "mgc";
    }
    return "?";
}

struct DiversityConfig {
    Scheme scheme = Scheme::none;
    int order = 1;

    static DiversityConfig none() { return {}; }
    static DiversityConfig sc(int m) { return {Scheme::sc, m}; }
    static DiversityConfig mgc(int m) { return {Scheme::mgc, m}; }

    bool operator==(const DiversityConfig&) const = default;

    void validate(int num_ports) const {
        if (scheme == Scheme::none) {
            if (order != 1) throw config_error("diversity: scheme 'none' requires order 1");
            return;
        }
        if (order < 2) throw config_error("diversity: sc/mgc require order >= 2");
        if (num_ports % order != 0)
            throw config_error("diversity: order " + std::to_string(order) + " does not divide " +
                               std::to_string(num_ports) + " ports");
    }

    /// One sub-tube: L/M ports over W/M wavelengths.
    PortLayout tube_layout(const PortLayout& full) const {
        validate(full.num_ports());
        return PortLayout(full.num_ports() / order, full.size_coeff() / order);
    }
};

struct QuadratureSpec {
    std::size_t nodes = 64;
    double rel_tol = 1e-10;
    // Floor for outages far below anything reportable, where the relative
    // test would need thousands of nodes.
    double abs_tol = 1e-15;
    int max_doublings = 4;

    bool operator==(const QuadratureSpec&) const = default;

    void validate() const {
        if (nodes < 16) throw domain_error("QuadratureSpec: nodes must be >= 16");
        if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw domain_error("QuadratureSpec: rel_tol must lie in (0, 1e-4]");
        if (!(abs_tol >= 0.0 && abs_tol <= 1e-6)) throw domain_error("QuadratureSpec: abs_tol must lie in [0, 1e-6]");
        if (max_doublings < 1) throw domain_error("QuadratureSpec: max_doublings must be positive");
    }
};

namespace detail {

inline double threshold_ratio(const AlphaMuParams& params, double gamma_bar, double gamma_th) {
    if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) throw domain_error("average SNR must be positive");
    if (!(gamma_th >= 0.0) || std::isnan(gamma_th)) throw domain_error("SNR threshold must be non-negative");
    return gamma_th / gamma_bar / params.beta_bar();
}

// p^L without underflowing through repeated multiplication.
inline double power_of_probability(double p, int exponent) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return std::exp(exponent * std::log(p));
}

// E_U[ F(t | U)^L ] at a fixed threshold ratio t.
inline double selection_mixture(const AlphaMuParams& params, const PortLayout& layout, double t,
                                const QuadratureSpec& quad, const Accuracy& acc) {
    const int mu = params.mu();
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return 1.0;
    if (layout.num_ports() == 1 && layout.corr() >= 1.0) return reg_gamma_lower(mu, t);
    if (layout.corr() >= 1.0) throw degenerate_correlation_error("op_fas: r = 1 with more than one port");

    const int L = layout.num_ports();
    auto integrand = [&](double u) {
        return power_of_probability(conditional_port_cdf(params, layout, u, t, acc), L);
    };
    std::size_t n = quad.nodes;
    double prev = gamma_expectation(integrand, n, mu);
    for (int k = 0; k < quad.max_doublings; ++k) {
        n *= 2;
        const double cur = gamma_expectation(integrand, n, mu);
        if (std::abs(cur - prev) <= std::max(quad.rel_tol * std::abs(cur), quad.abs_tol) || (cur == 0.0 && prev == 0.0))
            return std::clamp(cur, 0.0, 1.0);
        prev = cur;
        if (k + 1 == quad.max_doublings)
            throw accuracy_error("op_fas: quadrature did not converge after " + std::to_string(quad.max_doublings) +
                                     " doublings",
                                 cur, prev);
    }
    return std::clamp(prev, 0.0, 1.0);
}

} // namespace detail

/// Outage probability of an L-port FAS receiver selecting the best port.
inline double op_fas(const AlphaMuParams& params, const PortLayout& layout, double gamma_bar, double gamma_th,
                     const QuadratureSpec& quad = {}, const Accuracy& acc = {}) {
    quad.validate();
    const double t = detail::threshold_ratio(params, gamma_bar, gamma_th);
    return detail::selection_mixture(params, layout, t, quad, acc);
}

/// M-order selection combining: M independent tubes, each L/M ports over
/// W/M wavelengths; outage iff every tube is in outage.
inline double op_sc_fas(const AlphaMuParams& params, const PortLayout& layout, const DiversityConfig& div,
                        double gamma_bar, double gamma_th, const QuadratureSpec& quad = {},
                        const Accuracy& acc = {}) {
    if (div.scheme == Scheme::mgc) throw config_error("op_sc_fas: MGC has no analytic evaluation; use mc_op_mgc");
    if (div.scheme == Scheme::none) {
        div.validate(layout.num_ports());
        return op_fas(params, layout, gamma_bar, gamma_th, quad, acc);
    }
    const PortLayout tube = div.tube_layout(layout);
    const double per_tube = op_fas(params, tube, gamma_bar, gamma_th, quad, acc);
    return detail::power_of_probability(per_tube, div.order);
}

// ---------------------------------------------------------------------------
// Curves

enum class SweepAxis { ports, rate, snr, alpha, mu, W };

inline const char* to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::ports: return "ports";
    case SweepAxis::rate: return "rate";
    case SweepAxis::snr: return "snr";
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::mu: return "mu";
    case SweepAxis::W: return "W";
    }
    return "?";
}

/// Everything an outage evaluation needs, in linear units.
struct OutageScenario {
    double alpha = 2.0;
    int mu = 1;
    double beta = 0.0; // <= 0 selects the beta^alpha = mu normalization
    int num_ports = 50;
    double size_coeff = 1.0;
    DiversityConfig diversity{};
    double gamma_bar = 1.0;
    double gamma_th = 1.0;
    double bandwidth_hz = 10e9; // used by the rate axis
    /// Treat gamma_th as an envelope-domain threshold x and test against x^alpha.
    bool alpha_scaled_threshold = false;
    QuadratureSpec quad{};

    AlphaMuParams params() const {
        return beta > 0.0 ? AlphaMuParams(alpha, mu, beta) : AlphaMuParams::normalized(alpha, mu);
    }
    PortLayout layout() const { return PortLayout(num_ports, size_coeff); }
    double effective_threshold() const { return alpha_scaled_threshold ? std::pow(gamma_th, alpha) : gamma_th; }

    /// Copy with one axis replaced. Grid units: ports/mu as counts, rate in
    /// bit/s, snr as average SNR in dB, alpha and W as-is.
    OutageScenario with(SweepAxis axis, double value) const {
        OutageScenario s = *this;
        auto as_int = [&](const char* what) {
            const double r = std::round(value);
            if (r < 1.0 || std::abs(r - value) > 1e-9)
                throw domain_error(std::string(what) + " grid values must be positive integers");
            return static_cast<int>(r);
        };
        switch (axis) {
        case SweepAxis::ports: s.num_ports = as_int("ports"); break;
        case SweepAxis::rate: s.gamma_th = rate_to_snr_threshold(value, bandwidth_hz); break;
        case SweepAxis::snr: s.gamma_bar = units::db_to_linear(value); break;
        case SweepAxis::alpha: s.alpha = value; break;
        case SweepAxis::mu: s.mu = as_int("mu"); break;
        case SweepAxis::W: s.size_coeff = value; break;
        }
        return s;
    }
};

/// Analytic outage for a scenario (none or sc).
inline double op_analytic(const OutageScenario& s, const Accuracy& acc = {}) {
    const auto params = s.params();
    const auto layout = s.layout();
    return op_sc_fas(params, layout, s.diversity, s.gamma_bar, s.effective_threshold(), s.quad, acc);
}

struct CurvePoint {
    double grid_value;
    double probability; // NaN when `error` is set
    std::string error;
};

/// Runs `eval(scenario_at_point)` over the grid, optionally on several
/// threads. Output order follows the grid; a failing point records its
/// message instead of aborting the curve.
template <class Eval>
std::vector<CurvePoint> sweep(SweepAxis axis, const std::vector<double>& grid, const OutageScenario& fixed,
                              Eval&& eval, unsigned workers = 1) {
    if (grid.empty()) throw domain_error("op_curve: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw domain_error("op_curve: grid must be strictly increasing");

    std::vector<CurvePoint> out(grid.size());
    auto run_point = [&](std::size_t i) {
        out[i].grid_value = grid[i];
        try {
            out[i].probability = eval(fixed.with(axis, grid[i]));
        } catch (const std::exception& e) {
            out[i].probability = std::nan("");
            char value[32];
            std::snprintf(value, sizeof value, "%.17g", grid[i]);
            out[i].error = "grid[" + std::to_string(i) + "]=" + value + ": " + e.what();
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(grid.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < grid.size(); i = next++) run_point(i);
        });
    for (auto& t : pool) t.join();
    return out;
}

/// Analytic outage curve along one axis.
inline std::vector<CurvePoint> op_curve(SweepAxis axis, const std::vector<double>& grid, const OutageScenario& fixed,
                                        unsigned workers = 1) {
    return sweep(axis, grid, fixed, [](const OutageScenario& s) { return op_analytic(s); }, workers);
}

} // namespace fasthz

#endif // FASTHZ_ANALYTIC_HPP
