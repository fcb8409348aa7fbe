#ifndef FASTHZ_MONTECARLO_HPP
#define FASTHZ_MONTECARLO_HPP

// Monte Carlo outage estimators built directly on the Gaussian port
// construction. They share no code path with the analytic module beyond
// the parameter types, so they serve as its oracle.

#include <fasthz/analytic.hpp>
#include <fasthz/channel.hpp>
#include <fasthz/errors.hpp>
#include <fasthz/random.hpp>

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <thread>
#include <vector>

namespace fasthz {

struct MCSettings {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    double confidence = 0.99;
    unsigned workers = 1; // execution only; never changes the estimate

    bool operator==(const MCSettings&) const = default;

    void validate() const {
        if (trials < 10000) throw domain_error("MCSettings: at least 10^4 trials are required for a reported estimate");
        if (!(confidence > 0.0 && confidence < 1.0)) throw domain_error("MCSettings: confidence must lie in (0, 1)");
    }
};

enum class Method { analytic, mc };

struct OutageEstimate {
    double value = 0.0;
    double half_width = 0.0;
    Method method = Method::mc;
    std::uint64_t trials_used = 0;

    double lower() const { return std::max(0.0, value - half_width); }
    double upper() const { return std::min(1.0, value + half_width); }
};

/// Two-sided normal quantile for a confidence level, e.g. 0.99 -> 2.5758.
inline double confidence_z(double confidence) { return std::sqrt(2.0) * boost::math::erf_inv(confidence); }

/// Wald interval; an empty (or full) count falls back to the rule of three.
inline OutageEstimate make_estimate(std::uint64_t outages, std::uint64_t trials, double confidence) {
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(outages) / n;
    double hw = confidence_z(confidence) * std::sqrt(p * (1.0 - p) / n);
    if (outages == 0 || outages == trials) hw = 3.0 / n;
    return {p, hw, Method::mc, trials};
}

namespace detail {

// Draws one tube into `powers` (size = ports) and returns the largest S_k.
// Consumes 2*mu shared normals followed by 2*mu per port, port-major.
// Without `powers`, stops at the first port with scale * (base + S_k) >
// limit and returns that S_k: the trial is then decided as no outage, and
// its remaining draws would not change that.
inline double draw_tube(NormalStream& rng, int mu, int ports, double r, double* powers, double scale = 0.0,
                        double base = 0.0, double limit = std::numeric_limits<double>::infinity()) {
    constexpr double half_var = 0.70710678118654752440; // sqrt(1/2)
    const double own = std::sqrt(1.0 - r) * half_var;
    const double shared = std::sqrt(r) * half_var;
    thread_local std::vector<double> common;
    common.resize(2 * static_cast<std::size_t>(mu));
    for (auto& c : common) c = shared * rng.next();
    double best = 0.0;
    for (int k = 0; k < ports; ++k) {
        double s = 0.0;
        for (int j = 0; j < mu; ++j) {
            const double re = own * rng.next() + common[2 * j];
            const double im = own * rng.next() + common[2 * j + 1];
            s += re * re + im * im;
        }
        if (powers) powers[k] = s;
        else if (scale * (base + s) > limit) return s;
        best = std::max(best, s);
    }
    return best;
}

// Counts trials in [0, trials) for which `is_outage(trial)` holds, split
// into contiguous chunks across workers.
template <class Pred>
std::uint64_t count_outages(std::uint64_t trials, unsigned workers, Pred&& is_outage) {
    workers = std::max(1u, workers);
    if (workers == 1 || trials < 2 * workers) {
        std::uint64_t c = 0;
        for (std::uint64_t i = 0; i < trials; ++i) c += is_outage(i) ? 1 : 0;
        return c;
    }
    std::vector<std::uint64_t> counts(workers, 0);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = trials / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = w * chunk;
        const std::uint64_t end = (w + 1 == workers) ? trials : begin + chunk;
        pool.emplace_back([&, w, begin, end] {
            std::uint64_t c = 0;
            for (std::uint64_t i = begin; i < end; ++i) c += is_outage(i) ? 1 : 0;
            counts[w] = c;
        });
    }
    for (auto& t : pool) t.join();
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

inline void check_threshold(double gamma_bar, double gamma_th) {
    if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) throw domain_error("average SNR must be positive");
    if (!(gamma_th >= 0.0) || std::isnan(gamma_th)) throw domain_error("SNR threshold must be non-negative");
}

} // namespace detail

/// Per-port powers S_k = sum_j |h_kj|^2 of one trial (before beta_bar
/// scaling). Deterministic in (seed, trial_index).
inline std::vector<double> sample_ports(const AlphaMuParams& params, const PortLayout& layout,
                                        std::uint64_t trial_index, std::uint64_t seed) {
    std::vector<double> powers(static_cast<std::size_t>(layout.num_ports()));
    NormalStream rng(seed, trial_index);
    detail::draw_tube(rng, params.mu(), layout.num_ports(), layout.corr(), powers.data());
    return powers;
}

/// Best-port power of each of the M tubes in one trial. Tubes draw
/// consecutively from the trial's stream, each with fresh shared components.
inline std::vector<double> tube_maxima(const AlphaMuParams& params, const PortLayout& layout,
                                       const DiversityConfig& div, std::uint64_t trial_index, std::uint64_t seed) {
    const PortLayout tube = div.scheme == Scheme::none ? layout : div.tube_layout(layout);
    std::vector<double> best(static_cast<std::size_t>(div.order));
    NormalStream rng(seed, trial_index);
    for (auto& b : best) b = detail::draw_tube(rng, params.mu(), tube.num_ports(), tube.corr(), nullptr);
    return best;
}

/// Empirical Pr(gamma_bar * beta_bar * max_k S_k <= gamma_th).
inline OutageEstimate mc_op_fas(const AlphaMuParams& params, const PortLayout& layout, double gamma_bar,
                                double gamma_th, const MCSettings& mc) {
    mc.validate();
    detail::check_threshold(gamma_bar, gamma_th);
    const double scale = gamma_bar * params.beta_bar();
    const int mu = params.mu(), ports = layout.num_ports();
    const double r = layout.corr();
    const auto outages = detail::count_outages(mc.trials, mc.workers, [&](std::uint64_t trial) {
        NormalStream rng(mc.seed, trial);
        return scale * detail::draw_tube(rng, mu, ports, r, nullptr, scale, 0.0, gamma_th) <= gamma_th;
    });
    return make_estimate(outages, mc.trials, mc.confidence);
}

namespace detail {

enum class Combiner { select, sum };

inline OutageEstimate mc_diversity(const AlphaMuParams& params, const PortLayout& layout, const DiversityConfig& div,
                                   double gamma_bar, double gamma_th, const MCSettings& mc, Combiner how) {
    mc.validate();
    check_threshold(gamma_bar, gamma_th);
    const PortLayout tube = div.scheme == Scheme::none ? layout : div.tube_layout(layout);
    const double scale = gamma_bar * params.beta_bar();
    const int mu = params.mu(), ports = tube.num_ports(), order = div.order;
    const double r = tube.corr();
    const auto outages = count_outages(mc.trials, mc.workers, [&](std::uint64_t trial) {
        NormalStream rng(mc.seed, trial);
        double combined = 0.0;
        for (int m = 0; m < order; ++m) {
            const double base = how == Combiner::select ? 0.0 : combined;
            const double best = draw_tube(rng, mu, ports, r, nullptr, scale, base, gamma_th);
            combined = how == Combiner::select ? std::max(combined, best) : combined + best;
            if (scale * combined > gamma_th) return false;
        }
        return scale * combined <= gamma_th;
    });
    return make_estimate(outages, mc.trials, mc.confidence);
}

} // namespace detail

/// SC-FAS: outage iff the best tube's best port is in outage.
inline OutageEstimate mc_op_sc(const AlphaMuParams& params, const PortLayout& layout, const DiversityConfig& div,
                               double gamma_bar, double gamma_th, const MCSettings& mc) {
    if (div.scheme == Scheme::mgc) throw config_error("mc_op_sc: diversity scheme is mgc");
    div.validate(layout.num_ports());
    return detail::mc_diversity(params, layout, div, gamma_bar, gamma_th, mc, detail::Combiner::select);
}

/// MGC-FAS: outage iff the unweighted sum of the tubes' best SNRs is in outage.
inline OutageEstimate mc_op_mgc(const AlphaMuParams& params, const PortLayout& layout, const DiversityConfig& div,
                                double gamma_bar, double gamma_th, const MCSettings& mc) {
    if (div.scheme == Scheme::sc) throw config_error("mc_op_mgc: diversity scheme is sc");
    div.validate(layout.num_ports());
    return detail::mc_diversity(params, layout, div, gamma_bar, gamma_th, mc, detail::Combiner::sum);
}

/// Monte Carlo outage for a scenario, dispatching on its diversity scheme.
inline OutageEstimate op_monte_carlo(const OutageScenario& s, const MCSettings& mc) {
    const auto params = s.params();
    const auto layout = s.layout();
    const double th = s.effective_threshold();
    switch (s.diversity.scheme) {
    case Scheme::none: return mc_op_fas(params, layout, s.gamma_bar, th, mc);
    case Scheme::sc: return mc_op_sc(params, layout, s.diversity, s.gamma_bar, th, mc);
    case Scheme::mgc: return mc_op_mgc(params, layout, s.diversity, s.gamma_bar, th, mc);
    }
    throw config_error("unknown diversity scheme");
}

} // namespace fasthz

#endif // FASTHZ_MONTECARLO_HPP
