#ifndef FASTHZ_CALIBRATION_HPP
#define FASTHZ_CALIBRATION_HPP

// Recovering the (average SNR, threshold) pair behind a reported outage
// point. Outage depends on them only through t = gamma_th / gamma_bar, so a
// single reported point pins t, and two points taken at different alpha
// pin both scalars once the threshold is read in the envelope domain
// (t(alpha) = x^alpha / gamma_bar).

#include <fasthz/errors.hpp>

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <utility>

namespace fasthz {

/// Solves op(t) = target for t on [lo, hi], op nondecreasing in t.
/// The search runs on log t against log op.
template <class OpOfRatio>
double solve_threshold_ratio(OpOfRatio&& op, double target, double lo = 1e-6, double hi = 1e3) {
    if (!(target > 0.0 && target < 1.0)) throw domain_error("solve_threshold_ratio: target must lie in (0, 1)");
    const double log_target = std::log(target);
    auto f = [&](double log_t) {
        const double p = op(std::exp(log_t));
        return (p > 0.0 ? std::log(p) : -745.0) - log_target;
    };
    double a = std::log(lo), b = std::log(hi);
    double fa = f(a), fb = f(b);
    if (fa > 0.0 || fb < 0.0) throw domain_error("solve_threshold_ratio: target not bracketed by [lo, hi]");
    std::uintmax_t iters = 200;
    const auto [x0, x1] = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                             boost::math::tools::eps_tolerance<double>(50), iters);
    return std::exp(0.5 * (x0 + x1));
}

/// Envelope-domain calibration: t(alpha) = envelope_threshold^alpha / gamma_bar.
struct TwoPointCalibration {
    double gamma_bar;
    double envelope_threshold;

    double gamma_th(double alpha) const { return std::pow(envelope_threshold, alpha); }
    double ratio(double alpha) const { return gamma_th(alpha) / gamma_bar; }
};

/// Fits (gamma_bar, x) to two threshold ratios observed at alpha1 != alpha2.
inline TwoPointCalibration fit_two_point(double alpha1, double t1, double alpha2, double t2) {
    if (!(t1 > 0.0 && t2 > 0.0)) throw domain_error("fit_two_point: ratios must be positive");
    if (alpha1 == alpha2) throw domain_error("fit_two_point: needs two distinct alpha values");
    const double log_x = (std::log(t2) - std::log(t1)) / (alpha2 - alpha1);
    const double log_gbar = alpha1 * log_x - std::log(t1);
    return {std::exp(log_gbar), std::exp(log_x)};
}

} // namespace fasthz

#endif // FASTHZ_CALIBRATION_HPP
