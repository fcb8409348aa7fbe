#ifndef FASTHZ_CHANNEL_HPP
#define FASTHZ_CHANNEL_HPP

// Fluid-antenna port geometry and the equally-correlated alpha-mu channel.
//
// Port k carries S_k = sum_{j=1}^{mu} |h_kj|^2 with
//   h_kj = sqrt(1-r) (X_kj + i Y_kj) + sqrt(r) (X_0j + i Y_0j),
// all X, Y ~ N(0, 1/2). Conditioned on the shared power
// U = sum_j (X_0j^2 + Y_0j^2) ~ Gamma(mu, 1) the ports are independent and
// 2 S_k / (1-r) is non-central chi-square with 2 mu degrees of freedom and
// non-centrality 2 r U / (1-r). The envelope is H_k = (beta_bar S_k)^{1/alpha}.

#include <fasthz/errors.hpp>
#include <fasthz/specfun.hpp>

#include <boost/math/constants/constants.hpp>

#include <cmath>

namespace fasthz {

struct CorrelationResult {
    double value;  // r after clamping to [0, 1]
    double raw;    // the finite sum before clamping
    bool clamped;  // raw < 0
};

/// Equal pairwise correlation of L ports spread over W wavelengths:
///   r = 2/(L(L-1)) sum_{k=1}^{L-1} (L-k) J0(2 pi k W / (L-1)).
/// Negative sums are clamped to 0.
inline CorrelationResult port_correlation(int num_ports, double size_coeff) {
    if (num_ports < 2) throw domain_error("port_correlation: needs at least two ports");
    if (!(size_coeff > 0.0) || !std::isfinite(size_coeff))
        throw domain_error("port_correlation: size coefficient must be positive");
    const double L = num_ports;
    const double two_pi = boost::math::constants::two_pi<double>();
    double sum = 0.0;
    for (int k = 1; k < num_ports; ++k)
        sum += (L - k) * bessel_j0(two_pi * k * size_coeff / (L - 1.0));
    const double raw = 2.0 / (L * (L - 1.0)) * sum;
    if (raw < 0.0) return {0.0, raw, true};
    return {raw > 1.0 ? 1.0 : raw, raw, false};
}

/// Port count, physical size (in wavelengths) and the derived correlation.
/// A single port has r = 1 by convention.
class PortLayout {
public:
    PortLayout(int num_ports, double size_coeff) : num_ports_(num_ports), size_coeff_(size_coeff) {
        if (num_ports < 1) throw domain_error("PortLayout: num_ports must be >= 1");
        if (!(size_coeff > 0.0) || !std::isfinite(size_coeff))
            throw domain_error("PortLayout: size_coeff must be positive");
        if (num_ports == 1) {
            corr_ = {1.0, 1.0, false};
        } else {
            corr_ = port_correlation(num_ports, size_coeff);
        }
    }

    /// Layout with an explicitly imposed correlation, bypassing the geometry.
    static PortLayout with_correlation(int num_ports, double size_coeff, double r) {
        if (!(r >= 0.0 && r <= 1.0)) throw domain_error("PortLayout: correlation must lie in [0, 1]");
        PortLayout layout(1, size_coeff);
        if (num_ports < 1) throw domain_error("PortLayout: num_ports must be >= 1");
        layout.num_ports_ = num_ports;
        layout.corr_ = {r, r, false};
        return layout;
    }

    int num_ports() const noexcept { return num_ports_; }
    double size_coeff() const noexcept { return size_coeff_; }
    double corr() const noexcept { return corr_.value; }
    double raw_corr() const noexcept { return corr_.raw; }
    bool clamped() const noexcept { return corr_.clamped; }

private:
    int num_ports_;
    double size_coeff_;
    CorrelationResult corr_{};
};

/// alpha-mu fading law. beta is the alpha-root mean value
/// (E[H^alpha])^{1/alpha}; beta_bar = beta^alpha / mu scales the Gamma(mu, 1)
/// power S into H^alpha = beta_bar * S.
class AlphaMuParams {
public:
    AlphaMuParams(double alpha, int mu, double beta) : alpha_(alpha), mu_(mu), beta_(beta) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw domain_error("AlphaMuParams: alpha must be positive");
        if (mu < 1) throw domain_error("AlphaMuParams: mu must be a positive integer");
        if (!(beta > 0.0) || !std::isfinite(beta)) throw domain_error("AlphaMuParams: beta must be positive");
        beta_bar_ = std::pow(beta, alpha) / mu;
    }

    /// beta^alpha = mu, so beta_bar = 1 and E[H^alpha] = mu.
    static AlphaMuParams normalized(double alpha, int mu) {
        if (!(alpha > 0.0)) throw domain_error("AlphaMuParams: alpha must be positive");
        if (mu < 1) throw domain_error("AlphaMuParams: mu must be a positive integer");
        AlphaMuParams p(alpha, mu, std::pow(static_cast<double>(mu), 1.0 / alpha));
        p.beta_bar_ = 1.0;
        return p;
    }

    double alpha() const noexcept { return alpha_; }
    int mu() const noexcept { return mu_; }
    double beta() const noexcept { return beta_; }
    double beta_bar() const noexcept { return beta_bar_; }

private:
    double alpha_;
    int mu_;
    double beta_;
    double beta_bar_;
};

/// Marginal envelope CDF F_H(x) = P(mu, x^alpha mu / beta^alpha).
inline double marginal_cdf(const AlphaMuParams& params, double x) {
    if (!(x >= 0.0)) throw domain_error("marginal_cdf: x must be non-negative");
    if (x == 0.0) return 0.0;
    return reg_gamma_lower(params.mu(), std::pow(x, params.alpha()) / params.beta_bar());
}

/// Density of the shared power U ~ Gamma(mu, 1).
inline double mixing_density(int mu, double u) {
    if (mu < 1) throw domain_error("mixing_density: mu must be a positive integer");
    if (u < 0.0) return 0.0;
    if (u == 0.0) return mu == 1 ? 1.0 : 0.0;
    return std::exp((mu - 1) * std::log(u) - u - log_gamma(mu));
}

/// Pr(S_k <= t | U = u) = 1 - Q_mu( sqrt(2 r u/(1-r)), sqrt(2 t/(1-r)) ),
/// computed directly as a non-central chi-square CDF so small values keep
/// their relative accuracy.
inline double conditional_port_cdf(const AlphaMuParams& params, const PortLayout& layout, double u, double t,
                                   const Accuracy& acc = {}) {
    if (!(u >= 0.0)) throw domain_error("conditional_port_cdf: u must be non-negative");
    if (!(t >= 0.0)) throw domain_error("conditional_port_cdf: t must be non-negative");
    const double r = layout.corr();
    if (r >= 1.0) throw degenerate_correlation_error("conditional_port_cdf: r = 1, all ports coincide");
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return 1.0;
    const double scale = 1.0 - r;
    return ncx2_cdf(2 * params.mu(), 2.0 * r * u / scale, 2.0 * t / scale, acc);
}

} // namespace fasthz

#endif // FASTHZ_CHANNEL_HPP
