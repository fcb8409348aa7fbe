#ifndef FASTHZ_SPECFUN_HPP
#define FASTHZ_SPECFUN_HPP

// Special-function kernels: Bessel J0, log-gamma, regularized incomplete
// gamma, generalized Marcum-Q of integer order and the non-central
// chi-square CDF.
//
// The elementary functions delegate to Boost.Math. The Marcum-Q /
// non-central chi-square evaluation is a Poisson mixture of central gamma
// terms:
//
//   Q_mu(a, b)        = sum_k Pois(k; a^2/2) * Q(mu + k, b^2/2)
//   1 - Q_mu(a, b)    = sum_k Pois(k; a^2/2) * P(mu + k, b^2/2)
//
// Whichever of the two sums is the smaller tail is summed directly, the
// other is obtained by complement, so both small CDF values and small
// survival values keep their relative accuracy. Weights and gamma terms are
// carried in log space; non-centralities far beyond a^2/2 = 700 are fine.

#include <fasthz/errors.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace fasthz {

/// Truncation control shared by the series kernels.
struct Accuracy {
    double rel_tol = 1e-12;
    std::size_t max_terms = 100000;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
            throw domain_error("Accuracy: rel_tol must lie in (0, 1e-3]");
        if (max_terms < 100)
            throw domain_error("Accuracy: max_terms must be at least 100");
    }
};

inline double bessel_j0(double x) {
    if (!std::isfinite(x)) throw domain_error("bessel_j0: non-finite argument");
    return boost::math::cyl_bessel_j(0, x);
}

inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw domain_error("log_gamma: argument must be positive and finite");
    return boost::math::lgamma(x);
}

/// P(mu, x) = gamma(mu, x) / Gamma(mu).
inline double reg_gamma_lower(double mu, double x) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw domain_error("reg_gamma_lower: mu must be positive");
    if (!(x >= 0.0)) throw domain_error("reg_gamma_lower: x must be non-negative");
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(mu, x);
}

/// Q(mu, x) = Gamma(mu, x) / Gamma(mu) = 1 - P(mu, x).
inline double reg_gamma_upper(double mu, double x) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw domain_error("reg_gamma_upper: mu must be positive");
    if (!(x >= 0.0)) throw domain_error("reg_gamma_upper: x must be non-negative");
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(mu, x);
}

namespace detail {

// Below this a term bound counts as exhausted regardless of the running sum.
inline constexpr double tail_floor = 1e-300;
inline const double log_tail_floor = std::log(tail_floor);

[[noreturn]] inline void series_failed(const char* which, double partial) {
    throw accuracy_error(std::string(which) + ": series did not converge within max_terms", partial);
}

// Poisson-mixture of regularized gamma terms
//   sum_k w_k G(nu + k, y),  w_k = e^{-lambda} lambda^k / k!,
// with G = P (lower) or G = Q (upper).
//
// The summation window [lo, hi] is found first from log-domain upper
// bounds on every term, so underflowing weights or gamma values never stop
// the search early:
//   P(a, y) <= y^a e^{-y} / Gamma(a+1) / (1 - y/(a+1))      (a+1 > y)
//   Q(a, y) <= y^{a-1} e^{-y} / Gamma(a) / (1 - (a-1)/y)    (y > a-1)
// The window is then summed in the single direction where the gamma
// recurrence only adds: downward for P, upward for Q.
class PoissonGammaSeries {
public:
    PoissonGammaSeries(double nu, double lambda, double y, bool lower, const Accuracy& acc)
        : nu_(nu), lambda_(lambda), y_(y), lower_(lower), acc_(acc), log_lambda_(std::log(lambda)),
          log_y_(std::log(y)) {}

    double sum() const {
        if (lambda_ == 0.0) return lower_ ? boost::math::gamma_p(nu_, y_) : boost::math::gamma_q(nu_, y_);

        // Approximate location of the largest term: k (k + nu) = lambda y.
        const double k_star = 0.5 * (-nu_ + std::sqrt(nu_ * nu_ + 4.0 * lambda_ * y_));
        const double mode = std::floor(lambda_);
        const double start_d = lower_ ? std::min(mode, std::floor(k_star)) : std::max(mode, std::floor(k_star));
        const auto start = static_cast<std::size_t>(std::max(0.0, start_d));

        const double g_start = gamma_term(start);
        const double log_t_start = log_weight(start) + (g_start > 0.0 ? std::log(g_start) : -1e308);
        const double cutoff = std::max(std::log(acc_.rel_tol) + log_t_start, log_tail_floor);

        bool capped = false;
        std::size_t hi = start;
        for (;;) {
            if (hi - start >= acc_.max_terms) { capped = true; break; }
            const double b1 = log_bound(hi + 1), b2 = log_bound(hi + 2);
            const double rho = std::exp(b2 - b1);
            if (rho < 1.0 && b1 - std::log1p(-rho) < cutoff) break;
            ++hi;
        }
        std::size_t lo = start;
        while (lo > 0) {
            if (start - lo >= acc_.max_terms) { capped = true; break; }
            const double b1 = log_bound(lo - 1);
            const double b2 = lo >= 2 ? log_bound(lo - 2) : -1e308;
            const double rho = std::exp(b2 - b1);
            if (rho < 1.0 && b1 - std::log1p(-rho) < cutoff) break;
            --lo;
        }

        const double total = lower_ ? sum_lower(lo, hi) : sum_upper(lo, hi);
        if (capped || hi - lo + 1 > acc_.max_terms) series_failed(lower_ ? "ncx2_cdf" : "marcum_q", total);
        return std::clamp(total, 0.0, 1.0);
    }

private:
    double log_weight(std::size_t k) const {
        const double kd = static_cast<double>(k);
        return -lambda_ + kd * log_lambda_ - boost::math::lgamma(kd + 1.0);
    }

    // log of y^{a} e^{-y} / Gamma(a+1)
    double log_gamma_density(double a) const { return a * log_y_ - y_ - boost::math::lgamma(a + 1.0); }

    double gamma_term(std::size_t k) const {
        const double a = nu_ + static_cast<double>(k);
        return lower_ ? boost::math::gamma_p(a, y_) : boost::math::gamma_q(a, y_);
    }

    double log_bound(std::size_t k) const {
        const double a = nu_ + static_cast<double>(k);
        double log_g = 0.0;
        if (lower_) {
            if (a + 1.0 > y_) log_g = std::min(0.0, log_gamma_density(a) - std::log1p(-y_ / (a + 1.0)));
        } else {
            // log_gamma_density(a - 1) = log of y^{a-1} e^{-y} / Gamma(a)
            if (a <= 1.0) log_g = std::min(0.0, log_gamma_density(a - 1.0));
            else if (y_ > a - 1.0) log_g = std::min(0.0, log_gamma_density(a - 1.0) - std::log1p(-(a - 1.0) / y_));
        }
        return log_weight(k) + log_g;
    }

    // Downward from hi: P(a-1, y) = P(a, y) + y^{a-1} e^{-y} / Gamma(a).
    double sum_lower(std::size_t lo, std::size_t hi) const {
        double g = gamma_term(hi);
        double sum = 0.0;
        for (std::size_t k = hi;; --k) {
            sum += std::exp(log_weight(k)) * g;
            if (k == lo) break;
            g = std::min(1.0, g + std::exp(log_gamma_density(nu_ + static_cast<double>(k) - 1.0)));
        }
        return sum;
    }

    // Upward from lo: Q(a+1, y) = Q(a, y) + y^a e^{-y} / Gamma(a+1).
    double sum_upper(std::size_t lo, std::size_t hi) const {
        double g = gamma_term(lo);
        double sum = 0.0;
        for (std::size_t k = lo;; ++k) {
            sum += std::exp(log_weight(k)) * g;
            if (k == hi) break;
            g = std::min(1.0, g + std::exp(log_gamma_density(nu_ + static_cast<double>(k))));
        }
        return sum;
    }

    double nu_, lambda_, y_;
    bool lower_;
    const Accuracy& acc_;
    double log_lambda_, log_y_;
};

// {cdf, survival} of the non-central chi-square with 2 nu degrees of
// freedom and non-centrality 2 lambda at 2 y. The smaller tail is summed
// directly and the other taken as its complement.
struct TailPair {
    double cdf;
    double sf;
};

inline TailPair poisson_gamma_tails(double nu, double lambda, double y, const Accuracy& acc) {
    if (y == 0.0) return {0.0, 1.0};
    if (std::isinf(y)) return {1.0, 0.0};
    if (y < nu + lambda) {
        const double cdf = PoissonGammaSeries(nu, lambda, y, true, acc).sum();
        return {cdf, 1.0 - cdf};
    }
    const double sf = PoissonGammaSeries(nu, lambda, y, false, acc).sum();
    return {1.0 - sf, sf};
}

} // namespace detail

/// Generalized Marcum-Q of integer order mu >= 1:
/// Q_mu(a, b) = Pr{ chi'^2_{2 mu}(a^2) > b^2 }.
inline double marcum_q(int mu, double a, double b, const Accuracy& acc = {}) {
    if (mu < 1) throw domain_error("marcum_q: order must be a positive integer");
    if (!std::isfinite(a) || !(a >= 0.0)) throw domain_error("marcum_q: a must be finite and non-negative");
    if (!std::isfinite(b) || !(b >= 0.0)) throw domain_error("marcum_q: b must be finite and non-negative");
    acc.validate();
    if (b == 0.0) return 1.0;
    return detail::poisson_gamma_tails(mu, 0.5 * a * a, 0.5 * b * b, acc).sf;
}

/// CDF of the non-central chi-square with `dof` degrees of freedom and
/// non-centrality `noncentrality`, at `x`. Equal to 1 - Q_{dof/2}(sqrt(nc), sqrt(x)).
inline double ncx2_cdf(int dof, double noncentrality, double x, const Accuracy& acc = {}) {
    if (dof < 1) throw domain_error("ncx2_cdf: degrees of freedom must be a positive integer");
    if (!std::isfinite(noncentrality) || !(noncentrality >= 0.0))
        throw domain_error("ncx2_cdf: non-centrality must be finite and non-negative");
    if (!(x >= 0.0) || std::isnan(x)) throw domain_error("ncx2_cdf: x must be non-negative");
    acc.validate();
    return detail::poisson_gamma_tails(0.5 * dof, 0.5 * noncentrality, 0.5 * x, acc).cdf;
}

} // namespace fasthz

#endif // FASTHZ_SPECFUN_HPP
