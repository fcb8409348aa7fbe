#ifndef FASTHZ_QUADRATURE_HPP
#define FASTHZ_QUADRATURE_HPP

// Generalized Gauss-Laguerre rules for integrals against the Gamma(shape, 1)
// density u^{shape-1} e^{-u} / Gamma(shape) on [0, inf).
//
// Nodes are the eigenvalues of the Jacobi matrix of the Laguerre
// polynomials L_n^{(shape-1)}, polished by Newton on the three-term
// recurrence. Weights use the closed form
//   w_i = Gamma(n+a) x_i / (n! (n+a) [L_{n-1}^{(a)}(x_i)]^2),  a = shape-1,
// evaluated in log space (L_{n-1} overflows for the outer nodes of large
// rules) and divided by Gamma(shape) so that they sum to one.

#include <fasthz/errors.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace fasthz {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights; // probability weights, sum to 1
};

namespace detail {

// Extended precision: near a root the recurrence cancels heavily, and in
// plain double the polished nodes of a 1024-point rule drift by ~1e-12.
using real = long double;

struct LaguerreEval {
    real pn;        // scaled L_n(x)
    real pn1;       // scaled L_{n-1}(x)
    real log_scale; // true values are scaled values times exp(log_scale)
};

inline LaguerreEval laguerre_pair(std::size_t n, real a, real x) {
    real prev = 1.0L;
    real cur = 1.0L + a - x;
    real log_scale = 0.0L;
    if (n == 1) return {cur, prev, 0.0L};
    for (std::size_t j = 2; j <= n; ++j) {
        const real jd = static_cast<real>(j);
        const real next = ((2.0L * jd - 1.0L + a - x) * cur - (jd - 1.0L + a) * prev) / jd;
        prev = cur;
        cur = next;
        if (std::abs(cur) > 1e150L) {
            cur *= 1e-150L;
            prev *= 1e-150L;
            log_scale += 150.0L * std::log(10.0L);
        }
    }
    return {cur, prev, log_scale};
}

} // namespace detail

inline GaussRule make_gamma_rule(std::size_t n, double shape) {
    if (n < 1) throw domain_error("make_gamma_rule: need at least one node");
    if (!(shape > 0.0)) throw domain_error("make_gamma_rule: shape must be positive");
    const double a = shape - 1.0;

    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double id = static_cast<double>(i);
        diag[static_cast<Eigen::Index>(i)] = 2.0 * id + a + 1.0;
        if (i + 1 < n) sub[static_cast<Eigen::Index>(i)] = std::sqrt((id + 1.0) * (id + 1.0 + a));
    }
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = shape;
        rule.weights[0] = 1.0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw accuracy_error("make_gamma_rule: eigenvalue iteration failed", 0.0);

    using detail::real;
    const real nd = static_cast<real>(n), al = a;
    const real log_const = std::lgamma(nd + al) - std::lgamma(nd + 1.0L) - std::log(nd + al) -
                           std::lgamma(static_cast<real>(shape));
    for (std::size_t i = 0; i < n; ++i) {
        real x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
        detail::LaguerreEval ev{};
        for (int it = 0; it < 10; ++it) {
            ev = detail::laguerre_pair(n, al, x);
            const real deriv = (nd * ev.pn - (nd + al) * ev.pn1) / x;
            const real step = ev.pn / deriv;
            x -= step;
            if (std::abs(step) <= 1e-18L * x) break;
        }
        ev = detail::laguerre_pair(n, al, x);
        const real log_w = log_const + std::log(x) - 2.0L * (std::log(std::abs(ev.pn1)) + ev.log_scale);
        rule.nodes[i] = static_cast<double>(x);
        rule.weights[i] = static_cast<double>(std::exp(log_w));
    }
    return rule;
}

/// Cached rule; safe to call from multiple threads.
inline std::shared_ptr<const GaussRule> gamma_rule(std::size_t n, double shape) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, double>, std::shared_ptr<const GaussRule>> cache;
    const auto key = std::make_pair(n, shape);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const GaussRule>(make_gamma_rule(n, shape));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

/// Expectation of f(U), U ~ Gamma(shape, 1), under an n-point rule.
template <class F>
double gamma_expectation(F&& f, std::size_t n, double shape) {
    const auto rule = gamma_rule(n, shape);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
        if (rule->weights[i] == 0.0) continue;
        sum += rule->weights[i] * f(rule->nodes[i]);
    }
    return sum;
}

} // namespace fasthz

#endif // FASTHZ_QUADRATURE_HPP
