#ifndef FASTHZ_ERRORS_HPP
#define FASTHZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fasthz {

/// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A series or quadrature failed to reach the requested tolerance.
/// Carries the best estimate obtained before giving up.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double partial, double previous = 0.0)
        : std::runtime_error(what), partial_(partial), previous_(previous) {}

    double partial() const noexcept { return partial_; }
    double previous() const noexcept { return previous_; }

private:
    double partial_;
    double previous_;
};

/// Port correlation r = 1 with more than one port: every port carries the
/// same channel, so the conditional-independence construction breaks down.
class degenerate_correlation_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent diversity / layout / experiment configuration.
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw domain_error(msg);
}

} // namespace detail
} // namespace fasthz

#endif // FASTHZ_ERRORS_HPP
