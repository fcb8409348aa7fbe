#ifndef FASTHZ_PROPAGATION_HPP
#define FASTHZ_PROPAGATION_HPP

// THz link budget. Linear SI units only; dB conversions live in `units`
// and are meant for configuration boundaries.

#include <fasthz/errors.hpp>

#include <boost/math/constants/constants.hpp>

#include <cmath>

namespace fasthz {

namespace units {

inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double boltzmann = 1.380649e-23;     // J/K

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

} // namespace units

/// Thermal noise floor k_B T B.
inline double thermal_noise_w(double bandwidth_hz, double temperature_k = 290.0) {
    if (!(bandwidth_hz > 0.0) || !(temperature_k > 0.0))
        throw domain_error("thermal_noise_w: bandwidth and temperature must be positive");
    return units::boltzmann * temperature_k * bandwidth_hz;
}

struct ThzLink {
    double tx_power_w;
    double tx_gain;      // linear
    double rx_gain;      // linear
    double freq_hz;
    double dist_2d_m;
    double tx_height_m;
    double rx_height_m;
    double absorb_coeff; // K(f), 1/m
    double noise_power_w;
    double bandwidth_hz;

    void validate() const {
        auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!positive(tx_power_w)) throw domain_error("ThzLink: tx_power_w must be positive");
        if (!positive(tx_gain) || !positive(rx_gain)) throw domain_error("ThzLink: gains must be positive");
        if (!positive(freq_hz)) throw domain_error("ThzLink: freq_hz must be positive");
        if (!positive(dist_2d_m)) throw domain_error("ThzLink: dist_2d_m must be positive");
        if (!positive(tx_height_m) || !positive(rx_height_m)) throw domain_error("ThzLink: heights must be positive");
        if (!(absorb_coeff >= 0.0) || !std::isfinite(absorb_coeff))
            throw domain_error("ThzLink: absorb_coeff must be non-negative");
        if (!positive(noise_power_w)) throw domain_error("ThzLink: noise_power_w must be positive");
        if (!positive(bandwidth_hz)) throw domain_error("ThzLink: bandwidth_hz must be positive");
    }

    double distance_3d() const {
        const double dh = tx_height_m - rx_height_m;
        return std::sqrt(dist_2d_m * dist_2d_m + dh * dh);
    }

    /// 1 THz indoor link: 20 dBm, 17/14 dBi, 10 m, 4 m / 1 m heights,
    /// K = 0.192 /m, B = 10 GHz, thermal noise at 290 K.
    static ThzLink reference() {
        ThzLink link{};
        link.tx_power_w = units::dbm_to_watts(20.0);
        link.tx_gain = units::db_to_linear(17.0);
        link.rx_gain = units::db_to_linear(14.0);
        link.freq_hz = 1e12;
        link.dist_2d_m = 10.0;
        link.tx_height_m = 4.0;
        link.rx_height_m = 1.0;
        link.absorb_coeff = 0.192;
        link.bandwidth_hz = 10e9;
        link.noise_power_w = thermal_noise_w(link.bandwidth_hz);
        return link;
    }
};

/// P = Pt G1 G2 c^2 / (16 pi^2 f^2 d3^2 exp(K d3)), d3 the 3D distance.
inline double received_power(const ThzLink& link) {
    link.validate();
    const double d3 = link.distance_3d();
    const double pi = boost::math::constants::pi<double>();
    const double c = units::speed_of_light;
    const double spreading = 16.0 * pi * pi * link.freq_hz * link.freq_hz * d3 * d3;
    return link.tx_power_w * link.tx_gain * link.rx_gain * c * c / (spreading * std::exp(link.absorb_coeff * d3));
}

inline double average_snr(const ThzLink& link) { return received_power(link) / link.noise_power_w; }

/// Shannon inversion: the SNR at which log2(1 + snr) * B = R.
inline double rate_to_snr_threshold(double rate_bps, double bandwidth_hz) {
    if (!(rate_bps > 0.0) || !std::isfinite(rate_bps)) throw domain_error("rate_to_snr_threshold: rate must be positive");
    if (!(bandwidth_hz > 0.0)) throw domain_error("rate_to_snr_threshold: bandwidth must be positive");
    return std::expm1(rate_bps / bandwidth_hz * std::log(2.0));
}

struct OutageQuery {
    enum class Mode { snr_threshold, rate_target };

    Mode mode = Mode::snr_threshold;
    double snr_threshold = 1.0;   // linear, used in snr_threshold mode
    double target_rate_bps = 0.0; // used in rate_target mode

    static OutageQuery snr(double threshold) {
        if (!(threshold >= 0.0)) throw domain_error("OutageQuery: SNR threshold must be non-negative");
        return {Mode::snr_threshold, threshold, 0.0};
    }
    static OutageQuery rate(double rate_bps) {
        if (!(rate_bps > 0.0)) throw domain_error("OutageQuery: target rate must be positive");
        return {Mode::rate_target, 0.0, rate_bps};
    }
};

/// Linear SNR threshold gamma_th for the outage event.
inline double outage_threshold(const OutageQuery& query, const ThzLink& link) {
    switch (query.mode) {
    case OutageQuery::Mode::snr_threshold:
        if (!(query.snr_threshold >= 0.0)) throw domain_error("outage_threshold: negative SNR threshold");
        return query.snr_threshold;
    case OutageQuery::Mode::rate_target:
        return rate_to_snr_threshold(query.target_rate_bps, link.bandwidth_hz);
    }
    throw domain_error("outage_threshold: unknown query mode");
}

} // namespace fasthz

#endif // FASTHZ_PROPAGATION_HPP
