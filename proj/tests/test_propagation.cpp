#include <fasthz/propagation.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace fasthz;

namespace {

ThzLink free_space(double d) {
    ThzLink link = ThzLink::reference();
    link.tx_gain = link.rx_gain = 1.0;
    link.absorb_coeff = 0.0;
    link.tx_height_m = link.rx_height_m = 2.0;
    link.dist_2d_m = d;
    return link;
}

} // namespace

TEST(ReceivedPower, FriisLimit) {
    const auto link = free_space(10.0);
    const double pi = 3.14159265358979323846;
    const double c = 299792458.0;
    const double friis = link.tx_power_w * c * c / (16.0 * pi * pi * link.freq_hz * link.freq_hz * 100.0);
    EXPECT_NEAR(received_power(link), friis, 1e-14 * friis);
}

TEST(ReceivedPower, ReferenceLink) {
    const auto link = ThzLink::reference();
    EXPECT_NEAR(link.distance_3d(), std::sqrt(109.0), 1e-12);
    EXPECT_NEAR(received_power(link), 8.9e-11, 0.05e-11);
    // independent evaluation in dB
    const double d3 = std::sqrt(109.0);
    const double fspl_db = 20.0 * std::log10(4.0 * 3.14159265358979323846 * d3 * 1e12 / 299792458.0);
    const double absorb_db = 10.0 * std::log10(std::exp(0.192 * d3));
    const double p_dbm = 20.0 + 17.0 + 14.0 - fspl_db - absorb_db;
    EXPECT_NEAR(units::watts_to_dbm(received_power(link)), p_dbm, 1e-10);
}

TEST(ReceivedPower, InverseSquare) {
    const double p1 = received_power(free_space(5.0));
    const double p2 = received_power(free_space(10.0));
    EXPECT_NEAR(p1 / p2, 4.0, 1e-12);
}

TEST(ReceivedPower, DecreasingInDistanceFrequencyAbsorption) {
    auto base = ThzLink::reference();
    double prev = received_power(base);
    for (double d = 11.0; d < 40.0; d += 1.0) {
        auto l = base;
        l.dist_2d_m = d;
        const double p = received_power(l);
        EXPECT_LT(p, prev);
        prev = p;
    }
    prev = received_power(base);
    for (double f = 1.1e12; f < 3e12; f += 0.1e12) {
        auto l = base;
        l.freq_hz = f;
        const double p = received_power(l);
        EXPECT_LT(p, prev);
        prev = p;
    }
    prev = received_power(base);
    for (double k = 0.2; k < 1.0; k += 0.05) {
        auto l = base;
        l.absorb_coeff = k;
        const double p = received_power(l);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(ReceivedPower, RejectsInvalidLinks) {
    auto l = ThzLink::reference();
    l.tx_power_w = 0.0;
    EXPECT_THROW(received_power(l), domain_error);
    l = ThzLink::reference();
    l.absorb_coeff = -0.1;
    EXPECT_THROW(received_power(l), domain_error);
    l = ThzLink::reference();
    l.noise_power_w = 0.0;
    EXPECT_THROW(received_power(l), domain_error);
}

TEST(AverageSnr, Ratios) {
    auto l = ThzLink::reference();
    l.noise_power_w = received_power(l);
    EXPECT_NEAR(average_snr(l), 1.0, 1e-15);
    l.noise_power_w = received_power(l) / 1000.0;
    EXPECT_NEAR(units::linear_to_db(average_snr(l)), 30.0, 1e-10);
}

TEST(AverageSnr, ThermalNoiseReferenceLink) {
    const auto l = ThzLink::reference();
    EXPECT_NEAR(l.noise_power_w, 1.380649e-23 * 290.0 * 10e9, 1e-25);
    EXPECT_NEAR(units::watts_to_dbm(l.noise_power_w), -73.975, 1e-3);
    // -69.5 dBm received over a -74.0 dBm floor
    EXPECT_NEAR(units::linear_to_db(average_snr(l)), 3.45, 0.05);
}

TEST(OutageThreshold, ShannonInversion) {
    const auto l = ThzLink::reference();
    EXPECT_NEAR(outage_threshold(OutageQuery::rate(10e9), l), 1.0, 1e-15);
    EXPECT_NEAR(outage_threshold(OutageQuery::rate(7e9), l), std::pow(2.0, 0.7) - 1.0, 1e-15);
    EXPECT_NEAR(outage_threshold(OutageQuery::rate(7e9), l), 0.6245, 5e-5);
    EXPECT_LT(outage_threshold(OutageQuery::rate(1.0), l), 1e-9);
    EXPECT_GT(outage_threshold(OutageQuery::rate(1.0), l), 0.0);
    EXPECT_EQ(outage_threshold(OutageQuery::snr(2.5), l), 2.5);
    EXPECT_THROW(OutageQuery::rate(0.0), domain_error);
    EXPECT_THROW(rate_to_snr_threshold(-1.0, 10e9), domain_error);
}

TEST(OutageThreshold, IncreasingAndConvexInRate) {
    const double B = 10e9, h = 0.25e9;
    for (double R = 0.5e9; R < 30e9; R += 0.5e9) {
        const double lo = rate_to_snr_threshold(R - h, B), mid = rate_to_snr_threshold(R, B),
                     hi = rate_to_snr_threshold(R + h, B);
        EXPECT_LT(lo, mid);
        EXPECT_LT(mid, hi);
        EXPECT_GT(lo + hi - 2.0 * mid, 0.0);
    }
}

TEST(Units, DecibelRoundTrip) {
    for (double db : {-80.0, -26.5, 0.0, 3.0, 17.0, 45.0}) {
        EXPECT_NEAR(units::linear_to_db(units::db_to_linear(db)), db, 1e-10 * std::max(1.0, std::abs(db)));
        EXPECT_NEAR(units::watts_to_dbm(units::dbm_to_watts(db)), db, 1e-10 * std::max(1.0, std::abs(db)));
    }
    EXPECT_NEAR(units::dbm_to_watts(20.0), 0.1, 1e-16);
}
