#include <fasthz/analytic.hpp>
#include <fasthz/montecarlo.hpp>
#include <fasthz/random.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace fasthz;

namespace {

MCSettings settings(std::uint64_t trials, std::uint64_t seed = 7, unsigned workers = 1) {
    MCSettings mc;
    mc.trials = trials;
    mc.seed = seed;
    mc.workers = workers;
    return mc;
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

const double ks_99 = 1.628; // asymptotic 1% critical value times sqrt(n)

} // namespace

TEST(Philox, KnownAnswers) {
    using C = Philox4x32::counter_type;
    using K = Philox4x32::key_type;
    EXPECT_EQ(Philox4x32::encrypt(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(Philox4x32::encrypt(C{~0u, ~0u, ~0u, ~0u}, K{~0u, ~0u}),
              (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(Philox4x32::encrypt(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}),
              (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NormalStreamTest, ReproducibleAndStandard) {
    NormalStream a(11, 5), b(11, 5), c(11, 6);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.next();
        EXPECT_EQ(x, b.next());
        differs |= x != c.next();
    }
    EXPECT_TRUE(differs);

    NormalStream s(3, 0);
    const int n = 1'000'000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.next();
        sum += x;
        sq += x * x;
    }
    EXPECT_NEAR(sum / n, 0.0, 3.0 / std::sqrt(n));
    EXPECT_NEAR(sq / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(SamplePorts, IndependentPortsHaveUnitScaleMean) {
    for (int mu : {1, 3}) {
        const auto p = AlphaMuParams::normalized(2.0, mu);
        const auto layout = PortLayout::with_correlation(4, 1.0, 0.0);
        const int n = 250'000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            for (double s : sample_ports(p, layout, i, 1)) sum += s;
        const double count = 4.0 * n;
        EXPECT_NEAR(sum / count, mu, 3.0 * std::sqrt(mu / count));
    }
}

TEST(SamplePorts, FullCorrelationLimitEqualizesPorts) {
    const auto powers = sample_ports(AlphaMuParams::normalized(2.0, 2), PortLayout::with_correlation(6, 1.0, 1.0 - 1e-14),
                                     42, 9);
    for (double s : powers) EXPECT_NEAR(s, powers[0], 1e-5 * powers[0]);
}

TEST(SamplePorts, DeterministicPerTrial) {
    const auto p = AlphaMuParams::normalized(2.0, 2);
    const PortLayout layout(10, 1.0);
    EXPECT_EQ(sample_ports(p, layout, 123, 4), sample_ports(p, layout, 123, 4));
    EXPECT_NE(sample_ports(p, layout, 123, 4), sample_ports(p, layout, 124, 4));
}

TEST(SamplePorts, MarginalPassesKolmogorovSmirnov) {
    const int n = 100'000;
    std::vector<double> xs(n);
    const auto p = AlphaMuParams::normalized(2.0, 2);
    const auto layout = PortLayout::with_correlation(3, 1.0, 0.5);
    for (int i = 0; i < n; ++i) xs[i] = sample_ports(p, layout, i, 17)[1];
    EXPECT_LT(ks_statistic(xs, [](double x) { return reg_gamma_lower(2, x); }), ks_99 / std::sqrt(n));
}

TEST(SamplePorts, MarginalAcrossRandomConfigs) {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> mus(1, 5), ports(2, 12);
    std::uniform_real_distribution<double> rs(0.0, 0.95);
    const int n = 100'000;
    for (int c = 0; c < 10; ++c) {
        const int mu = mus(gen), L = ports(gen);
        const double r = rs(gen);
        const auto p = AlphaMuParams::normalized(2.0, mu);
        const auto layout = PortLayout::with_correlation(L, 1.0, r);
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = sample_ports(p, layout, i, 100 + c)[static_cast<std::size_t>(i % L)];
        EXPECT_LT(ks_statistic(xs, [&](double x) { return marginal_cdf(p, std::sqrt(x)); }), ks_99 / std::sqrt(n))
            << "mu=" << mu << " L=" << L << " r=" << r;
    }
}

TEST(SamplePorts, EqualPairwiseCorrelation) {
    // For mu = 1 the power correlation coefficient of two ports is r^2.
    const int L = 5, n = 200'000;
    const double r = 0.6;
    const auto p = AlphaMuParams::normalized(2.0, 1);
    const auto layout = PortLayout::with_correlation(L, 1.0, r);
    std::vector<std::vector<double>> cols(L, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        const auto s = sample_ports(p, layout, i, 3);
        for (int k = 0; k < L; ++k) cols[k][i] = s[k];
    }
    auto corr = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double ma = 0, mb = 0;
        for (int i = 0; i < n; ++i) ma += a[i], mb += b[i];
        ma /= n, mb /= n;
        double sab = 0, saa = 0, sbb = 0;
        for (int i = 0; i < n; ++i) {
            sab += (a[i] - ma) * (b[i] - mb);
            saa += (a[i] - ma) * (a[i] - ma);
            sbb += (b[i] - mb) * (b[i] - mb);
        }
        return sab / std::sqrt(saa * sbb);
    };
    for (int j = 0; j < L; ++j)
        for (int k = j + 1; k < L; ++k) EXPECT_NEAR(corr(cols[j], cols[k]), r * r, 0.015) << j << "," << k;
}

TEST(McOpFas, ExtremeThresholds) {
    const auto p = AlphaMuParams::normalized(2.0, 2);
    const PortLayout layout(10, 1.0);
    const auto zero = mc_op_fas(p, layout, 1.0, 0.0, settings(10'000));
    EXPECT_EQ(zero.value, 0.0);
    EXPECT_DOUBLE_EQ(zero.half_width, 3.0 / 10'000);
    EXPECT_EQ(mc_op_fas(p, layout, 1.0, 1e300, settings(10'000)).value, 1.0);
}

TEST(McOpFas, AgreesWithAnalytic) {
    for (auto [mu, W, L, th] : {std::tuple{2, 1.0, 20, 4.0}, std::tuple{1, 0.5, 10, 1.5}, std::tuple{4, 2.0, 8, 5.0}}) {
        const auto p = AlphaMuParams::normalized(2.0, mu);
        const PortLayout layout(L, W);
        const double exact = op_fas(p, layout, 1.0, th);
        const auto est = mc_op_fas(p, layout, 1.0, th, settings(200'000));
        EXPECT_NEAR(est.value, exact, 3.0 * est.half_width) << "mu=" << mu << " W=" << W << " L=" << L;
    }
}

TEST(McOpFas, PortsCurveMonotonicityOracle) {
    // Sampled check of the analytic ports curve at three grid points.
    const auto p = AlphaMuParams::normalized(4.0, 1);
    std::vector<double> exact, sampled, hw;
    for (int L : {10, 40, 100}) {
        exact.push_back(op_fas(p, PortLayout(L, 1.0), 1.0, 3.0));
        const auto est = mc_op_fas(p, PortLayout(L, 1.0), 1.0, 3.0, settings(100'000));
        sampled.push_back(est.value);
        hw.push_back(est.half_width);
    }
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(sampled[i], exact[i], 3.0 * hw[i]);
    EXPECT_GT(exact[0], exact[1]);
    EXPECT_GT(exact[1], exact[2]);
    EXPECT_GT(sampled[0] - hw[0], sampled[2] + hw[2]);
}

TEST(McOpSc, AgreesWithPowerOfTubeOutage) {
    const auto p = AlphaMuParams::normalized(2.0, 2);
    const PortLayout layout(32, 2.0);
    for (int M : {2, 4}) {
        const double exact = op_sc_fas(p, layout, DiversityConfig::sc(M), 1.0, 6.0);
        const auto est = mc_op_sc(p, layout, DiversityConfig::sc(M), 1.0, 6.0, settings(200'000));
        EXPECT_NEAR(est.value, exact, 3.0 * est.half_width) << "M=" << M;
    }
}

TEST(McDiversity, OrderOneIsPlainFas) {
    const auto p = AlphaMuParams::normalized(2.0, 2);
    const PortLayout layout(12, 1.0);
    const auto mc = settings(20'000, 31);
    const auto fas = mc_op_fas(p, layout, 1.0, 3.0, mc);
    EXPECT_EQ(mc_op_sc(p, layout, DiversityConfig::none(), 1.0, 3.0, mc).value, fas.value);
    EXPECT_EQ(mc_op_mgc(p, layout, DiversityConfig::none(), 1.0, 3.0, mc).value, fas.value);
}

TEST(McDiversity, MgcOutageNestedInScOutage) {
    const auto p = AlphaMuParams::normalized(2.0, 2);
    const PortLayout layout(16, 2.0);
    const double th = 6.0;
    for (int M : {2, 4, 8}) {
        const auto div = DiversityConfig::sc(M);
        for (std::uint64_t trial = 0; trial < 20'000; ++trial) {
            const auto best = tube_maxima(p, layout, div, trial, 77);
            double sum = 0.0, mx = 0.0;
            for (double b : best) sum += b, mx = std::max(mx, b);
            if (sum <= th) {
                ASSERT_LE(mx, th) << "trial " << trial;
            }
        }
        const auto mc = settings(50'000, 77);
        EXPECT_LE(mc_op_mgc(p, layout, DiversityConfig::mgc(M), 1.0, th, mc).value,
                  mc_op_sc(p, layout, DiversityConfig::sc(M), 1.0, th, mc).value);
    }
}

TEST(McDiversity, SchemeMismatchIsRejected) {
    const auto p = AlphaMuParams::normalized(2.0, 1);
    const PortLayout layout(8, 1.0);
    EXPECT_THROW(mc_op_sc(p, layout, DiversityConfig::mgc(2), 1.0, 1.0, settings(10'000)), config_error);
    EXPECT_THROW(mc_op_mgc(p, layout, DiversityConfig::sc(2), 1.0, 1.0, settings(10'000)), config_error);
    EXPECT_THROW(mc_op_sc(p, layout, DiversityConfig::sc(3), 1.0, 1.0, settings(10'000)), config_error);
}

TEST(McSettingsTest, Validation) {
    const auto p = AlphaMuParams::normalized(2.0, 1);
    EXPECT_THROW(mc_op_fas(p, PortLayout(4, 1.0), 1.0, 1.0, settings(9'999)), domain_error);
    auto mc = settings(10'000);
    mc.confidence = 1.0;
    EXPECT_THROW(mc_op_fas(p, PortLayout(4, 1.0), 1.0, 1.0, mc), domain_error);
}

TEST(McEstimate, WorkerCountInvariance) {
    const auto p = AlphaMuParams::normalized(2.0, 2);
    const PortLayout layout(20, 1.0);
    const auto one = mc_op_fas(p, layout, 1.0, 3.0, settings(30'001, 5, 1));
    const auto three = mc_op_fas(p, layout, 1.0, 3.0, settings(30'001, 5, 3));
    EXPECT_EQ(one.value, three.value);
    EXPECT_EQ(one.half_width, three.half_width);
    const auto sc1 = mc_op_mgc(p, layout, DiversityConfig::mgc(4), 1.0, 3.0, settings(30'001, 5, 1));
    const auto sc4 = mc_op_mgc(p, layout, DiversityConfig::mgc(4), 1.0, 3.0, settings(30'001, 5, 4));
    EXPECT_EQ(sc1.value, sc4.value);
}

TEST(McEstimate, HalfWidthShrinksAsInverseRootTrials) {
    const auto p = AlphaMuParams::normalized(2.0, 1);
    const PortLayout layout(5, 1.0);
    const auto small = mc_op_fas(p, layout, 1.0, 2.0, settings(10'000));
    const auto large = mc_op_fas(p, layout, 1.0, 2.0, settings(1'000'000));
    EXPECT_NEAR(small.half_width / large.half_width, 10.0, 2.0);
    EXPECT_EQ(large.trials_used, 1'000'000u);
    EXPECT_EQ(large.method, Method::mc);
}

TEST(McEstimate, WaldInterval) {
    EXPECT_NEAR(confidence_z(0.99), 2.5758293035489, 1e-12);
    EXPECT_NEAR(confidence_z(0.95), 1.9599639845401, 1e-12);
    const auto e = make_estimate(250, 1000, 0.95);
    EXPECT_DOUBLE_EQ(e.value, 0.25);
    EXPECT_NEAR(e.half_width, 1.9599639845401 * std::sqrt(0.25 * 0.75 / 1000), 1e-12);
    EXPECT_DOUBLE_EQ(make_estimate(1000, 1000, 0.99).half_width, 3e-3);
    EXPECT_EQ(make_estimate(1000, 1000, 0.99).upper(), 1.0);
}
