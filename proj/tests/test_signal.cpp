#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "modclass/channel.hpp"
#include "modclass/constellation.hpp"

using namespace modclass;

namespace {

double average_power(const Constellation& c) {
    double p = 0.0;
    for (const auto& pt : c.points) p += std::norm(pt);
    return p / static_cast<double>(c.points.size());
}

bool contains_point(const Constellation& c, std::complex<double> p, double tol) {
    return std::any_of(c.points.begin(), c.points.end(),
                       [&](const auto& q) { return std::abs(q - p) <= tol; });
}

double nearest_point_distance(const Constellation& c, std::complex<double> r) {
    double best = 1e300;
    for (const auto& p : c.points) best = std::min(best, std::abs(r - p));
    return best;
}

}  // namespace

TEST_CASE("standard constellations are unit power square grids") {
    const auto c4 = standard_constellation("4QAM");
    REQUIRE(c4.points.size() == 4);
    CHECK(average_power(c4) == doctest::Approx(1.0).epsilon(1e-12));
    const double s = 1.0 / std::sqrt(2.0);
    for (const double re : {-s, s})
        for (const double im : {-s, s}) CHECK(contains_point(c4, {re, im}, 1e-15));

    const auto c16 = standard_constellation("16QAM");
    REQUIRE(c16.points.size() == 16);
    CHECK(average_power(c16) == doctest::Approx(1.0).epsilon(1e-12));
    const double s16 = 1.0 / std::sqrt(10.0);
    for (const double a : {-3.0, -1.0, 1.0, 3.0})
        for (const double b : {-3.0, -1.0, 1.0, 3.0})
            CHECK(contains_point(c16, {a * s16, b * s16}, 1e-15));

    const auto c64 = standard_constellation("64QAM");
    REQUIRE(c64.points.size() == 64);
    CHECK(average_power(c64) == doctest::Approx(1.0).epsilon(1e-12));
    const double s64 = 1.0 / std::sqrt(42.0);
    CHECK(contains_point(c64, {7.0 * s64, 7.0 * s64}, 1e-15));
    CHECK(contains_point(c64, {-5.0 * s64, 3.0 * s64}, 1e-15));
}

TEST_CASE("unknown constellation name lists the registry") {
    CHECK_THROWS_WITH_AS(standard_constellation("8PSK"),
                         doctest::Contains("available:"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(standard_constellation("8PSK"), doctest::Contains("16QAM"),
                         std::invalid_argument);
}

TEST_CASE("constellation validation rejects bad sets") {
    CHECK_THROWS_AS(validate(Constellation{"one", {{1.0, 0.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Constellation{"dup", {{1.0, 0.0}, {1.0, 0.0}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(Constellation{"hot", {{2.0, 0.0}, {-2.0, 0.0}}}),
                    std::invalid_argument);
}

TEST_CASE("transmit in the noiseless limit returns constellation points") {
    const auto c = standard_constellation("16QAM");
    RandomStream rng(11);
    const auto block = transmit(c, ChannelConfig{320.0}, 64, rng);
    for (const auto& r : block.received) CHECK(nearest_point_distance(c, r) < 1e-12);
}

TEST_CASE("received power is signal power plus noise power") {
    const auto c = standard_constellation("4QAM");
    RandomStream rng(20240601);
    const auto block = transmit(c, ChannelConfig{0.0}, 100000, rng);
    double p = 0.0;
    for (const auto& r : block.received) p += std::norm(r);
    p /= static_cast<double>(block.received.size());
    CHECK(std::abs(p - 2.0) <= 0.02);
}

TEST_CASE("transmit is deterministic under a fixed seed") {
    const auto c = standard_constellation("64QAM");
    RandomStream a(7), b(7);
    const auto ba = transmit(c, ChannelConfig{5.0}, 257, a);
    const auto bb = transmit(c, ChannelConfig{5.0}, 257, b);
    REQUIRE(ba.received.size() == bb.received.size());
    for (std::size_t i = 0; i < ba.received.size(); ++i) CHECK(ba.received[i] == bb.received[i]);
}

TEST_CASE("quadrature feature concatenates Re block then Im block") {
    SymbolBlock one;
    one.received = {{1.0, 2.0}};
    CHECK(quadrature_feature(one) == std::vector<double>{1.0, 2.0});

    SymbolBlock two;
    two.received = {{1.0, 2.0}, {3.0, -1.0}};
    CHECK(quadrature_feature(two) == std::vector<double>{1.0, 3.0, 2.0, -1.0});

    const auto c = standard_constellation("4QAM");
    RandomStream rng(3);
    const auto z = quadrature_feature(transmit(c, ChannelConfig{320.0}, 50, rng));
    REQUIRE(z.size() == 100);
    const double s = 1.0 / std::sqrt(2.0);
    for (const double v : z) CHECK(std::min(std::abs(v - s), std::abs(v + s)) < 1e-12);

    CHECK_THROWS_AS(quadrature_feature(SymbolBlock{}), std::invalid_argument);
}

TEST_CASE("noise variance per real dimension matches sigma^2/2") {
    // Var(Re r) = Var(Re s) + sigma^2/2 and Var(Re s) = 1/2 exactly for 4QAM.
    const auto c = standard_constellation("4QAM");
    const ChannelConfig ch{0.0};
    RandomStream rng(99);
    const auto z = quadrature_feature(transmit(c, ch, 100000, rng));
    double mean = 0.0;
    for (const double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (const double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size() - 1);
    const double noise_est = var - 0.5;
    const double expected = ch.noise_variance() / 2.0;
    CHECK(std::abs(noise_est - expected) <= 0.03 * expected);
}

TEST_CASE("symbol draws are uniform (chi-square at 0.001 significance)") {
    // upper 0.001 quantiles of chi-square: df=3 -> 16.2662..., df=15 -> 37.6973...
    const struct {
        const char* name;
        double critical;
    } cases[] = {{"4QAM", 16.26623619623813}, {"16QAM", 37.69729821835383}};
    for (const auto& [name, critical] : cases) {
        const auto c = standard_constellation(name);
        RandomStream rng(424242);
        const auto block = transmit(c, ChannelConfig{320.0}, 100000, rng);
        std::vector<double> observed(c.points.size(), 0.0);
        for (const auto& r : block.received) {
            std::size_t best = 0;
            for (std::size_t m = 1; m < c.points.size(); ++m)
                if (std::abs(r - c.points[m]) < std::abs(r - c.points[best])) best = m;
            observed[best] += 1.0;
        }
        const double expected = 100000.0 / static_cast<double>(c.points.size());
        double chi2 = 0.0;
        for (const double o : observed) chi2 += (o - expected) * (o - expected) / expected;
        CHECK(chi2 < critical);
    }
}
