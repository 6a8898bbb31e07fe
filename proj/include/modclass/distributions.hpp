#pragma once

#include <span>
#include <string>
#include <vector>

#include "modclass/constellation.hpp"

namespace modclass {

// Any testpoint set used to build covariance-based statistics must leave at
// least this much probability mass in every inter-testpoint region, for
// every candidate class; otherwise the feature covariance is singular.
inline constexpr double kMinRegionMass = 1e-6;

// Standard normal CDF via the complementary error function, clamped to [0,1].
double normal_cdf(double z);

struct GaussianComponent {
    double mean = 0.0;
    double weight = 0.0;
};

// Exact CDF of one quadrature sample under a given class and noise level: a
// Gaussian mixture whose means are the pooled real and imaginary parts of
// the constellation points and whose common std dev is sigma/sqrt(2).
// Components with equal means are merged.
struct FeatureCdf {
    std::string class_name;
    double sigma2 = 1.0;
    double component_std = 1.0;
    std::vector<GaussianComponent> components;

    double cdf(double z) const;
    double pdf(double z) const;
    // log pdf via log-sum-exp; finite even where pdf underflows to 0
    double log_pdf(double z) const;
};

FeatureCdf theoretical_cdf(const Constellation& c, double sigma2);

// Ordered ECDF evaluation points, built for (and stored with) one SNR.
struct TestpointSet {
    std::vector<double> t;
    double snr_db = 0.0;
    std::string feature = "quadrature";
};

void validate(const TestpointSet& tps);

// ECDF values at the testpoints; each x_i is a multiple of 1/n_samples.
struct SampledEcdf {
    std::vector<double> x;
    int n_samples = 0;
};

// x_i = #{n : z_n <= t_i} / N, one binary search per sample (no full sort).
SampledEcdf sampled_ecdf(std::span<const double> z, const TestpointSet& tps);

}  // namespace modclass
