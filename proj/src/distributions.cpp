#include "modclass/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace modclass {

double normal_cdf(double z) {
    const double v = 0.5 * std::erfc(-z * M_SQRT1_2);
    return std::clamp(v, 0.0, 1.0);
}

double FeatureCdf::cdf(double z) const {
    double acc = 0.0;
    for (const auto& c : components) acc += c.weight * normal_cdf((z - c.mean) / component_std);
    return std::clamp(acc, 0.0, 1.0);
}

double FeatureCdf::pdf(double z) const {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double acc = 0.0;
    for (const auto& c : components) {
        const double u = (z - c.mean) / component_std;
        acc += c.weight * inv_sqrt_2pi * std::exp(-0.5 * u * u) / component_std;
    }
    return acc;
}

double FeatureCdf::log_pdf(double z) const {
    constexpr double log_inv_sqrt_2pi = -0.9189385332046727;
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> exponents(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) {
        const double u = (z - components[i].mean) / component_std;
        exponents[i] = std::log(components[i].weight) - 0.5 * u * u;
        mx = std::max(mx, exponents[i]);
    }
    double acc = 0.0;
    for (const double e : exponents) acc += std::exp(e - mx);
    return mx + std::log(acc) + log_inv_sqrt_2pi - std::log(component_std);
}

FeatureCdf theoretical_cdf(const Constellation& c, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("theoretical_cdf: sigma2 must be positive");
    validate(c);
    FeatureCdf f;
    f.class_name = c.name;
    f.sigma2 = sigma2;
    f.component_std = std::sqrt(sigma2 / 2.0);
    // Pool Re and Im parts, each with weight 1/(2*|points|); merge equal means.
    std::map<double, double> pooled;
    const double w = 1.0 / (2.0 * static_cast<double>(c.points.size()));
    for (const auto& p : c.points) {
        pooled[p.real()] += w;
        pooled[p.imag()] += w;
    }
    for (const auto& [mean, weight] : pooled) f.components.push_back({mean, weight});
    return f;
}

void validate(const TestpointSet& tps) {
    if (tps.t.empty()) throw std::invalid_argument("testpoint set must not be empty");
    for (std::size_t i = 1; i < tps.t.size(); ++i)
        if (tps.t[i] < tps.t[i - 1])
            throw std::invalid_argument("testpoints must be nondecreasing");
}

SampledEcdf sampled_ecdf(std::span<const double> z, const TestpointSet& tps) {
    validate(tps);
    if (z.empty()) throw std::invalid_argument("sampled_ecdf: need at least one sample");
    const auto& t = tps.t;
    std::vector<std::int64_t> region(t.size() + 1, 0);
    for (const double v : z) {
        const auto idx = std::lower_bound(t.begin(), t.end(), v) - t.begin();
        ++region[static_cast<std::size_t>(idx)];
    }
    SampledEcdf out;
    out.n_samples = static_cast<int>(z.size());
    out.x.resize(t.size());
    std::int64_t below = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        below += region[i];
        out.x[i] = static_cast<double>(below) / static_cast<double>(z.size());
    }
    return out;
}

}  // namespace modclass
