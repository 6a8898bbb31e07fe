#include "modclass/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace modclass {

int ml_classify(const SymbolBlock& block,
                const std::vector<std::pair<Constellation, double>>& classes,
                const std::vector<double>& priors) {
    if (classes.empty()) throw std::invalid_argument("ml_classify: no classes");
    validate_priors(priors, classes.size());
    std::vector<double> scores;
    scores.reserve(classes.size());
    std::vector<double> exponents;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const auto& [c, sigma2] = classes[k];
        exponents.resize(c.points.size());
        double ll = 0.0;
        for (const auto& r : block.received) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < c.points.size(); ++m) {
                exponents[m] = -std::norm(r - c.points[m]) / sigma2;
                mx = std::max(mx, exponents[m]);
            }
            double sum = 0.0;
            for (const double e : exponents) sum += std::exp(e - mx);
            ll += mx + std::log(sum);
        }
        ll -= static_cast<double>(block.received.size()) *
              std::log(M_PI * sigma2 * static_cast<double>(c.points.size()));
        scores.push_back(ll + (priors[k] > 0.0 ? std::log(priors[k])
                                               : -std::numeric_limits<double>::infinity()));
    }
    return argmax_index(scores);
}

double kuiper_statistic(const std::vector<double>& sorted_z,
                        const std::function<double(double)>& cdf) {
    const auto n = static_cast<double>(sorted_z.size());
    if (sorted_z.empty()) throw std::invalid_argument("kuiper_statistic: empty sample");
    double d_plus = 0.0, d_minus = 0.0;
    for (std::size_t i = 0; i < sorted_z.size(); ++i) {
        const double f = cdf(sorted_z[i]);
        d_plus = std::max(d_plus, (static_cast<double>(i) + 1.0) / n - f);
        d_minus = std::max(d_minus, f - static_cast<double>(i) / n);
    }
    return d_plus + d_minus;
}

int kuiper_classify(const std::vector<double>& z, const std::vector<FeatureCdf>& classes) {
    if (classes.empty()) throw std::invalid_argument("kuiper_classify: no classes");
    std::vector<double> sorted_z(z);
    std::sort(sorted_z.begin(), sorted_z.end());
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const auto& f = classes[k];
        const double d = kuiper_statistic(sorted_z, [&f](double v) { return f.cdf(v); });
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

double rck_statistic(const SampledEcdf& x, const std::vector<double>& mu) {
    if (x.x.size() != mu.size())
        throw std::invalid_argument("rck_statistic: feature and mean lengths differ");
    double d_plus = 0.0, d_minus = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        d_plus = std::max(d_plus, x.x[i] - mu[i]);
        d_minus = std::max(d_minus, mu[i] - x.x[i]);
    }
    return std::max(d_plus, 0.0) + std::max(d_minus, 0.0);
}

int rck_classify(const SampledEcdf& x, const std::vector<std::vector<double>>& class_means) {
    if (class_means.empty()) throw std::invalid_argument("rck_classify: no classes");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < class_means.size(); ++k) {
        const double d = rck_statistic(x, class_means[k]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

VdModel build_vd_model(const std::vector<FeatureCdf>& classes, const TestpointSet& crossings) {
    if (classes.size() < 2) throw std::invalid_argument("build_vd_model: need >= 2 classes");
    validate(crossings);
    VdModel model;
    model.snr_db = crossings.snr_db;
    model.testpoints = crossings;
    for (const auto& f : classes) {
        model.class_names.push_back(f.class_name);
        // The L1 statistic is well defined for empty regions, so unlike the
        // covariance-based models VD puts no floor on the masses.
        std::vector<double> p;
        double prev = 0.0;
        for (std::size_t i = 0; i <= crossings.t.size(); ++i) {
            const double cur = (i < crossings.t.size()) ? f.cdf(crossings.t[i]) : 1.0;
            p.push_back(std::max(cur - prev, 0.0));
            prev = cur;
        }
        model.region_masses.push_back(std::move(p));
    }
    return model;
}

int vd_classify(const SampledEcdf& x, const VdModel& model) {
    if (x.x.size() != model.testpoints.t.size())
        throw std::invalid_argument("vd_classify: feature length does not match model");
    std::vector<double> d(x.x.size() + 1);
    double prev = 0.0;
    for (std::size_t i = 0; i <= x.x.size(); ++i) {
        const double cur = (i < x.x.size()) ? x.x[i] : 1.0;
        d[i] = cur - prev;
        prev = cur;
    }
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < model.region_masses.size(); ++k) {
        double dist = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) dist += std::abs(d[i] - model.region_masses[k][i]);
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(k);
        }
    }
    return best;
}

}  // namespace modclass
