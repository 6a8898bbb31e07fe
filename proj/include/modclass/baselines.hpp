#pragma once

#include <functional>
#include <string>
#include <vector>

#include "modclass/bayes.hpp"
#include "modclass/channel.hpp"
#include "modclass/distributions.hpp"

namespace modclass {

// Exact maximum-likelihood classifier on the raw symbols: per-sample complex
// Gaussian mixture log-likelihood, log-sum-exp stabilized. O(M * |points|)
// per class.
int ml_classify(const SymbolBlock& block,
                const std::vector<std::pair<Constellation, double>>& classes,
                const std::vector<double>& priors);

// Kuiper distance between the ECDF of `sorted_z` and a candidate CDF:
// max positive deviation plus max negative deviation, evaluated at the
// sample order statistics from both sides (exact for step functions).
double kuiper_statistic(const std::vector<double>& sorted_z,
                        const std::function<double(double)>& cdf);

// Full-ECDF Kuiper classifier: argmin distance over candidate classes.
int kuiper_classify(const std::vector<double>& z, const std::vector<FeatureCdf>& classes);

// Kuiper-style distance restricted to the testpoints:
// max_i (x_i - mu_i)^+ + max_i (mu_i - x_i)^+.
double rck_statistic(const SampledEcdf& x, const std::vector<double>& mu);

int rck_classify(const SampledEcdf& x, const std::vector<std::vector<double>>& class_means);

// Variational-distance classifier: testpoints at the pdf-crossings, decision
// by the L1 distance between observed and expected region masses.
struct VdModel {
    double snr_db = 0.0;
    TestpointSet testpoints;
    std::vector<std::string> class_names;
    std::vector<std::vector<double>> region_masses;  // per class, L+1 entries
};

VdModel build_vd_model(const std::vector<FeatureCdf>& classes, const TestpointSet& crossings);

int vd_classify(const SampledEcdf& x, const VdModel& model);

}  // namespace modclass
