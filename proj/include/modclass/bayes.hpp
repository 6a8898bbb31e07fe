#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "modclass/distributions.hpp"

namespace modclass {

// Probability mass of each of the L+1 regions cut by the testpoints, with
// virtual endpoints at -inf and +inf. Every mass is >= kMinRegionMass.
struct RegionProbabilities {
    std::vector<double> p;
};

// Throws std::invalid_argument naming the offending testpoint pair when a
// region of F captures less than kMinRegionMass.
RegionProbabilities region_probabilities(const FeatureCdf& f, const TestpointSet& tps);

// n_l = round(N * (x_l - x_{l-1})) with x_0 = 0, x_{L+1} = 1. Inputs are
// exact multiples of 1/N, so rounding only absorbs float noise.
std::vector<std::int64_t> region_counts(const SampledEcdf& x);

// log of the multinomial pmf; -inf when some n_i > 0 has p_i = 0.
double multinomial_log_pmf(const std::vector<std::int64_t>& counts,
                           const RegionProbabilities& p);

struct Classification {
    int index = 0;                // argmax class; ties go to the lowest index
    std::vector<double> scores;   // per-class discriminant values
};

// Exact Bayes rule on the multinomial region counts: argmax of
// log pmf + log prior.
Classification exact_bayes_classify(const SampledEcdf& x,
                                    const std::vector<RegionProbabilities>& classes,
                                    const std::vector<double>& priors);

// Asymptotic Gaussian statistics of the sampled-ECDF feature for one class:
// mu_i = F(t_i), Sigma_ij = F(t_min)(1 - F(t_max)) / N.
struct ClassStatistics {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
};

ClassStatistics class_statistics(const FeatureCdf& f, const TestpointSet& tps, int n_samples);

// One class of the quadratic discriminant g(x) = x'Wx + w'x + w0.
struct QuadraticDiscriminant {
    Eigen::MatrixXd W;
    Eigen::VectorXd w;
    double w0 = 0.0;
};

// W = -1/2 Sigma^-1, w = Sigma^-1 mu,
// w0 = -1/2 mu'Sigma^-1 mu - 1/2 log|Sigma| + log prior,
// all through Cholesky factorization. Throws on a non-PD covariance.
std::vector<QuadraticDiscriminant> build_discriminants(
    const std::vector<ClassStatistics>& stats, const std::vector<double>& priors);

// Stored classifier: everything needed to classify a block at one
// (testpoint set, N, SNR) triple.
struct DiscriminantClass {
    std::string name;
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    QuadraticDiscriminant g;
};

struct DiscriminantModel {
    double snr_db = 0.0;
    int n_samples = 0;  // expected feature length N = 2M
    TestpointSet testpoints;
    std::vector<double> priors;
    std::vector<DiscriminantClass> classes;
};

DiscriminantModel build_discriminant_model(const std::vector<FeatureCdf>& class_cdfs,
                                           const TestpointSet& tps, int n_samples,
                                           const std::vector<double>& priors);

Classification discriminant_classify(const DiscriminantModel& model, const SampledEcdf& x);

// Shared argmax with deterministic lowest-index tie-breaking.
int argmax_index(const std::vector<double>& scores);

void validate_priors(const std::vector<double>& priors, std::size_t n_classes);

}  // namespace modclass
