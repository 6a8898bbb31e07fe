#include "modclass/bayes.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace modclass {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Cholesky factor or an exception; shared by all covariance consumers.
Eigen::LLT<Eigen::MatrixXd> cholesky_or_throw(const Eigen::MatrixXd& sigma,
                                              const char* context) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(std::string(context) + ": covariance is not positive definite");
    return llt;
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

int argmax_index(const std::vector<double>& scores) {
    int best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] > scores[best]) best = static_cast<int>(k);
    return best;
}

void validate_priors(const std::vector<double>& priors, std::size_t n_classes) {
    if (priors.size() != n_classes)
        throw std::invalid_argument("priors size does not match number of classes");
    double sum = 0.0;
    for (const double p : priors) {
        if (p < 0.0) throw std::invalid_argument("priors must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("priors must sum to 1");
}

RegionProbabilities region_probabilities(const FeatureCdf& f, const TestpointSet& tps) {
    validate(tps);
    RegionProbabilities out;
    out.p.reserve(tps.t.size() + 1);
    double prev = 0.0;
    for (std::size_t i = 0; i <= tps.t.size(); ++i) {
        const double cur = (i < tps.t.size()) ? f.cdf(tps.t[i]) : 1.0;
        const double mass = cur - prev;
        if (mass < kMinRegionMass) {
            std::ostringstream msg;
            msg << "testpoint region (" << (i == 0 ? "-inf" : std::to_string(tps.t[i - 1]))
                << ", " << (i == tps.t.size() ? "+inf" : std::to_string(tps.t[i]))
                << ") captures mass " << mass << " < " << kMinRegionMass << " for class '"
                << f.class_name << "'";
            throw std::invalid_argument(msg.str());
        }
        out.p.push_back(mass);
        prev = cur;
    }
    return out;
}

std::vector<std::int64_t> region_counts(const SampledEcdf& x) {
    std::vector<std::int64_t> n(x.x.size() + 1);
    double prev = 0.0;
    for (std::size_t i = 0; i <= x.x.size(); ++i) {
        const double cur = (i < x.x.size()) ? x.x[i] : 1.0;
        n[i] = std::llround(static_cast<double>(x.n_samples) * (cur - prev));
        prev = cur;
    }
    return n;
}

double multinomial_log_pmf(const std::vector<std::int64_t>& counts,
                           const RegionProbabilities& p) {
    if (counts.size() != p.p.size())
        throw std::invalid_argument("multinomial_log_pmf: counts and probabilities differ in length");
    std::int64_t total = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const std::int64_t n = counts[i];
        if (n < 0) throw std::invalid_argument("multinomial_log_pmf: negative count");
        total += n;
        if (n == 0) continue;
        if (p.p[i] <= 0.0) return kNegInf;
        acc += static_cast<double>(n) * std::log(p.p[i]) - std::lgamma(static_cast<double>(n) + 1.0);
    }
    return acc + std::lgamma(static_cast<double>(total) + 1.0);
}

Classification exact_bayes_classify(const SampledEcdf& x,
                                    const std::vector<RegionProbabilities>& classes,
                                    const std::vector<double>& priors) {
    if (classes.size() < 2) throw std::invalid_argument("exact_bayes_classify: need >= 2 classes");
    validate_priors(priors, classes.size());
    const auto counts = region_counts(x);
    Classification out;
    out.scores.reserve(classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const double lp = priors[k] > 0.0 ? std::log(priors[k]) : kNegInf;
        out.scores.push_back(multinomial_log_pmf(counts, classes[k]) + lp);
    }
    out.index = argmax_index(out.scores);
    return out;
}

ClassStatistics class_statistics(const FeatureCdf& f, const TestpointSet& tps, int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("class_statistics: n_samples must be >= 1");
    region_probabilities(f, tps);  // enforces the region-mass guard
    const auto L = static_cast<Eigen::Index>(tps.t.size());
    ClassStatistics s;
    s.mu.resize(L);
    for (Eigen::Index i = 0; i < L; ++i) s.mu[i] = f.cdf(tps.t[i]);
    s.sigma.resize(L, L);
    for (Eigen::Index i = 0; i < L; ++i)
        for (Eigen::Index j = 0; j < L; ++j)
            s.sigma(i, j) = s.mu[std::min(i, j)] * (1.0 - s.mu[std::max(i, j)]) /
                            static_cast<double>(n_samples);
    return s;
}

std::vector<QuadraticDiscriminant> build_discriminants(
    const std::vector<ClassStatistics>& stats, const std::vector<double>& priors) {
    validate_priors(priors, stats.size());
    std::vector<QuadraticDiscriminant> out;
    out.reserve(stats.size());
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const auto& s = stats[k];
        const auto llt = cholesky_or_throw(s.sigma, "build_discriminants");
        const Eigen::Index L = s.mu.size();
        const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(L, L));
        QuadraticDiscriminant q;
        q.W = -0.25 * (inv + inv.transpose());  // symmetrized -1/2 Sigma^-1
        q.w = llt.solve(s.mu);
        const double log_prior = priors[k] > 0.0 ? std::log(priors[k]) : kNegInf;
        q.w0 = -0.5 * s.mu.dot(q.w) - 0.5 * log_det_from_llt(llt) + log_prior;
        out.push_back(std::move(q));
    }
    return out;
}

DiscriminantModel build_discriminant_model(const std::vector<FeatureCdf>& class_cdfs,
                                           const TestpointSet& tps, int n_samples,
                                           const std::vector<double>& priors) {
    if (class_cdfs.size() < 2)
        throw std::invalid_argument("build_discriminant_model: need >= 2 classes");
    validate_priors(priors, class_cdfs.size());
    std::vector<ClassStatistics> stats;
    stats.reserve(class_cdfs.size());
    for (const auto& f : class_cdfs) stats.push_back(class_statistics(f, tps, n_samples));
    auto quads = build_discriminants(stats, priors);
    DiscriminantModel model;
    model.snr_db = tps.snr_db;
    model.n_samples = n_samples;
    model.testpoints = tps;
    model.priors = priors;
    for (std::size_t k = 0; k < class_cdfs.size(); ++k)
        model.classes.push_back({class_cdfs[k].class_name, std::move(stats[k].mu),
                                 std::move(stats[k].sigma), std::move(quads[k])});
    return model;
}

Classification discriminant_classify(const DiscriminantModel& model, const SampledEcdf& x) {
    const auto L = static_cast<Eigen::Index>(model.testpoints.t.size());
    if (static_cast<Eigen::Index>(x.x.size()) != L)
        throw std::invalid_argument("discriminant_classify: feature length does not match model");
    const Eigen::Map<const Eigen::VectorXd> xv(x.x.data(), L);
    Classification out;
    out.scores.reserve(model.classes.size());
    for (const auto& cls : model.classes)
        out.scores.push_back(xv.dot(cls.g.W * xv) + cls.g.w.dot(xv) + cls.g.w0);
    out.index = argmax_index(out.scores);
    return out;
}

}  // namespace modclass
