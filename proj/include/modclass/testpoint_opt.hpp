#pragma once

#include <vector>

#include "modclass/bayes.hpp"
#include "modclass/distributions.hpp"

namespace modclass {

// Roots of pdf_A - pdf_B (equivalently, extrema of F_A - F_B) inside the
// window [mu_min - 5*std, mu_max + 5*std], located by sign-change bracketing
// on a 2048-point grid and bisection to width 1e-10. Identical mixtures
// return an empty list.
std::vector<double> pdf_crossings(const FeatureCdf& a, const FeatureCdf& b);

// Bhattacharyya distance between two Gaussian classes:
//   1/8 (mu_a-mu_b)' [(S_a+S_b)/2]^-1 (mu_a-mu_b)
// + 1/2 ln( |(S_a+S_b)/2| / sqrt(|S_a||S_b|) ),
// log-determinants via Cholesky. Throws on non-PD input.
double bhattacharyya(const ClassStatistics& a, const ClassStatistics& b);

// Search context for one pair (or set) of classes. `min_region_mass` is the
// feasibility floor applied inside the search: besides the kMinRegionMass
// covariance guard, each region must keep at least ~5 expected samples so
// the Gaussian approximation behind the objective stays valid. Without that
// floor the objective rewards near-empty tail regions for their variance
// ratio, which carries no real multinomial information.
struct PairContext {
    FeatureCdf a;
    FeatureCdf b;
    int n_samples = 0;
    int num_testpoints = 0;
    double min_region_mass = 0.0;  // 0 => max(kMinRegionMass, 5/N)
};

double default_region_floor(int n_samples);

struct OptimizedTestpoints {
    TestpointSet testpoints;
    double bhattacharyya_distance = 0.0;
};

// Maximizes D_B over ordered testpoint vectors by multi-start Nelder-Mead in
// the reparameterization t_1 = u_1, t_{i+1} = t_i + exp(u_{i+1}) (ordering by
// construction). Default starts: the pdf-crossings resampled to length L,
// contiguous crossing windows and equally spaced quantiles of the pooled
// mixture; `init` adds extra starting vectors. Stops a run when a full
// iteration improves D_B by < 1e-9 or after 2000 evaluations.
OptimizedTestpoints optimize_testpoints(const PairContext& ctx,
                                        const std::vector<std::vector<double>>& init = {});

// Joint search for K >= 2 classes maximizing the sum of pairwise D_B (equals
// optimize_testpoints when K = 2).
OptimizedTestpoints multiclass_testpoints(const std::vector<FeatureCdf>& classes, int n_samples,
                                          int num_testpoints, double min_region_mass = 0.0,
                                          const std::vector<std::vector<double>>& init = {});

// L = 1..max_testpoints sweep where each level's starts include the previous
// optimum with one point inserted at the widest pooled-CDF gap, which makes
// the achieved D_B nondecreasing in L.
std::vector<OptimizedTestpoints> sweep_testpoints(const std::vector<FeatureCdf>& classes,
                                                  int n_samples, int max_testpoints,
                                                  double min_region_mass = 0.0);

// Generic Nelder-Mead minimizer used by the searches above.
double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double>& x, int max_evals, double ftol);

}  // namespace modclass
