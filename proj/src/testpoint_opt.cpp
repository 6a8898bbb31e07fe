#include "modclass/testpoint_opt.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace modclass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Window {
    double lo, hi;
};

Window support_window(const std::vector<const FeatureCdf*>& mixes) {
    double mean_lo = kInf, mean_hi = -kInf, std_max = 0.0;
    for (const auto* f : mixes) {
        for (const auto& c : f->components) {
            mean_lo = std::min(mean_lo, c.mean);
            mean_hi = std::max(mean_hi, c.mean);
        }
        std_max = std::max(std_max, f->component_std);
    }
    return {mean_lo - 5.0 * std_max, mean_hi + 5.0 * std_max};
}

double pooled_cdf(const std::vector<const FeatureCdf*>& mixes, double z) {
    double acc = 0.0;
    for (const auto* f : mixes) acc += f->cdf(z);
    return acc / static_cast<double>(mixes.size());
}

// Inverse of the pooled CDF by bisection over the support window.
double pooled_quantile(const std::vector<const FeatureCdf*>& mixes, const Window& w, double level) {
    double lo = w.lo, hi = w.hi;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pooled_cdf(mixes, mid) < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double log_det_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// -sum of pairwise D_B, +inf when infeasible; the quantity Nelder-Mead sees.
class Objective {
public:
    Objective(std::vector<const FeatureCdf*> mixes, int n_samples, double floor)
        : mixes_(std::move(mixes)), n_samples_(n_samples), floor_(floor) {}

    double operator()(const std::vector<double>& t) const {
        const auto L = static_cast<Eigen::Index>(t.size());
        std::vector<ClassStatistics> stats;
        stats.reserve(mixes_.size());
        for (const auto* f : mixes_) {
            ClassStatistics s;
            s.mu.resize(L);
            double prev = 0.0;
            for (Eigen::Index i = 0; i <= L; ++i) {
                const double cur = (i < L) ? f->cdf(t[static_cast<std::size_t>(i)]) : 1.0;
                if (cur - prev < floor_) return kInf;
                if (i < L) s.mu[i] = cur;
                prev = cur;
            }
            s.sigma.resize(L, L);
            for (Eigen::Index i = 0; i < L; ++i)
                for (Eigen::Index j = 0; j < L; ++j)
                    s.sigma(i, j) = s.mu[std::min(i, j)] * (1.0 - s.mu[std::max(i, j)]) /
                                    static_cast<double>(n_samples_);
            stats.push_back(std::move(s));
        }
        double total = 0.0;
        for (std::size_t i = 0; i < stats.size(); ++i)
            for (std::size_t j = i + 1; j < stats.size(); ++j) {
                try {
                    total += bhattacharyya(stats[i], stats[j]);
                } catch (const std::runtime_error&) {
                    return kInf;
                }
            }
        return -total;
    }

private:
    std::vector<const FeatureCdf*> mixes_;
    int n_samples_;
    double floor_;
};

std::vector<double> t_to_u(const std::vector<double>& t) {
    std::vector<double> u(t.size());
    u[0] = t[0];
    for (std::size_t i = 1; i < t.size(); ++i)
        u[i] = std::log(std::max(t[i] - t[i - 1], 1e-12));
    return u;
}

std::vector<double> u_to_t(const std::vector<double>& u) {
    std::vector<double> t(u.size());
    t[0] = u[0];
    for (std::size_t i = 1; i < u.size(); ++i) t[i] = t[i - 1] + std::exp(u[i]);
    return t;
}

// Crossings of every class pair, pooled and sorted.
std::vector<double> pooled_crossings(const std::vector<const FeatureCdf*>& mixes) {
    std::vector<double> all;
    for (std::size_t i = 0; i < mixes.size(); ++i)
        for (std::size_t j = i + 1; j < mixes.size(); ++j) {
            const auto cr = pdf_crossings(*mixes[i], *mixes[j]);
            all.insert(all.end(), cr.begin(), cr.end());
        }
    std::sort(all.begin(), all.end());
    return all;
}

// Linear resampling of sorted knots to exactly L points.
std::vector<double> resample(const std::vector<double>& knots, int L) {
    std::vector<double> out;
    if (knots.size() < 2) return out;
    out.reserve(static_cast<std::size_t>(L));
    const double last = static_cast<double>(knots.size() - 1);
    for (int i = 0; i < L; ++i) {
        const double pos = (L == 1) ? 0.5 * last : last * static_cast<double>(i) / (L - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        out.push_back(lo + 1 < knots.size() ? knots[lo] * (1.0 - frac) + knots[lo + 1] * frac
                                            : knots[lo]);
    }
    return out;
}

std::vector<std::vector<double>> default_starts(const std::vector<const FeatureCdf*>& mixes,
                                                const Window& w, int L) {
    std::vector<std::vector<double>> starts;
    std::vector<double> quantiles;
    for (int i = 1; i <= L; ++i)
        quantiles.push_back(pooled_quantile(mixes, w, static_cast<double>(i) / (L + 1)));
    starts.push_back(std::move(quantiles));
    const auto cr = pooled_crossings(mixes);
    if (auto rs = resample(cr, L); !rs.empty()) starts.push_back(std::move(rs));
    if (static_cast<int>(cr.size()) >= L)
        for (std::size_t o = 0; o + static_cast<std::size_t>(L) <= cr.size(); ++o)
            starts.emplace_back(cr.begin() + static_cast<std::ptrdiff_t>(o),
                                cr.begin() + static_cast<std::ptrdiff_t>(o) + L);
    return starts;
}

OptimizedTestpoints search(std::vector<const FeatureCdf*> mixes, int n_samples, int L,
                           double floor, const std::vector<std::vector<double>>& init) {
    // canonical class order: results do not depend on how callers list classes
    std::sort(mixes.begin(), mixes.end(), [](const FeatureCdf* x, const FeatureCdf* y) {
        return std::tie(x->class_name, x->sigma2) < std::tie(y->class_name, y->sigma2);
    });
    const Window w = support_window(mixes);
    const Objective objective(mixes, n_samples, floor);
    auto starts = default_starts(mixes, w, L);
    for (const auto& s : init)
        if (static_cast<int>(s.size()) == L) starts.push_back(s);

    std::vector<double> best_t;
    double best_f = kInf;
    for (auto& start : starts) {
        std::sort(start.begin(), start.end());
        if (objective(start) == kInf) continue;  // infeasible start, skip
        std::vector<double> u = t_to_u(start);
        const double f = nelder_mead([&objective](const std::vector<double>& uu) {
                                         return objective(u_to_t(uu));
                                     },
                                     u, 2000, 1e-9);
        if (f < best_f) {
            best_f = f;
            best_t = u_to_t(u);
        }
    }
    if (!(best_f < kInf))
        throw std::runtime_error("optimize_testpoints: no feasible placement for " +
                                 std::to_string(L) + " testpoints under the region-mass floor");
    OptimizedTestpoints out;
    out.testpoints.t = std::move(best_t);
    out.bhattacharyya_distance = -best_f;
    return out;
}

}  // namespace

std::vector<double> pdf_crossings(const FeatureCdf& a, const FeatureCdf& b) {
    const Window w = support_window({&a, &b});
    constexpr int kGrid = 2048;
    // sign of pdf_a - pdf_b through the log densities, which stay finite in
    // regions where both densities underflow to zero
    const auto diff = [&](double z) { return a.log_pdf(z) - b.log_pdf(z); };
    std::vector<double> roots;
    double prev_z = w.lo, prev_d = diff(w.lo);
    for (int i = 1; i < kGrid; ++i) {
        const double z = w.lo + (w.hi - w.lo) * static_cast<double>(i) / (kGrid - 1);
        const double d = diff(z);
        if (prev_d != 0.0 && d != 0.0 && std::signbit(prev_d) != std::signbit(d)) {
            double lo = prev_z, hi = z, dlo = prev_d;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double dm = diff(mid);
                if (dm == 0.0 || std::signbit(dm) != std::signbit(dlo)) {
                    hi = mid;
                } else {
                    lo = mid;
                    dlo = dm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_z = z;
        prev_d = d;
    }
    return roots;
}

double bhattacharyya(const ClassStatistics& a, const ClassStatistics& b) {
    if (a.mu.size() != b.mu.size())
        throw std::invalid_argument("bhattacharyya: dimension mismatch");
    const Eigen::MatrixXd avg = 0.5 * (a.sigma + b.sigma);
    Eigen::LLT<Eigen::MatrixXd> llt_avg(avg);
    Eigen::LLT<Eigen::MatrixXd> llt_a(a.sigma);
    Eigen::LLT<Eigen::MatrixXd> llt_b(b.sigma);
    if (llt_avg.info() != Eigen::Success || llt_a.info() != Eigen::Success ||
        llt_b.info() != Eigen::Success)
        throw std::runtime_error("bhattacharyya: covariance is not positive definite");
    const Eigen::VectorXd d = a.mu - b.mu;
    const double mahalanobis = d.dot(llt_avg.solve(d));
    return 0.125 * mahalanobis +
           0.5 * (log_det_llt(llt_avg) - 0.5 * (log_det_llt(llt_a) + log_det_llt(llt_b)));
}

double default_region_floor(int n_samples) {
    return std::max(kMinRegionMass, 5.0 / static_cast<double>(n_samples));
}

double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double>& x, int max_evals, double ftol) {
    const std::size_t n = x.size();
    int evals = 0;
    const auto eval = [&](const std::vector<double>& p) {
        ++evals;
        return f(p);
    };

    std::vector<std::vector<double>> simplex(n + 1, x);
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += 0.25;
    for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

    const auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            s2[k] = simplex[idx[k]];
            f2[k] = fx[idx[k]];
        }
        simplex.swap(s2);
        fx.swap(f2);
    };
    order();

    while (evals < max_evals) {
        const double best_before = fx[0];
        // centroid of all but the worst vertex
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);

        const auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + coef * (simplex[n][d] - centroid[d]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = eval(reflected);
        if (fr < fx[0]) {
            const auto expanded = blend(-2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                fx[n] = fe;
            } else {
                simplex[n] = reflected;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            simplex[n] = reflected;
            fx[n] = fr;
        } else {
            const bool outside = fr < fx[n];
            const auto contracted = blend(outside ? -0.5 : 0.5);
            const double fc = eval(contracted);
            if (fc < (outside ? fr : fx[n])) {
                simplex[n] = contracted;
                fx[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
                    fx[i] = eval(simplex[i]);
                }
            }
        }
        order();
        if (best_before - fx[0] < ftol && std::isfinite(fx[0])) break;
    }
    x = simplex[0];
    return fx[0];
}

OptimizedTestpoints optimize_testpoints(const PairContext& ctx,
                                        const std::vector<std::vector<double>>& init) {
    if (ctx.num_testpoints < 1)
        throw std::invalid_argument("optimize_testpoints: need at least one testpoint");
    if (ctx.n_samples < 1) throw std::invalid_argument("optimize_testpoints: n_samples must be >= 1");
    const double floor =
        ctx.min_region_mass > 0.0 ? ctx.min_region_mass : default_region_floor(ctx.n_samples);
    auto out = search({&ctx.a, &ctx.b}, ctx.n_samples, ctx.num_testpoints, floor, init);
    return out;
}

OptimizedTestpoints multiclass_testpoints(const std::vector<FeatureCdf>& classes, int n_samples,
                                          int num_testpoints, double min_region_mass,
                                          const std::vector<std::vector<double>>& init) {
    if (classes.size() < 2) throw std::invalid_argument("multiclass_testpoints: need >= 2 classes");
    if (num_testpoints < 1)
        throw std::invalid_argument("multiclass_testpoints: need at least one testpoint");
    std::vector<const FeatureCdf*> mixes;
    mixes.reserve(classes.size());
    for (const auto& f : classes) mixes.push_back(&f);
    const double floor =
        min_region_mass > 0.0 ? min_region_mass : default_region_floor(n_samples);
    return search(mixes, n_samples, num_testpoints, floor, init);
}

std::vector<OptimizedTestpoints> sweep_testpoints(const std::vector<FeatureCdf>& classes,
                                                  int n_samples, int max_testpoints,
                                                  double min_region_mass) {
    std::vector<const FeatureCdf*> mixes;
    for (const auto& f : classes) mixes.push_back(&f);
    const Window w = support_window(mixes);
    std::vector<OptimizedTestpoints> out;
    std::vector<double> prev;
    for (int L = 1; L <= max_testpoints; ++L) {
        std::vector<std::vector<double>> extra;
        if (!prev.empty()) {
            // insert one point at the widest pooled-CDF gap of the previous
            // optimum; adding a coordinate can only grow D_B
            std::vector<double> levels{0.01};
            for (const double t : prev) levels.push_back(pooled_cdf(mixes, t));
            levels.push_back(0.99);
            std::size_t widest = 0;
            for (std::size_t i = 1; i + 1 < levels.size(); ++i)
                if (levels[i + 1] - levels[i] > levels[widest + 1] - levels[widest]) widest = i;
            const double mid_level = 0.5 * (levels[widest] + levels[widest + 1]);
            std::vector<double> nested = prev;
            nested.push_back(pooled_quantile(mixes, w, mid_level));
            std::sort(nested.begin(), nested.end());
            extra.push_back(std::move(nested));
        }
        out.push_back(multiclass_testpoints(classes, n_samples, L, min_region_mass, extra));
        prev = out.back().testpoints.t;
    }
    return out;
}

}  // namespace modclass
