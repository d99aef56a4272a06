#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "shapedepth/depth.hpp"
#include "shapedepth/errors.hpp"
#include "shapedepth/halfspace.hpp"
#include "shapedepth/rng.hpp"
#include "shapedepth/spd.hpp"

// Minimum covariance determinant subset search (FAST-MCD style concentration
// steps) and the depth-versus-gamma selection curve built on top of it.

namespace shapedepth {

struct McdResult {
    double gamma = 1.0;
    std::vector<int> subset;  // sorted indices, |subset| = ceil(gamma n)
    Eigen::MatrixXd scatter;
    ShapeMatrix shape;
    double determinant = 0.0;
};

namespace detail {

struct MeanCov {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // Bessel-corrected
};

inline MeanCov subset_mean_cov(const Eigen::MatrixXd& data, const std::vector<int>& subset) {
    const int k = static_cast<int>(data.cols());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    for (int i : subset) mean += data.row(i).transpose();
    mean /= static_cast<double>(subset.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
    for (int i : subset) {
        const Eigen::VectorXd c = data.row(i).transpose() - mean;
        cov.noalias() += c * c.transpose();
    }
    cov /= static_cast<double>(subset.size() - 1);
    return {std::move(mean), std::move(cov)};
}

// h indices of smallest Mahalanobis distance, ties broken by index.
inline std::vector<int> h_closest(const Eigen::MatrixXd& data, const MeanCov& mc, int h) {
    const Eigen::MatrixXd inv = mc.cov.inverse();
    const Eigen::Index n = data.rows();
    std::vector<std::pair<double, int>> dist(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd c = data.row(i).transpose() - mc.mean;
        dist[i] = {c.dot(inv * c), static_cast<int>(i)};
    }
    std::sort(dist.begin(), dist.end());
    std::vector<int> subset(h);
    for (int i = 0; i < h; ++i) subset[i] = dist[i].second;
    std::sort(subset.begin(), subset.end());
    return subset;
}

inline bool usable_cov(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) return false;
    const double floor = 1e-12 * std::max(cov.trace(), 0.0) / static_cast<double>(cov.rows());
    return es.eigenvalues().minCoeff() > std::max(floor, 1e-300);
}

struct Chain {
    std::vector<int> subset;
    MeanCov mc;
    double det = 0.0;
    bool converged = false;
};

// Concentration steps from a given subset. The determinant is nonincreasing
// across steps; a singular iterate marks the chain as failed.
inline bool run_c_steps(const Eigen::MatrixXd& data, int h, Chain& chain, int max_steps) {
    chain.mc = subset_mean_cov(data, chain.subset);
    if (!usable_cov(chain.mc.cov)) return false;
    chain.det = chain.mc.cov.determinant();
    for (int step = 0; step < max_steps; ++step) {
        std::vector<int> next = h_closest(data, chain.mc, h);
        if (next == chain.subset) {
            chain.converged = true;
            return true;
        }
        MeanCov mc = subset_mean_cov(data, next);
        if (!usable_cov(mc.cov)) return false;
        const double det = mc.cov.determinant();
        if (det > chain.det * (1.0 + 1e-9))
            throw std::logic_error("mcd: concentration step increased the determinant");
        chain.subset = std::move(next);
        chain.mc = std::move(mc);
        chain.det = det;
    }
    return true;  // step budget exhausted; keep the current iterate
}

}  // namespace detail

// Best subset of size h = ceil(gamma n) by determinant. Starts are random
// (k+1)-point seeds expanded to the h nearest points; all starts get two
// concentration steps, the ten best run to convergence. gamma = 1 returns
// the full-sample covariance without any search.
inline McdResult mcd_subset(const Eigen::MatrixXd& data, double gamma, int n_starts = 100,
                            std::uint64_t seed = 0) {
    detail::require_cloud(data);
    if (!(gamma >= 0.5 && gamma <= 1.0)) throw std::domain_error("mcd_subset: gamma must lie in [0.5, 1]");
    if (n_starts < 1) throw std::domain_error("mcd_subset: n_starts must be >= 1");
    const int n = static_cast<int>(data.rows());
    const int k = static_cast<int>(data.cols());
    const int h = static_cast<int>(std::ceil(gamma * n));
    if (h <= k) throw std::domain_error("mcd_subset: subset size ceil(gamma n) must exceed the dimension");

    const auto finish = [&](std::vector<int> subset) {
        detail::MeanCov mc = detail::subset_mean_cov(data, subset);
        if (!detail::usable_cov(mc.cov))
            throw convergence_error("mcd_subset: winning subset has a singular covariance", 0.0);
        McdResult res;
        res.gamma = gamma;
        res.subset = std::move(subset);
        res.determinant = mc.cov.determinant();
        res.shape = normalize_to_shape(mc.cov);
        res.scatter = std::move(mc.cov);
        return res;
    };

    if (h >= n) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        return finish(std::move(all));
    }

    Rng rng(seed);
    std::vector<detail::Chain> chains;
    chains.reserve(n_starts);
    for (int s = 0; s < n_starts; ++s) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(s));
        // (k+1)-point seed, grown until its covariance is nonsingular.
        std::vector<int> seed_idx;
        while (static_cast<int>(seed_idx.size()) < std::min(k + 1, n)) {
            const int i = static_cast<int>(sub.next_u64() % static_cast<std::uint64_t>(n));
            if (std::find(seed_idx.begin(), seed_idx.end(), i) == seed_idx.end()) seed_idx.push_back(i);
        }
        detail::MeanCov mc = detail::subset_mean_cov(data, seed_idx);
        while (!detail::usable_cov(mc.cov) && static_cast<int>(seed_idx.size()) < n) {
            const int i = static_cast<int>(sub.next_u64() % static_cast<std::uint64_t>(n));
            if (std::find(seed_idx.begin(), seed_idx.end(), i) != seed_idx.end()) continue;
            seed_idx.push_back(i);
            mc = detail::subset_mean_cov(data, seed_idx);
        }
        if (!detail::usable_cov(mc.cov)) continue;

        detail::Chain chain;
        chain.subset = detail::h_closest(data, mc, h);
        if (detail::run_c_steps(data, h, chain, 2)) chains.push_back(std::move(chain));
    }
    if (chains.empty()) throw convergence_error("mcd_subset: every start produced a singular covariance", 0.0);

    const auto chain_less = [](const detail::Chain& a, const detail::Chain& b) {
        if (a.det != b.det) return a.det < b.det;
        return a.subset < b.subset;
    };
    std::sort(chains.begin(), chains.end(), chain_less);
    const std::size_t keep = std::min<std::size_t>(10, chains.size());

    detail::Chain best;
    bool have_best = false;
    for (std::size_t c = 0; c < keep; ++c) {
        detail::Chain chain = chains[c];
        if (!chain.converged && !detail::run_c_steps(data, h, chain, 200)) continue;
        if (!have_best || chain_less(chain, best)) {
            best = std::move(chain);
            have_best = true;
        }
    }
    if (!have_best) throw convergence_error("mcd_subset: refinement left no usable chain", 0.0);
    return finish(std::move(best.subset));
}

struct GammaCurveEntry {
    double gamma = 0.0;
    DepthValue depth;
    int subset_size = 0;
};

using GammaCurve = std::vector<GammaCurveEntry>;

// The selection curve: for each gamma, the depth of the MCD shape with
// respect to the empirical measure of its own optimal subsample (plug-in
// Tukey median of the subsample).
inline GammaCurve gamma_depth_curve(const Eigen::MatrixXd& data, const std::vector<double>& gammas,
                                    int n_starts = 100, std::uint64_t seed = 0,
                                    const DirectionBudget& budget = {}) {
    for (std::size_t g = 1; g < gammas.size(); ++g)
        if (!(gammas[g - 1] < gammas[g])) throw std::domain_error("gamma_depth_curve: gammas must be increasing");
    GammaCurve curve;
    curve.reserve(gammas.size());
    Rng rng(seed);
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        const McdResult res = mcd_subset(data, gammas[g], n_starts, rng.substream(g).next_u64());
        Eigen::MatrixXd rows(res.subset.size(), data.cols());
        for (std::size_t i = 0; i < res.subset.size(); ++i) rows.row(i) = data.row(res.subset[i]);
        curve.push_back({gammas[g], shape_depth(rows, res.shape, budget), static_cast<int>(res.subset.size())});
    }
    return curve;
}

// argmax_gamma D(V_gamma, P_reference), ties broken toward larger gamma
// (less trimming).
inline std::pair<double, DepthValue> select_gamma_max_depth(const Eigen::MatrixXd& data,
                                                            const std::vector<double>& gammas,
                                                            const Eigen::MatrixXd& reference, int n_starts = 100,
                                                            std::uint64_t seed = 0,
                                                            const DirectionBudget& budget = {}) {
    if (gammas.empty()) throw std::domain_error("select_gamma_max_depth: empty gamma grid");
    for (std::size_t g = 1; g < gammas.size(); ++g)
        if (!(gammas[g - 1] < gammas[g]))
            throw std::domain_error("select_gamma_max_depth: gammas must be increasing");
    const Eigen::VectorXd theta_ref = tukey_median(reference, budget);
    Rng rng(seed);
    double best_gamma = gammas.front();
    DepthValue best{-1, 1};
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        const McdResult res = mcd_subset(data, gammas[g], n_starts, rng.substream(g).next_u64());
        const DepthValue d = shape_depth_fixed_theta(reference, theta_ref, res.shape, budget);
        if (d >= best) {  // ascending grid: ties move toward larger gamma
            best = d;
            best_gamma = gammas[g];
        }
    }
    return {best_gamma, best};
}

}  // namespace shapedepth
