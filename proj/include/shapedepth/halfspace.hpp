#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "shapedepth/errors.hpp"
#include "shapedepth/rng.hpp"

// Halfspace (Tukey) depth of a query point with respect to a finite cloud:
// exact in dimensions 1 and 2, direction-sampled upper bound above, plus an
// approximate Tukey median used as the plug-in location.

namespace shapedepth {

// Depth of an empirical measure is a count over n: keep it exact.
struct DepthValue {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    // Cross-multiplied comparisons so 2/4 == 1/2.
    friend bool operator==(const DepthValue& a, const DepthValue& b) { return a.num * b.den == b.num * a.den; }
    friend bool operator<(const DepthValue& a, const DepthValue& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const DepthValue& a, const DepthValue& b) { return a.num * b.den <= b.num * a.den; }
    friend bool operator>(const DepthValue& a, const DepthValue& b) { return b < a; }
    friend bool operator>=(const DepthValue& a, const DepthValue& b) { return b <= a; }
};

// Direction sources for the sampled infimum in dimension >= 3.
struct DirectionBudget {
    int n_random = 100000;
    bool use_data_directions = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_random < 0) throw std::domain_error("DirectionBudget: n_random must be >= 0");
        if (n_random == 0 && !use_data_directions)
            throw std::domain_error("DirectionBudget: at least one direction source must be enabled");
    }
};

namespace detail {

inline void require_cloud(const Eigen::MatrixXd& points) {
    if (points.rows() == 0) throw std::domain_error("empty point cloud");
    if (!points.allFinite()) throw std::domain_error("point cloud has non-finite entries");
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kHalfPi = 0.5 * kPi;

inline double wrap_angle(double a) {
    if (a >= kTwoPi) a -= kTwoPi;
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi || a < 0.0) a = 0.0;  // rounding landed on the seam
    return a;
}

// Number of sorted angles (doubled copy appended, phi2[i+n] = phi2[i]+2pi)
// lying in the closed arc [lo, lo + pi].
inline std::int64_t count_in_closed_arc(const std::vector<double>& phi2, double lo) {
    lo = wrap_angle(lo);
    const double hi = lo + kPi;
    const auto first = std::lower_bound(phi2.begin(), phi2.end(), lo);
    const auto last = std::upper_bound(phi2.begin(), phi2.end(), hi);
    return static_cast<std::int64_t>(last - first);
}

}  // namespace detail

// d = 1: min(#{x >= 0}, #{x <= 0}) / n.
inline DepthValue origin_depth_exact_1d(const Eigen::MatrixXd& points) {
    detail::require_cloud(points);
    if (points.cols() != 1) throw dimension_error("origin_depth_exact_1d: cloud must be 1-D");
    std::int64_t nonneg = 0, nonpos = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        if (points(i, 0) >= 0.0) ++nonneg;
        if (points(i, 0) <= 0.0) ++nonpos;
    }
    return {std::min(nonneg, nonpos), points.rows()};
}

// d = 2: exact infimum over all unit directions of #{u . w_i >= 0} / n by an
// angular sweep. Candidate directions are the +-90 degree rotations of the
// data angles; the count is piecewise constant between consecutive distinct
// candidates and can only rise at a candidate itself (boundary points are
// counted on both sides), so the infimum is attained on an open arc. We
// evaluate every candidate plus the midpoint of every arc, which visits all
// sign patterns. Zero points lie in every closed halfspace. O(n log n).
inline DepthValue origin_depth_exact_2d(const Eigen::MatrixXd& points) {
    detail::require_cloud(points);
    if (points.cols() != 2) throw dimension_error("origin_depth_exact_2d: cloud must be 2-D");
    const std::int64_t n = points.rows();

    std::vector<double> phi;
    phi.reserve(n);
    std::int64_t zeros = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = points(i, 0), y = points(i, 1);
        if (x == 0.0 && y == 0.0) {
            ++zeros;
            continue;
        }
        phi.push_back(detail::wrap_angle(std::atan2(y, x)));
    }
    if (phi.empty()) return {n, n};

    std::sort(phi.begin(), phi.end());
    const std::size_t m = phi.size();
    std::vector<double> phi2(phi);
    phi2.resize(2 * m);
    for (std::size_t i = 0; i < m; ++i) phi2[m + i] = phi[i] + detail::kTwoPi;

    std::vector<double> cand;
    cand.reserve(2 * m);
    for (double a : phi) {
        cand.push_back(detail::wrap_angle(a + detail::kHalfPi));
        cand.push_back(detail::wrap_angle(a - detail::kHalfPi));
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::int64_t best = static_cast<std::int64_t>(m);
    const std::size_t c = cand.size();
    for (std::size_t j = 0; j < c; ++j) {
        const double here = cand[j];
        const double next = (j + 1 < c) ? cand[j + 1] : cand[0] + detail::kTwoPi;
        const double mid = here + 0.5 * (next - here);
        best = std::min(best, detail::count_in_closed_arc(phi2, here - detail::kHalfPi));
        best = std::min(best, detail::count_in_closed_arc(phi2, mid - detail::kHalfPi));
        if (best == 0) break;
    }
    return {zeros + best, n};
}

namespace detail {

// Closed-halfspace count for one explicit direction.
inline std::int64_t closed_count(const Eigen::MatrixXd& points, const Eigen::VectorXd& u) {
    std::int64_t c = 0;
    const Eigen::VectorXd dots = points * u;
    for (Eigen::Index i = 0; i < dots.size(); ++i)
        if (dots[i] >= 0.0) ++c;
    return c;
}

}  // namespace detail

// Upper bound on the origin depth: the minimum count over a finite direction
// set (seeded uniform directions, plus the normalized data points and their
// pairwise differences when enabled). Deterministic given the seed. For
// d <= 2 with data directions enabled this routes through the exact sweep.
inline DepthValue origin_depth_approx(const Eigen::MatrixXd& points, const DirectionBudget& budget) {
    detail::require_cloud(points);
    budget.validate();
    const Eigen::Index d = points.cols();
    if (d == 1) return origin_depth_exact_1d(points);
    if (d == 2 && budget.use_data_directions) return origin_depth_exact_2d(points);

    const std::int64_t n = points.rows();
    std::int64_t best = n;
    Rng rng(budget.seed);
    Eigen::VectorXd u(d);

    for (int t = 0; t < budget.n_random && best > 0; ++t) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(t));
        double norm2 = 0.0;
        for (Eigen::Index c = 0; c < d; ++c) {
            u[c] = sub.next_gaussian();
            norm2 += u[c] * u[c];
        }
        if (norm2 == 0.0) continue;
        u /= std::sqrt(norm2);
        best = std::min(best, detail::closed_count(points, u));
    }

    if (budget.use_data_directions && best > 0) {
        for (Eigen::Index i = 0; i < n && best > 0; ++i) {
            const double norm = points.row(i).norm();
            if (norm == 0.0) continue;
            u = points.row(i).transpose() / norm;
            best = std::min(best, detail::closed_count(points, u));
            best = std::min(best, detail::closed_count(points, Eigen::VectorXd(-u)));
        }
        // Pairwise differences, subsampled deterministically when the pair
        // count outgrows the random budget.
        const std::int64_t pair_count = n * (n - 1) / 2;
        const std::int64_t cap = std::max<std::int64_t>(2 * std::max(budget.n_random, 1000), 20000);
        Rng pair_rng = rng.substream(0x70616972ull);
        const std::int64_t draws = std::min(pair_count, cap);
        for (std::int64_t t = 0; t < draws && best > 0; ++t) {
            Eigen::Index i, j;
            if (pair_count <= cap) {
                // enumerate
                std::int64_t r = t;
                i = 0;
                std::int64_t row_len = n - 1;
                while (r >= row_len) {
                    r -= row_len;
                    ++i;
                    --row_len;
                }
                j = i + 1 + r;
            } else {
                Rng sub = pair_rng.substream(static_cast<std::uint64_t>(t));
                i = static_cast<Eigen::Index>(sub.next_u64() % static_cast<std::uint64_t>(n));
                j = static_cast<Eigen::Index>(sub.next_u64() % static_cast<std::uint64_t>(n));
                if (i == j) continue;
            }
            Eigen::VectorXd diff = (points.row(i) - points.row(j)).transpose();
            const double norm = diff.norm();
            if (norm == 0.0) continue;
            diff /= norm;
            best = std::min(best, detail::closed_count(points, diff));
            best = std::min(best, detail::closed_count(points, Eigen::VectorXd(-diff)));
        }
    }
    return {best, n};
}

// Halfspace depth of theta: origin depth of the translated cloud, exact for
// d <= 2.
inline DepthValue tukey_depth(const Eigen::VectorXd& theta, const Eigen::MatrixXd& points,
                              const DirectionBudget& budget) {
    detail::require_cloud(points);
    if (theta.size() != points.cols()) throw dimension_error("tukey_depth: dimension mismatch");
    const Eigen::MatrixXd shifted = points.rowwise() - theta.transpose();
    if (points.cols() == 1) return origin_depth_exact_1d(shifted);
    if (points.cols() == 2) return origin_depth_exact_2d(shifted);
    return origin_depth_approx(shifted, budget);
}

namespace detail {

inline Eigen::VectorXd coordinatewise_median(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows(), d = points.cols();
    Eigen::VectorXd med(d);
    std::vector<double> col(n);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) col[i] = points(i, c);
        std::sort(col.begin(), col.end());
        med[c] = (n % 2 == 1) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
    }
    return med;
}

}  // namespace detail

// Approximate Tukey median: evaluate every data point and the coordinatewise
// median, refine the best candidates by a coordinate pattern search with
// shrinking steps, then return the coordinatewise mean of all evaluated
// maximizers (the depth region is convex, so the mean keeps maximal depth).
inline Eigen::VectorXd tukey_median(const Eigen::MatrixXd& points, const DirectionBudget& budget) {
    detail::require_cloud(points);
    const Eigen::Index n = points.rows(), d = points.cols();
    if (n == 1) return points.row(0).transpose();

    const auto depth_at = [&](const Eigen::VectorXd& theta) { return tukey_depth(theta, points, budget); };

    std::vector<std::pair<DepthValue, Eigen::VectorXd>> evaluated;
    evaluated.reserve(static_cast<std::size_t>(n) + 64);
    const auto evaluate = [&](const Eigen::VectorXd& theta) {
        evaluated.emplace_back(depth_at(theta), theta);
        return evaluated.back().first;
    };

    for (Eigen::Index i = 0; i < n; ++i) evaluate(points.row(i).transpose());
    evaluate(detail::coordinatewise_median(points));

    std::vector<std::size_t> order(evaluated.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return evaluated[b].first < evaluated[a].first; });

    // Data-driven, translation-invariant step scale.
    double scale = 0.0;
    for (Eigen::Index c = 0; c < d; ++c)
        scale = std::max(scale, points.col(c).maxCoeff() - points.col(c).minCoeff());
    if (scale == 0.0) scale = 1.0;

    const int n_starts = static_cast<int>(std::min<std::size_t>(3, order.size()));
    for (int s = 0; s < n_starts; ++s) {
        Eigen::VectorXd current = evaluated[order[static_cast<std::size_t>(s)]].second;
        DepthValue current_depth = evaluated[order[static_cast<std::size_t>(s)]].first;
        double step = scale / 4.0;
        while (step > 1e-3 * scale) {
            bool improved = false;
            for (Eigen::Index c = 0; c < d; ++c) {
                for (double sign : {+1.0, -1.0}) {
                    Eigen::VectorXd trial = current;
                    trial[c] += sign * step;
                    const DepthValue trial_depth = evaluate(trial);
                    if (current_depth < trial_depth) {
                        current = trial;
                        current_depth = trial_depth;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
    }

    DepthValue best{-1, 1};
    for (const auto& [depth, theta] : evaluated)
        if (best < depth) best = depth;

    std::vector<Eigen::VectorXd> maximizers;
    for (const auto& [depth, theta] : evaluated)
        if (depth == best) maximizers.push_back(theta);
    std::sort(maximizers.begin(), maximizers.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    maximizers.erase(std::unique(maximizers.begin(), maximizers.end(),
                                 [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a == b; }),
                     maximizers.end());

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& theta : maximizers) mean += theta;
    mean /= static_cast<double>(maximizers.size());
    if (depth_at(mean) >= best) return mean;
    return maximizers.front();  // rounding pushed the mean off the plateau
}

}  // namespace shapedepth
