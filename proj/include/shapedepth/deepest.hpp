#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "shapedepth/depth.hpp"
#include "shapedepth/errors.hpp"
#include "shapedepth/halfspace.hpp"
#include "shapedepth/rng.hpp"
#include "shapedepth/spd.hpp"

// Maximize empirical Tyler shape depth over the trace-k SPD manifold. The
// objective is a step function (values l/n), so the search is derivative
// free: multistart coordinate pattern search on an exponential chart, with
// every maximizer found retained and averaged into a barycenter.

namespace shapedepth {

struct DeepestShapeOptions {
    int starts = 8;
    std::uint64_t seed = 0;
    DirectionBudget budget{};
    double initial_step = 0.5;
    double shrink = 0.5;
    double min_step = 1e-3;
    double perturb_scale = 0.3;
    int plateau_cap = 256;
};

struct DeepestShapeResult {
    ShapeMatrix shape;
    DepthValue depth;
    std::int64_t evaluations = 0;
    std::int64_t plateau_size = 0;
};

namespace detail {

// Chart over the trace-k manifold: coordinates fill a trace-free symmetric
// matrix S (same index order as vech0), then V = k exp(S) / tr exp(S).
inline Eigen::MatrixXd chart_symmetric(const Eigen::VectorXd& s, int k) {
    Eigen::MatrixXd m = wtilde_expand(s, k);
    return m;
}

inline ShapeMatrix chart_to_shape(const Eigen::VectorXd& s, int k) {
    const Eigen::MatrixXd sym = chart_symmetric(s, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < k; ++i) d[i] = std::exp(d[i]);
    Eigen::MatrixXd v = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
    v *= static_cast<double>(k) / v.trace();
    v = 0.5 * (v + v.transpose());
    return ShapeMatrix::unchecked(std::move(v));
}

inline Eigen::VectorXd shape_to_chart(const ShapeMatrix& v) {
    const int k = v.dim();
    Eigen::MatrixXd s = matrix_log(v.entries());
    s -= (s.trace() / static_cast<double>(k)) * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd coords(reduced_dim(k));
    const auto pairs = vech_pairs(k);
    int m = 0;
    for (std::size_t p = 1; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        coords[m++] = s(i, j);
    }
    return coords;
}

struct PlateauMember {
    Eigen::VectorXd coords;
    Eigen::MatrixXd shape;
};

}  // namespace detail

inline DeepestShapeResult deepest_shape_fixed_theta(const Eigen::MatrixXd& data, const Eigen::VectorXd& theta,
                                                    const DeepestShapeOptions& opts = {}) {
    if (data.rows() == 0) throw std::domain_error("deepest_shape_fixed_theta: empty dataset");
    const int k = static_cast<int>(data.cols());
    if (theta.size() != k) throw dimension_error("deepest_shape_fixed_theta: dimension mismatch");
    const int dk = reduced_dim(k);
    const std::int64_t n = data.rows();

    Rng rng(opts.seed);
    std::int64_t evaluations = 0;
    std::int64_t best_num = -1;
    std::vector<detail::PlateauMember> plateau;
    std::int64_t plateau_seen = 0;  // distinct maximizers found, including capped-out ones
    Rng reservoir_rng = rng.substream(0x706C6174ull);

    const auto evaluate = [&](const Eigen::VectorXd& s) {
        const ShapeMatrix v = detail::chart_to_shape(s, k);
        const DepthValue d = shape_depth_fixed_theta(data, theta, v, opts.budget);
        ++evaluations;
        if (d.num > best_num) {
            best_num = d.num;
            plateau.clear();
            plateau_seen = 0;
        }
        if (d.num == best_num) {
            const bool duplicate = std::any_of(plateau.begin(), plateau.end(), [&](const detail::PlateauMember& p) {
                return p.coords.size() == s.size() && p.coords == s;
            });
            if (!duplicate) {
                ++plateau_seen;
                if (static_cast<int>(plateau.size()) < opts.plateau_cap) {
                    plateau.push_back({s, v.entries()});
                } else {
                    const auto slot = reservoir_rng.next_u64() % static_cast<std::uint64_t>(plateau_seen);
                    if (slot < static_cast<std::uint64_t>(opts.plateau_cap))
                        plateau[static_cast<std::size_t>(slot)] = {s, v.entries()};
                }
            }
        }
        return d;
    };

    // Multistart seeds: identity, Tyler M-estimate, normalized covariance,
    // then random perturbations of the Tyler estimate in chart coordinates.
    std::vector<Eigen::VectorXd> starts;
    starts.push_back(Eigen::VectorXd::Zero(dk));
    Eigen::VectorXd anchor = Eigen::VectorXd::Zero(dk);
    try {
        anchor = detail::shape_to_chart(tyler_m_estimator(data, theta, 1e-9, 500));
        starts.push_back(anchor);
    } catch (const std::exception&) {
    }
    try {
        Eigen::MatrixXd centered = data.rowwise() - theta.transpose();
        Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(std::max<std::int64_t>(n, 1));
        starts.push_back(detail::shape_to_chart(normalize_to_shape(cov)));
    } catch (const std::exception&) {
    }
    while (static_cast<int>(starts.size()) < std::max(opts.starts, 1)) {
        Rng sub = rng.substream(starts.size());
        Eigen::VectorXd s = anchor;
        for (int m = 0; m < dk; ++m) s[m] += opts.perturb_scale * sub.next_gaussian();
        starts.push_back(s);
    }

    Eigen::VectorXd best_point = starts.front();
    std::int64_t best_point_num = -1;

    for (const auto& start : starts) {
        Eigen::VectorXd current = start;
        DepthValue current_depth = evaluate(current);
        if (current_depth.num > best_point_num) {
            best_point_num = current_depth.num;
            best_point = current;
        }
        double step = opts.initial_step;
        while (step > opts.min_step) {
            bool improved = false;
            for (int m = 0; m < dk; ++m) {
                for (double sign : {+1.0, -1.0}) {
                    Eigen::VectorXd trial = current;
                    trial[m] += sign * step;
                    const DepthValue d = evaluate(trial);
                    if (d.num > current_depth.num) {
                        current = trial;
                        current_depth = d;
                        improved = true;
                    }
                }
            }
            if (!improved && current != best_point) {
                // Nelder-Mead-style reflection of the stalled point through
                // the best point seen so far.
                const Eigen::VectorXd trial = 2.0 * best_point - current;
                const DepthValue d = evaluate(trial);
                if (d.num > current_depth.num) {
                    current = trial;
                    current_depth = d;
                    improved = true;
                }
            }
            if (!improved) step *= opts.shrink;
            if (current_depth.num > best_point_num) {
                best_point_num = current_depth.num;
                best_point = current;
            }
        }
    }

    // Deterministic barycenter: plateau members sorted by chart coordinates,
    // averaged in matrix space (quasi-concavity keeps the average on the
    // plateau), trace renormalized.
    std::sort(plateau.begin(), plateau.end(), [](const detail::PlateauMember& a, const detail::PlateauMember& b) {
        return std::lexicographical_compare(a.coords.data(), a.coords.data() + a.coords.size(), b.coords.data(),
                                            b.coords.data() + b.coords.size());
    });
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(k, k);
    for (const auto& p : plateau) mean += p.shape;
    mean /= static_cast<double>(plateau.size());
    mean = 0.5 * (mean + mean.transpose());
    mean *= static_cast<double>(k) / mean.trace();

    ShapeMatrix result_shape = ShapeMatrix(mean);
    DepthValue result_depth = shape_depth_fixed_theta(data, theta, result_shape, opts.budget);
    if (result_depth.num < best_num) {
        result_shape = ShapeMatrix(plateau.front().shape);
        result_depth = shape_depth_fixed_theta(data, theta, result_shape, opts.budget);
    }
    return {std::move(result_shape), result_depth, evaluations, plateau_seen};
}

inline DeepestShapeResult deepest_shape(const Eigen::MatrixXd& data, const DeepestShapeOptions& opts = {}) {
    if (data.rows() == 0) throw std::domain_error("deepest_shape: empty dataset");
    return deepest_shape_fixed_theta(data, tukey_median(data, opts.budget), opts);
}

}  // namespace shapedepth
