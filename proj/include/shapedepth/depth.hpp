#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapedepth/errors.hpp"
#include "shapedepth/halfspace.hpp"
#include "shapedepth/samplers.hpp"
#include "shapedepth/spd.hpp"

// Tyler shape depth: the origin's halfspace depth in the cloud of reduced
// signs vech0(U U^T - I/k). Exact for k = 2 (the reduced cloud is planar),
// direction-sampled above. Also the closed-form elliptical depths and the
// Tyler M-estimator the tests lean on.

namespace shapedepth {

// Fixed-theta shape depth of V: transform every observation to its reduced
// sign and take the origin depth of that cloud. Observations equal to theta
// map to the zero vector and count in every halfspace.
inline DepthValue shape_depth_fixed_theta(const Eigen::MatrixXd& data, const Eigen::VectorXd& theta,
                                          const ShapeMatrix& v, const DirectionBudget& budget = {}) {
    if (data.rows() == 0) throw std::domain_error("shape_depth_fixed_theta: empty dataset");
    if (data.cols() != v.dim() || theta.size() != v.dim())
        throw dimension_error("shape_depth_fixed_theta: dimension mismatch");
    const Eigen::MatrixXd cloud = wtilde_cloud(data, theta, v.entries());
    if (cloud.cols() == 2) return origin_depth_exact_2d(cloud);
    return origin_depth_approx(cloud, budget);
}

// Unspecified-location version: plug in the Tukey median of the data.
inline DepthValue shape_depth(const Eigen::MatrixXd& data, const ShapeMatrix& v,
                              const DirectionBudget& budget = {}) {
    if (data.rows() == 0) throw std::domain_error("shape_depth: empty dataset");
    if (data.cols() != v.dim()) throw dimension_error("shape_depth: dimension mismatch");
    return shape_depth_fixed_theta(data, tukey_median(data, budget), v, budget);
}

// Maximal depth (1 - atom) pr(Y_k > 1/k) with Y_k ~ Beta(1/2, (k-1)/2);
// attained at the true shape of an elliptical law.
inline double max_depth_value(int k, double atom_mass) {
    if (k < 2) throw std::domain_error("max_depth_value: k must be >= 2");
    if (!(atom_mass >= 0.0 && atom_mass < 1.0)) throw std::domain_error("max_depth_value: atom_mass in [0,1)");
    const double b = 0.5 * static_cast<double>(k - 1);
    return (1.0 - atom_mass) * (1.0 - beta_cdf(0.5, b, 1.0 / static_cast<double>(k)));
}

// Closed-form bivariate elliptical depth:
// (1 - atom) pr( Y2 >= 1/2 + 1/2 sqrt{1 - det(2 V0^{-1} V / tr(V0^{-1} V))} )
// with Y2 ~ Beta(1/2, 1/2).
inline double elliptical_depth_k2(const ShapeMatrix& v, const EllipticalModel& model) {
    if (v.dim() != 2 || model.k != 2)
        throw std::domain_error("elliptical_depth_k2: only the bivariate case has a closed form");
    model.validate();
    const Eigen::Matrix2d ratio = model.shape.entries().inverse() * v.entries();
    const double det_term = (2.0 * ratio / ratio.trace()).determinant();
    const double arg = 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - det_term));
    return (1.0 - model.atom_mass) * (1.0 - beta_cdf(0.5, 0.5, std::min(1.0, arg)));
}

// Bivariate shape from Figure-style axes: eigenratio r = V22/V11 and
// correlation c = V12/sqrt(V11 V22), normalized to trace 2.
inline ShapeMatrix shape_from_ratio_corr(double ratio, double corr) {
    if (!(ratio > 0.0)) throw std::domain_error("shape_from_ratio_corr: ratio must be positive");
    if (!(std::abs(corr) <= 1.0 - 1e-3))
        throw std::domain_error("shape_from_ratio_corr: |corr| must stay below 1 - 1e-3");
    const double v11 = 2.0 / (1.0 + ratio);
    const double v22 = 2.0 - v11;
    const double v12 = corr * std::sqrt(v11 * v22);
    Eigen::Matrix2d m;
    m << v11, v12, v12, v22;
    return ShapeMatrix(m);
}

struct GridAxis {
    double from = 0.0;
    double to = 0.0;
    int count = 0;

    std::vector<double> values() const {
        if (count < 1 || !(from <= to)) throw std::domain_error("grid axis: need from <= to and count >= 1");
        std::vector<double> v(count);
        for (int i = 0; i < count; ++i)
            v[i] = (count == 1) ? from : from + (to - from) * static_cast<double>(i) / (count - 1);
        return v;
    }
};

struct ContourGrid {
    std::vector<double> ratio_axis;
    std::vector<double> corr_axis;
    Eigen::MatrixXd depth;  // depth(i, j) at (ratio_axis[i], corr_axis[j])
};

// Empirical depth over the (ratio, corr) grid; every cell is an exact k = 2
// evaluation of the reconstructed trace-2 shape.
inline ContourGrid depth_contour_grid(const Eigen::MatrixXd& data, const Eigen::VectorXd& theta,
                                      const GridAxis& ratio, const GridAxis& corr,
                                      const DirectionBudget& budget = {}) {
    if (data.cols() != 2) throw dimension_error("depth_contour_grid: data must be bivariate");
    ContourGrid grid;
    grid.ratio_axis = ratio.values();
    grid.corr_axis = corr.values();
    for (double c : grid.corr_axis)
        if (std::abs(c) > 1.0 - 1e-3) throw std::domain_error("depth_contour_grid: corr grid too close to +-1");
    for (double r : grid.ratio_axis)
        if (!(r > 0.0)) throw std::domain_error("depth_contour_grid: ratio grid must be positive");
    grid.depth.resize(grid.ratio_axis.size(), grid.corr_axis.size());
    for (std::size_t i = 0; i < grid.ratio_axis.size(); ++i)
        for (std::size_t j = 0; j < grid.corr_axis.size(); ++j) {
            DirectionBudget cell = budget;
            cell.seed = Rng(budget.seed).substream(i * grid.corr_axis.size() + j).next_u64();
            grid.depth(i, j) =
                shape_depth_fixed_theta(data, theta, shape_from_ratio_corr(grid.ratio_axis[i], grid.corr_axis[j]),
                                        cell)
                    .value();
        }
    return grid;
}

// Population counterpart through the closed form.
inline ContourGrid population_contour_grid(const EllipticalModel& model, const GridAxis& ratio,
                                           const GridAxis& corr) {
    ContourGrid grid;
    grid.ratio_axis = ratio.values();
    grid.corr_axis = corr.values();
    grid.depth.resize(grid.ratio_axis.size(), grid.corr_axis.size());
    for (std::size_t i = 0; i < grid.ratio_axis.size(); ++i)
        for (std::size_t j = 0; j < grid.corr_axis.size(); ++j)
            grid.depth(i, j) =
                elliptical_depth_k2(shape_from_ratio_corr(grid.ratio_axis[i], grid.corr_axis[j]), model);
    return grid;
}

// Tyler's M-estimator of shape: the fixed point of
//   V <- k V^{1/2} mean(U U^T) V^{1/2} / tr(...),   U = sign of x under V,
// started at the normalized sign covariance. Observations at theta are
// excluded. Returns the trace-k fixed point once the mean centered sign
// outer product has Frobenius norm <= tol.
inline ShapeMatrix tyler_m_estimator(const Eigen::MatrixXd& data, const Eigen::VectorXd& theta,
                                     double tol = 1e-9, int max_iter = 500) {
    const int k = static_cast<int>(data.cols());
    if (theta.size() != k) throw dimension_error("tyler_m_estimator: dimension mismatch");

    std::vector<Eigen::VectorXd> centered;
    centered.reserve(data.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        Eigen::VectorXd c = data.row(i).transpose() - theta;
        if (!c.isZero(0.0)) centered.push_back(std::move(c));
    }
    const auto n = static_cast<double>(centered.size());
    if (centered.size() <= static_cast<std::size_t>(k))
        throw std::domain_error("tyler_m_estimator: need more than k observations distinct from theta");

    Eigen::MatrixXd sign_cov = Eigen::MatrixXd::Zero(k, k);
    for (const auto& c : centered) {
        const Eigen::VectorXd u = c / c.norm();
        sign_cov.noalias() += u * u.transpose();
    }
    sign_cov /= n;
    Eigen::MatrixXd v = sign_cov * (static_cast<double>(k) / sign_cov.trace());

    const Eigen::MatrixXd target = Eigen::MatrixXd::Identity(k, k) / static_cast<double>(k);
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::MatrixXd inv_sqrt, sqrt_v;
        try {
            const auto e = detail::spd_eigen(v, "tyler_m_estimator");
            inv_sqrt = detail::apply_spectral(e, [](double x) { return 1.0 / std::sqrt(x); });
            sqrt_v = detail::apply_spectral(e, [](double x) { return std::sqrt(x); });
        } catch (const std::domain_error&) {
            throw convergence_error("tyler_m_estimator: iterate left the SPD cone (data nearly on a hyperplane)",
                                    residual);
        }
        Eigen::MatrixXd mean_outer = Eigen::MatrixXd::Zero(k, k);
        for (const auto& c : centered) {
            Eigen::VectorXd u = inv_sqrt * c;
            u /= u.norm();
            mean_outer.noalias() += u * u.transpose();
        }
        mean_outer /= n;
        residual = (mean_outer - target).norm();
        if (residual <= tol) {
            v = 0.5 * (v + v.transpose());
            return normalize_to_shape(v);
        }
        v = sqrt_v * mean_outer * sqrt_v;
        v = 0.5 * (v + v.transpose());
        v *= static_cast<double>(k) / v.trace();
    }
    throw convergence_error("tyler_m_estimator: no convergence after " + std::to_string(max_iter) +
                                " iterations (residual " + std::to_string(residual) + ")",
                            residual);
}

}  // namespace shapedepth
