#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shapedepth/errors.hpp"

// Shape-matrix domain types and the matrix functions the depth machinery
// needs: SPD square roots and logs, the geodesic metric, multivariate signs
// and the vech0 reduction of sign outer products.

namespace shapedepth {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Reduced dimension k(k+1)/2 - 1.
inline int reduced_dim(int k) { return k * (k + 1) / 2 - 1; }

// Lower-triangle index pairs in column-major order:
// (0,0),(1,0),...,(k-1,0),(1,1),(2,1),...,(k-1,k-1).
inline std::vector<std::pair<int, int>> vech_pairs(int k) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(k * (k + 1) / 2);
    for (int j = 0; j < k; ++j)
        for (int i = j; i < k; ++i) pairs.emplace_back(i, j);
    return pairs;
}

namespace detail {

// Relative floor under which an eigenvalue is treated as a rank defect.
inline double spd_eigenvalue_floor(const MatrixXd& m) {
    return 1e-12 * m.trace() / static_cast<double>(m.rows());
}

struct SpdEigen {
    VectorXd eigenvalues;
    MatrixXd eigenvectors;
};

// Symmetric eigendecomposition, rejecting matrices that are not strictly
// positive definite. Depth theory needs strict positivity, so small
// eigenvalues are an error rather than being clamped.
inline SpdEigen spd_eigen(const MatrixXd& m, const char* who) {
    if (m.rows() != m.cols())
        throw dimension_error(std::string(who) + ": matrix is not square");
    if (!m.isApprox(m.transpose(), 1e-10))
        throw std::domain_error(std::string(who) + ": matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success)
        throw std::domain_error(std::string(who) + ": eigendecomposition failed");
    const double floor = spd_eigenvalue_floor(m);
    if (es.eigenvalues().minCoeff() <= floor)
        throw std::domain_error(std::string(who) + ": matrix is not positive definite (min eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()) + ")");
    return {es.eigenvalues(), es.eigenvectors()};
}

inline MatrixXd apply_spectral(const SpdEigen& e, double (*f)(double)) {
    VectorXd d = e.eigenvalues;
    for (int i = 0; i < d.size(); ++i) d[i] = f(d[i]);
    return e.eigenvectors * d.asDiagonal() * e.eigenvectors.transpose();
}

}  // namespace detail

// Unique SPD square root.
inline MatrixXd matrix_sqrt(const MatrixXd& v) {
    const auto e = detail::spd_eigen(v, "matrix_sqrt");
    return detail::apply_spectral(e, [](double x) { return std::sqrt(x); });
}

inline MatrixXd matrix_inv_sqrt(const MatrixXd& v) {
    const auto e = detail::spd_eigen(v, "matrix_inv_sqrt");
    return detail::apply_spectral(e, [](double x) { return 1.0 / std::sqrt(x); });
}

inline MatrixXd matrix_log(const MatrixXd& v) {
    const auto e = detail::spd_eigen(v, "matrix_log");
    return detail::apply_spectral(e, [](double x) { return std::log(x); });
}

// Symmetric positive definite matrix with trace k. Construction validates
// eagerly; unchecked() skips validation for internal hot loops that only
// produce already-normalized matrices.
class ShapeMatrix {
  public:
    // Default is the bivariate identity, the smallest valid shape.
    ShapeMatrix() : entries_(MatrixXd::Identity(2, 2)) {}

    explicit ShapeMatrix(MatrixXd entries) : entries_(std::move(entries)) { validate(); }

    static ShapeMatrix unchecked(MatrixXd entries) {
        ShapeMatrix v;
        v.entries_ = std::move(entries);
        return v;
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const MatrixXd& entries() const { return entries_; }

    bool operator==(const ShapeMatrix& other) const { return entries_ == other.entries_; }

  private:

    void validate() const {
        const int k = static_cast<int>(entries_.rows());
        if (k < 2 || entries_.cols() != k)
            throw dimension_error("ShapeMatrix: need a square matrix with k >= 2");
        if (!entries_.allFinite())
            throw std::domain_error("ShapeMatrix: entries must be finite");
        if (!entries_.isApprox(entries_.transpose(), 1e-10))
            throw std::domain_error("ShapeMatrix: matrix is not symmetric");
        detail::spd_eigen(entries_, "ShapeMatrix");
        if (std::abs(entries_.trace() - k) > 1e-8)
            throw std::domain_error("ShapeMatrix: trace must equal the dimension (got " +
                                    std::to_string(entries_.trace()) + "); normalize_to_shape first");
    }

    MatrixXd entries_;
};

// Shape matrix proportional to an arbitrary SPD matrix: k A / tr(A),
// symmetrized to suppress rounding drift.
inline ShapeMatrix normalize_to_shape(const MatrixXd& a) {
    detail::spd_eigen(a, "normalize_to_shape");
    const int k = static_cast<int>(a.rows());
    MatrixXd v = a * (static_cast<double>(k) / a.trace());
    v = 0.5 * (v + v.transpose());
    return ShapeMatrix(std::move(v));
}

// Affine-invariant Riemannian distance || log(Va^{-1/2} Vb Va^{-1/2}) ||_F.
inline double geodesic_distance(const MatrixXd& va, const MatrixXd& vb) {
    if (va.rows() != vb.rows() || va.cols() != vb.cols())
        throw dimension_error("geodesic_distance: dimension mismatch");
    const MatrixXd isa = matrix_inv_sqrt(va);
    const MatrixXd m = isa * vb * isa;
    return matrix_log(0.5 * (m + m.transpose())).norm();
}

inline double geodesic_distance(const ShapeMatrix& va, const ShapeMatrix& vb) {
    return geodesic_distance(va.entries(), vb.entries());
}

// Multivariate sign V^{-1/2}(x - theta) / ||V^{-1/2}(x - theta)||, exactly
// zero at x = theta. The overload taking the precomputed inverse root is the
// hot-loop entry point.
inline VectorXd sign_vector_standardized(const VectorXd& x, const VectorXd& theta, const MatrixXd& inv_sqrt_v) {
    const VectorXd centered = x - theta;
    if (centered.isZero(0.0)) return VectorXd::Zero(x.size());
    VectorXd u = inv_sqrt_v * centered;
    const double norm = u.norm();
    if (norm == 0.0) return VectorXd::Zero(x.size());
    return u / norm;
}

inline VectorXd sign_vector(const VectorXd& x, const VectorXd& theta, const ShapeMatrix& v) {
    if (x.size() != theta.size() || x.size() != v.dim())
        throw dimension_error("sign_vector: dimension mismatch");
    return sign_vector_standardized(x, theta, matrix_inv_sqrt(v.entries()));
}

// vech0{ U U^T - I/k }: the lower-triangle stack of the centered sign outer
// product, deprived of its first component. Zero iff x = theta.
inline VectorXd wtilde_from_sign(const VectorXd& u) {
    const int k = static_cast<int>(u.size());
    const double inv_k = 1.0 / static_cast<double>(k);
    VectorXd w(reduced_dim(k));
    if (u.isZero(0.0)) {
        w.setZero();
        return w;
    }
    int m = 0;
    const auto pairs = vech_pairs(k);
    for (std::size_t p = 1; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        w[m++] = (i == j) ? u[i] * u[i] - inv_k : u[i] * u[j];
    }
    return w;
}

inline VectorXd wtilde(const VectorXd& x, const VectorXd& theta, const ShapeMatrix& v) {
    return wtilde_from_sign(sign_vector(x, theta, v));
}

// Reduced-sign cloud of a dataset (rows are observations): n x d_k matrix of
// wtilde(x_i, theta, V). Observations equal to theta map to zero rows.
inline MatrixXd wtilde_cloud(const MatrixXd& data, const VectorXd& theta, const MatrixXd& v) {
    const int k = static_cast<int>(data.cols());
    if (theta.size() != k || v.rows() != k)
        throw dimension_error("wtilde_cloud: dimension mismatch");
    const MatrixXd inv_sqrt = matrix_inv_sqrt(v);
    const int n = static_cast<int>(data.rows());
    MatrixXd cloud(n, reduced_dim(k));
    for (int r = 0; r < n; ++r)
        cloud.row(r) = wtilde_from_sign(sign_vector_standardized(data.row(r), theta, inv_sqrt)).transpose();
    return cloud;
}

// Expansion matrix H with vec(L) = H vech0(L) for trace-free symmetric L.
// Built once per dimension and cached.
inline const MatrixXd& expansion_matrix(int k) {
    static std::map<int, MatrixXd> cache;
    static std::mutex cache_mutex;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;

    const auto pairs = vech_pairs(k);
    MatrixXd h = MatrixXd::Zero(k * k, reduced_dim(k));
    for (std::size_t p = 1; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        const int m = static_cast<int>(p) - 1;
        if (i == j) {
            h(i + i * k, m) = 1.0;
            h(0, m) = -1.0;  // L_00 = -sum of the other diagonal entries
        } else {
            h(i + j * k, m) = 1.0;
            h(j + i * k, m) = 1.0;
        }
    }
    return cache.emplace(k, std::move(h)).first->second;
}

// Inverse of the reduction: the k x k trace-free symmetric matrix whose
// vech0 is w (the (0,0) entry is minus the sum of the remaining diagonal).
inline MatrixXd wtilde_expand(const VectorXd& w, int k) {
    if (w.size() != reduced_dim(k)) throw dimension_error("wtilde_expand: wrong length");
    MatrixXd l = MatrixXd::Zero(k, k);
    const auto pairs = vech_pairs(k);
    int m = 0;
    double diag_sum = 0.0;
    for (std::size_t p = 1; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        l(i, j) = w[m];
        l(j, i) = w[m];
        if (i == j) diag_sum += w[m];
        ++m;
    }
    l(0, 0) = -diag_sum;
    return l;
}

// A k x k symmetric matrix with unit Frobenius norm; the direction family of
// the infimum when shape depth is written over symmetric matrices.
struct SymmetricDirection {
    MatrixXd entries;

    explicit SymmetricDirection(MatrixXd m) : entries(std::move(m)) {
        if (entries.rows() != entries.cols())
            throw dimension_error("SymmetricDirection: not square");
        if (!entries.isApprox(entries.transpose(), 1e-10))
            throw std::domain_error("SymmetricDirection: not symmetric");
        const double norm = entries.norm();
        if (std::abs(norm - 1.0) > 1e-12) throw std::domain_error("SymmetricDirection: Frobenius norm must be 1");
    }
};

// Direction maps between the reduced d_k space and symmetric matrices:
// u^T wtilde = <M, L> for all trace-free symmetric L when M is the
// least-norm symmetric matrix with H^T vec(M) = u.
inline SymmetricDirection reduced_to_symmetric(const VectorXd& u, int k) {
    const MatrixXd& h = expansion_matrix(k);
    const VectorXd vec_m = h * (h.transpose() * h).ldlt().solve(u);
    MatrixXd m = Eigen::Map<const MatrixXd>(vec_m.data(), k, k);
    m = 0.5 * (m + m.transpose());
    return SymmetricDirection(m / m.norm());
}

inline VectorXd symmetric_to_reduced(const SymmetricDirection& m) {
    const int k = static_cast<int>(m.entries.rows());
    const Eigen::Map<const VectorXd> vec_m(m.entries.data(), k * k);
    return expansion_matrix(k).transpose() * vec_m;
}

// Cumulative proportions of explained variance, largest eigenvalues first.
inline VectorXd explained_variance(const ShapeMatrix& v) {
    const auto e = detail::spd_eigen(v.entries(), "explained_variance");
    const int k = v.dim();
    VectorXd p(k);
    const double total = e.eigenvalues.sum();
    double acc = 0.0;
    for (int m = 0; m < k; ++m) {
        acc += e.eigenvalues[k - 1 - m];  // Eigen sorts ascending
        p[m] = acc / total;
    }
    p[k - 1] = 1.0;
    return p;
}

}  // namespace shapedepth
