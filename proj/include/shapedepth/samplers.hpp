#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shapedepth/errors.hpp"
#include "shapedepth/rng.hpp"
#include "shapedepth/spd.hpp"

// Reproducible generation for elliptical families and contamination
// mixtures, plus the regularized incomplete beta function and the boxplot
// fence used by the outlier scan. Every sampler derives a substream per row,
// so outputs are identical however the rows are scheduled.

namespace shapedepth {

enum class Generator { normal, cauchy };

// Elliptical law theta + R V^{1/2} U with U uniform on the sphere. The
// radial law's scale is deliberately left arbitrary: shape depth only sees
// directions. atom_mass puts point mass at theta itself.
struct EllipticalModel {
    int k;
    Eigen::VectorXd theta;
    ShapeMatrix shape;
    Generator generator = Generator::normal;
    double atom_mass = 0.0;

    void validate() const {
        if (k != shape.dim() || theta.size() != k) throw dimension_error("EllipticalModel: dimension mismatch");
        if (!(atom_mass >= 0.0 && atom_mass < 1.0))
            throw std::domain_error("EllipticalModel: atom_mass must lie in [0,1)");
    }
};

inline Eigen::MatrixXd sample_uniform_sphere(int k, int n, std::uint64_t seed) {
    if (k < 1 || n < 0) throw std::domain_error("sample_uniform_sphere: need k >= 1, n >= 0");
    Eigen::MatrixXd rows(n, k);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(i));
        double norm2;
        do {
            norm2 = 0.0;
            for (int c = 0; c < k; ++c) {
                rows(i, c) = sub.next_gaussian();
                norm2 += rows(i, c) * rows(i, c);
            }
        } while (norm2 == 0.0);
        rows.row(i) /= std::sqrt(norm2);
    }
    return rows;
}

namespace detail {

// One draw from the model using an already-derived row stream.
inline Eigen::VectorXd elliptical_row(const EllipticalModel& model, const Eigen::MatrixXd& sqrt_shape, Rng& sub) {
    const int k = model.k;
    if (model.atom_mass > 0.0 && sub.next_double() < model.atom_mass) return model.theta;
    Eigen::VectorXd z(k);
    for (int c = 0; c < k; ++c) z[c] = sub.next_gaussian();
    Eigen::VectorXd x = sqrt_shape * z;  // normal: R = ||z|| is chi_k
    if (model.generator == Generator::cauchy) {
        double g = sub.next_gaussian();
        while (g == 0.0) g = sub.next_gaussian();
        x /= std::abs(g);
    }
    return model.theta + x;
}

}  // namespace detail

inline Eigen::MatrixXd sample_elliptical(const EllipticalModel& model, int n, std::uint64_t seed) {
    model.validate();
    if (n < 0) throw std::domain_error("sample_elliptical: n must be >= 0");
    const Eigen::MatrixXd sqrt_shape = matrix_sqrt(model.shape.entries());
    Eigen::MatrixXd rows(n, model.k);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(i));
        rows.row(i) = detail::elliptical_row(model, sqrt_shape, sub).transpose();
    }
    return rows;
}

// Contaminant is either a full elliptical model or a transform of the base
// draw: rotation about the origin by 45 degrees, resphering to shape I, or
// the resphered draw scaled by four.
enum class ContaminantKind { model, rotate45, sphere, sphere_scaled_4 };

struct MixtureSpec {
    EllipticalModel base;
    ContaminantKind kind = ContaminantKind::model;
    EllipticalModel contaminant;  // used when kind == model
    double eta = 0.0;
    bool contaminant_sign_flip = false;  // emit +-Y with equal probability

    void validate() const {
        base.validate();
        if (kind == ContaminantKind::model) contaminant.validate();
        if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("MixtureSpec: eta must lie in [0,1]");
    }
};

struct LabeledSample {
    Eigen::MatrixXd rows;
    std::vector<int> labels;  // 0 clean, 1 contaminant
};

inline LabeledSample sample_mixture(const MixtureSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 0) throw std::domain_error("sample_mixture: n must be >= 0");
    const int k = spec.base.k;

    const Eigen::MatrixXd sqrt_base = matrix_sqrt(spec.base.shape.entries());
    Eigen::MatrixXd sqrt_cont;
    EllipticalModel transformed = spec.base;
    switch (spec.kind) {
        case ContaminantKind::model:
            sqrt_cont = matrix_sqrt(spec.contaminant.shape.entries());
            break;
        case ContaminantKind::rotate45:
            sqrt_cont = sqrt_base;  // rotate the base draw itself
            break;
        case ContaminantKind::sphere:
        case ContaminantKind::sphere_scaled_4:
            transformed.shape = ShapeMatrix(Eigen::MatrixXd::Identity(k, k));
            sqrt_cont = Eigen::MatrixXd::Identity(k, k);
            break;
    }
    if (spec.kind == ContaminantKind::rotate45 && k != 2)
        throw dimension_error("sample_mixture: rotate45 is a bivariate pattern");

    Eigen::Matrix2d rot45;
    const double c = std::sqrt(0.5);
    rot45 << c, -c, c, c;

    LabeledSample out;
    out.rows.resize(n, k);
    out.labels.resize(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(i));
        const bool contaminated = sub.next_double() < spec.eta;
        out.labels[i] = contaminated ? 1 : 0;
        if (!contaminated) {
            out.rows.row(i) = detail::elliptical_row(spec.base, sqrt_base, sub).transpose();
            continue;
        }
        Eigen::VectorXd y;
        switch (spec.kind) {
            case ContaminantKind::model:
                y = detail::elliptical_row(spec.contaminant, sqrt_cont, sub);
                break;
            case ContaminantKind::rotate45:
                y = rot45 * detail::elliptical_row(spec.base, sqrt_base, sub);
                break;
            case ContaminantKind::sphere:
                y = detail::elliptical_row(transformed, sqrt_cont, sub);
                break;
            case ContaminantKind::sphere_scaled_4:
                y = transformed.theta + 4.0 * (detail::elliptical_row(transformed, sqrt_cont, sub) - transformed.theta);
                break;
        }
        if (spec.contaminant_sign_flip && sub.next_double() < 0.5) y = -y;
        out.rows.row(i) = y.transpose();
    }
    return out;
}

// Regularized incomplete beta function I_x(a, b) by the standard continued
// fraction (Lentz), switching to the symmetric tail for fast convergence.
inline double beta_cdf(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_cdf: parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("beta_cdf: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const auto contfrac = [](double a, double b, double x) {
        constexpr double tiny = 1e-300;
        constexpr int max_iter = 500;
        const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * x / qap;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= max_iter; ++m) {
            const int m2 = 2 * m;
            double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-15) break;
        }
        return h;
    };

    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * contfrac(a, b, x) / a;
    return 1.0 - front * contfrac(b, a, 1.0 - x) / b;
}

// Q1 - 1.5 IQR with linearly interpolated quartiles (position 1 + p(n-1)).
inline double boxplot_lower_fence(std::vector<double> values) {
    if (values.size() < 4) throw std::domain_error("boxplot_lower_fence: need at least 4 values");
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= values.size()) return values.back();
        return values[lo] + frac * (values[lo + 1] - values[lo]);
    };
    const double q1 = quantile(0.25), q3 = quantile(0.75);
    return q1 - 1.5 * (q3 - q1);
}

}  // namespace shapedepth
