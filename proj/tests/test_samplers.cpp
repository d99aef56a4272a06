#include <catch_amalgamated.hpp>
#include <cmath>

#include "shapedepth/depth.hpp"
#include "shapedepth/samplers.hpp"

using namespace shapedepth;

namespace {
const Eigen::VectorXd kZero2 = Eigen::VectorXd::Zero(2);
}

TEST_CASE("uniform sphere sampler") {
    const Eigen::MatrixXd u = sample_uniform_sphere(3, 500, 9);
    for (int i = 0; i < u.rows(); ++i) CHECK_THAT(u.row(i).norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));

    const Eigen::MatrixXd big = sample_uniform_sphere(2, 100000, 10);
    CHECK_THAT(big.col(0).array().square().mean(), Catch::Matchers::WithinAbs(0.5, 0.01));

    CHECK(sample_uniform_sphere(2, 50, 11) == sample_uniform_sphere(2, 50, 11));
}

TEST_CASE("elliptical sampler") {
    SECTION("atom mass fraction") {
        EllipticalModel model{2, Eigen::Vector2d(1.0, -2.0), ShapeMatrix(Eigen::MatrixXd::Identity(2, 2)),
                              Generator::normal, 0.3};
        const Eigen::MatrixXd rows = sample_elliptical(model, 4000, 17);
        int atoms = 0;
        for (int i = 0; i < rows.rows(); ++i)
            if (rows(i, 0) == 1.0 && rows(i, 1) == -2.0) ++atoms;
        const double frac = atoms / 4000.0;
        CHECK_THAT(frac, Catch::Matchers::WithinAbs(0.3, 3.0 * std::sqrt(0.3 * 0.7 / 4000.0)));
    }
    SECTION("sphericity of the spherical case") {
        EllipticalModel model{2, kZero2, ShapeMatrix(Eigen::MatrixXd::Identity(2, 2)), Generator::normal, 0.0};
        const Eigen::MatrixXd rows = sample_elliptical(model, 100000, 19);
        const double corr = (rows.col(0).array() * rows.col(1).array()).mean() /
                            std::sqrt(rows.col(0).array().square().mean() * rows.col(1).array().square().mean());
        CHECK_THAT(corr, Catch::Matchers::WithinAbs(0.0, 0.01));
    }
    SECTION("normalized covariance recovers the shape") {
        const ShapeMatrix truth(Eigen::Vector2d(1.6, 0.4).asDiagonal().toDenseMatrix());
        EllipticalModel model{2, kZero2, truth, Generator::normal, 0.0};
        const Eigen::MatrixXd rows = sample_elliptical(model, 100000, 23);
        const Eigen::MatrixXd cov = rows.transpose() * rows / static_cast<double>(rows.rows());
        CHECK((normalize_to_shape(cov).entries() - truth.entries()).norm() < 0.02);
    }
    SECTION("cauchy draws are heavy-tailed but direction-clean") {
        EllipticalModel model{2, kZero2, ShapeMatrix(Eigen::MatrixXd::Identity(2, 2)), Generator::cauchy, 0.0};
        const Eigen::MatrixXd rows = sample_elliptical(model, 20000, 29);
        CHECK(rows.allFinite());
        CHECK(rows.cwiseAbs().maxCoeff() > 50.0);  // heavy tails show up at this n
    }
}

TEST_CASE("mixture sampler") {
    MixtureSpec spec;
    spec.base = EllipticalModel{2, kZero2, normalize_to_shape(Eigen::Vector2d(2.0, 0.5).asDiagonal()),
                                Generator::normal, 0.0};
    spec.contaminant = spec.base;

    SECTION("eta = 0 is all clean") {
        spec.kind = ContaminantKind::rotate45;
        spec.eta = 0.0;
        const LabeledSample s = sample_mixture(spec, 300, 31);
        for (int label : s.labels) CHECK(label == 0);
    }
    SECTION("eta = 1 rotate45 rotates the shape") {
        spec.kind = ContaminantKind::rotate45;
        spec.eta = 1.0;
        const LabeledSample s = sample_mixture(spec, 100000, 37);
        const Eigen::MatrixXd cov = s.rows.transpose() * s.rows / static_cast<double>(s.rows.rows());
        Eigen::Matrix2d rot;
        const double c = std::sqrt(0.5);
        rot << c, -c, c, c;
        const Eigen::MatrixXd expected = rot * spec.base.shape.entries() * rot.transpose();
        CHECK((normalize_to_shape(cov).entries() - normalize_to_shape(expected).entries()).norm() < 0.02);
    }
    SECTION("label fraction tracks eta") {
        spec.kind = ContaminantKind::sphere;
        spec.eta = 0.25;
        const LabeledSample s = sample_mixture(spec, 4000, 41);
        double frac = 0;
        for (int label : s.labels) frac += label;
        frac /= 4000.0;
        CHECK_THAT(frac, Catch::Matchers::WithinAbs(0.25, 3.0 * std::sqrt(0.25 * 0.75 / 4000.0)));
    }
    SECTION("scaled sphere contaminant is four times larger") {
        spec.kind = ContaminantKind::sphere_scaled_4;
        spec.eta = 1.0;
        const LabeledSample s4 = sample_mixture(spec, 50000, 43);
        spec.kind = ContaminantKind::sphere;
        const LabeledSample s1 = sample_mixture(spec, 50000, 43);
        const double ratio = s4.rows.array().square().mean() / s1.rows.array().square().mean();
        CHECK_THAT(ratio, Catch::Matchers::WithinAbs(16.0, 0.5));
    }
}

TEST_CASE("regularized incomplete beta") {
    CHECK(beta_cdf(0.5, 0.5, 0.0) == 0.0);
    CHECK(beta_cdf(0.5, 0.5, 1.0) == 1.0);
    CHECK_THAT(beta_cdf(0.5, 0.5, 0.5), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(beta_cdf(0.5, 1.0, 0.25), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(beta_cdf(0.5, 1.0, 0.81), Catch::Matchers::WithinAbs(0.9, 1e-12));
    CHECK_THAT(beta_cdf(0.5, 0.5, 0.8),
               Catch::Matchers::WithinAbs((2.0 / M_PI) * std::asin(std::sqrt(0.8)), 1e-12));
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
        const double v = beta_cdf(1.5, 2.5, i / 40.0);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(beta_cdf(-1.0, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(beta_cdf(0.5, 0.5, 1.5), std::domain_error);
}

TEST_CASE("boxplot lower fence") {
    CHECK_THAT(boxplot_lower_fence({1, 2, 3, 4, 5, 6, 7, 8}), Catch::Matchers::WithinAbs(-2.5, 1e-12));
    CHECK(boxplot_lower_fence({3.5, 3.5, 3.5, 3.5, 3.5}) == 3.5);
    const double base = boxplot_lower_fence({0.1, 0.4, 0.2, 0.9, 0.6});
    CHECK_THAT(boxplot_lower_fence({2.1, 2.4, 2.2, 2.9, 2.6}), Catch::Matchers::WithinAbs(base + 2.0, 1e-12));
    CHECK_THROWS_AS(boxplot_lower_fence({1.0, 2.0, 3.0}), std::domain_error);
}

TEST_CASE("samplers are scale-free for depth") {
    // multiplying each radial part by an independent positive scalar leaves
    // every shape depth exactly unchanged
    const ShapeMatrix truth(Eigen::Vector2d(1.2, 0.8).asDiagonal().toDenseMatrix());
    const Eigen::MatrixXd rows =
        sample_elliptical(EllipticalModel{2, kZero2, truth, Generator::normal, 0.0}, 500, 47);
    Rng rng(47);
    Eigen::MatrixXd rescaled = rows;
    for (int i = 0; i < rows.rows(); ++i) rescaled.row(i) *= 0.01 + 5.0 * rng.next_double();

    const ShapeMatrix candidate = normalize_to_shape(Eigen::Vector2d(0.9, 1.1).asDiagonal());
    CHECK(shape_depth_fixed_theta(rows, kZero2, candidate) ==
          shape_depth_fixed_theta(rescaled, kZero2, candidate));
    CHECK(shape_depth_fixed_theta(rows, kZero2, truth) == shape_depth_fixed_theta(rescaled, kZero2, truth));
}
