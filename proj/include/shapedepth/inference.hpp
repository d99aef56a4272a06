#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "shapedepth/depth.hpp"
#include "shapedepth/errors.hpp"
#include "shapedepth/halfspace.hpp"
#include "shapedepth/rng.hpp"
#include "shapedepth/samplers.hpp"
#include "shapedepth/spd.hpp"

// Randomized depth-based shape test: Monte Carlo critical values on the 1/n
// lattice, the three-branch randomized decision, and the power and level
// robustness harnesses. Replicates use per-index substreams, so tables are
// identical whatever the thread count.

namespace shapedepth {

namespace detail {

// Index-parallel loop with order-independent effects: fn(i) must write only
// to slot i of its output.
template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count < 2) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

// Identity-shape elliptical draws into a preallocated matrix.
inline void fill_spherical(Eigen::MatrixXd& rows, Generator gen, Rng& sub) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) rows(i, c) = sub.next_gaussian();
        if (gen == Generator::cauchy) {
            double g = sub.next_gaussian();
            while (g == 0.0) g = sub.next_gaussian();
            rows.row(i) /= std::abs(g);
        }
    }
}

}  // namespace detail

// Null critical pair (t_{alpha,n}, gamma_{alpha,n}) plus its provenance.
struct Calibration {
    int k = 2;
    int n = 0;
    double alpha = 0.05;
    double t_crit = 0.0;      // multiple of 1/n
    double gamma_rand = 0.0;  // randomization probability at T = t_crit
    std::int64_t replicates = 0;
    std::uint64_t seed = 0;
    bool degenerate = false;  // no mass observed at t_crit (gamma forced to 0)

    std::int64_t t_num() const { return std::llround(t_crit * n); }
};

// Estimate the null alpha-quantile of T = D_theta(I_k, P_n) from seeded
// elliptical samples (the statistic is distribution-free under the null, so
// standard normal draws calibrate every null shape). The quantile is the
// smallest lattice value t with Fhat(t) >= alpha; gamma solves
// pr(T < t) + gamma pr(T = t) = alpha.
inline Calibration calibrate_critical_values(int k, int n, double alpha, std::int64_t replicates,
                                             std::uint64_t seed, const DirectionBudget& budget = {},
                                             Generator generator = Generator::normal, int threads = 1) {
    if (k < 2) throw std::domain_error("calibrate_critical_values: k must be >= 2");
    if (n < 1) throw std::domain_error("calibrate_critical_values: n must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("calibrate_critical_values: alpha in (0,1]");
    if (replicates < 1000) throw std::domain_error("calibrate_critical_values: need at least 1000 replicates");

    const ShapeMatrix identity(Eigen::MatrixXd::Identity(k, k));
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(k);
    const Rng master(seed);
    std::vector<std::int32_t> nums(static_cast<std::size_t>(replicates));

    detail::parallel_for(replicates, threads, [&](std::int64_t r) {
        Rng sub = master.substream(static_cast<std::uint64_t>(r));
        Eigen::MatrixXd rows(n, k);
        detail::fill_spherical(rows, generator, sub);
        DirectionBudget rep_budget = budget;
        rep_budget.seed = sub.next_u64();
        nums[static_cast<std::size_t>(r)] =
            static_cast<std::int32_t>(shape_depth_fixed_theta(rows, origin, identity, rep_budget).num);
    });

    std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
    for (const auto v : nums) ++counts[static_cast<std::size_t>(v)];

    // alpha * R snapped to an integer when it is one up to float noise, so
    // that e.g. 0.05 * 500000 compares as exactly 25000
    double target = alpha * static_cast<double>(replicates);
    if (std::abs(target - std::round(target)) < 1e-6) target = std::round(target);
    const auto need = static_cast<std::int64_t>(std::ceil(target - 1e-12));
    std::int64_t cum = 0;
    int t = n;
    std::int64_t below = 0, at = 0;
    for (int v = 0; v <= n; ++v) {
        below = cum;
        cum += counts[static_cast<std::size_t>(v)];
        if (cum >= need) {
            t = v;
            at = counts[static_cast<std::size_t>(v)];
            break;
        }
    }

    Calibration calib;
    calib.k = k;
    calib.n = n;
    calib.alpha = alpha;
    calib.t_crit = static_cast<double>(t) / static_cast<double>(n);
    calib.replicates = replicates;
    calib.seed = seed;
    if (at == 0) {
        calib.gamma_rand = 0.0;
        calib.degenerate = true;
    } else {
        calib.gamma_rand =
            std::clamp((target - static_cast<double>(below)) / static_cast<double>(at), 0.0, 1.0);
    }
    return calib;
}

enum class TestDecision { reject, accept, randomized_reject, randomized_accept };

inline const char* to_string(TestDecision d) {
    switch (d) {
        case TestDecision::reject: return "reject";
        case TestDecision::accept: return "accept";
        case TestDecision::randomized_reject: return "randomized-reject";
        case TestDecision::randomized_accept: return "randomized-accept";
    }
    return "?";
}

struct TestOutcome {
    DepthValue statistic;
    TestDecision decision = TestDecision::accept;
    std::optional<double> rand_draw;

    bool rejected() const {
        return decision == TestDecision::reject || decision == TestDecision::randomized_reject;
    }
};

// phi_D: reject when T < t, randomize at T = t, accept when T > t. The
// statistic is computed on data standardized by V0^{-1/2} against the
// identity shape, which is what makes identity-calibrated critical values
// valid for every null shape. The randomization draw has its own substream.
inline TestOutcome shape_test(const Eigen::MatrixXd& data, const Eigen::VectorXd& theta, const ShapeMatrix& v0,
                              const Calibration& calib, std::uint64_t seed, const DirectionBudget& budget = {}) {
    if (data.cols() != v0.dim() || theta.size() != v0.dim())
        throw dimension_error("shape_test: dimension mismatch");
    if (calib.k != v0.dim() || calib.n != data.rows())
        throw dimension_error("shape_test: calibration was computed for different (k, n)");

    const Eigen::MatrixXd inv_sqrt = matrix_inv_sqrt(v0.entries());
    const Eigen::MatrixXd standardized = (data.rowwise() - theta.transpose()) * inv_sqrt.transpose();
    const ShapeMatrix identity(Eigen::MatrixXd::Identity(v0.dim(), v0.dim()));
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(v0.dim());

    TestOutcome out;
    out.statistic = shape_depth_fixed_theta(standardized, origin, identity, budget);
    const std::int64_t t_num = calib.t_num();
    if (out.statistic.num < t_num) {
        out.decision = TestDecision::reject;
    } else if (out.statistic.num > t_num) {
        out.decision = TestDecision::accept;
    } else {
        const double draw = Rng(seed).substream(0x72616E64ull).next_double();
        out.rand_draw = draw;
        out.decision = draw < calib.gamma_rand ? TestDecision::randomized_reject : TestDecision::randomized_accept;
    }
    return out;
}

struct SimTableRow {
    double param = 0.0;
    double frequency = 0.0;
    std::int64_t replications = 0;
};

using SimTable = std::vector<SimTableRow>;

// Alternatives V_{l,xi} = I2 + l xi [[1, .5], [.5, -1]] (already trace 2).
inline ShapeMatrix power_alternative(int ell, double xi) {
    Eigen::Matrix2d b;
    b << 1.0, 0.5, 0.5, -1.0;
    Eigen::Matrix2d v = Eigen::Matrix2d::Identity() + static_cast<double>(ell) * xi * b;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(v);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::domain_error("power_simulation: alternative at ell=" + std::to_string(ell) +
                                " is not positive definite");
    return ShapeMatrix(v);
}

struct PowerConfig {
    int n = 500;
    double xi = 0.035;
    std::vector<int> ell_list = {0, 1, 2, 3, 4, 5, 6};
    Generator generator = Generator::normal;
    std::int64_t replications = 1000;
    std::uint64_t seed = 0;
    Calibration calibration;
    DirectionBudget budget{};
    int threads = 1;
};

// Rejection frequency of H0: V = I2 (theta = 0) under increasingly severe
// alternatives.
inline SimTable power_simulation(const PowerConfig& config) {
    for (int ell : config.ell_list) power_alternative(ell, config.xi);  // validate the whole list up front
    if (config.calibration.n != config.n || config.calibration.k != 2)
        throw dimension_error("power_simulation: calibration does not match (k=2, n)");

    const ShapeMatrix v0(Eigen::MatrixXd::Identity(2, 2));
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    SimTable table;
    const Rng master(config.seed);
    for (std::size_t li = 0; li < config.ell_list.size(); ++li) {
        const ShapeMatrix v = power_alternative(config.ell_list[li], config.xi);
        const Eigen::MatrixXd sqrt_v = matrix_sqrt(v.entries());
        const Rng param_stream = master.substream(li);
        std::vector<std::uint8_t> rejected(static_cast<std::size_t>(config.replications));
        detail::parallel_for(config.replications, config.threads, [&](std::int64_t r) {
            Rng sub = param_stream.substream(static_cast<std::uint64_t>(r));
            Eigen::MatrixXd rows(config.n, 2);
            detail::fill_spherical(rows, config.generator, sub);
            rows = rows * sqrt_v.transpose();
            rejected[static_cast<std::size_t>(r)] =
                shape_test(rows, origin, v0, config.calibration, sub.next_u64(), config.budget).rejected() ? 1 : 0;
        });
        std::int64_t count = 0;
        for (auto b : rejected) count += b;
        table.push_back({static_cast<double>(config.ell_list[li]),
                         static_cast<double>(count) / static_cast<double>(config.replications),
                         config.replications});
    }
    return table;
}

enum class ContaminationPattern { a, b, c };  // rotate45 / sphere / sphere scaled by 4

struct RobustnessConfig {
    Eigen::MatrixXd v0 = (Eigen::Matrix2d() << 2.0, 0.0, 0.0, 0.5).finished();  // normalized internally
    int n = 200;
    std::vector<double> eta_list = {0.0, 0.025, 0.05, 0.1, 0.2, 0.25, 0.3};
    ContaminationPattern pattern = ContaminationPattern::a;
    Generator generator = Generator::normal;
    std::int64_t replications = 1000;
    std::uint64_t seed = 0;
    Calibration calibration;
    DirectionBudget budget{};
    int threads = 1;
};

// Null rejection frequency of H0: V = V0 (theta = 0) under the mixture
// (1-eta) P^X + eta P^Y for the three contamination patterns.
inline SimTable robustness_simulation(const RobustnessConfig& config) {
    const ShapeMatrix v0 = normalize_to_shape(config.v0);
    if (v0.dim() != 2) throw dimension_error("robustness_simulation: bivariate only");
    if (config.calibration.n != config.n || config.calibration.k != 2)
        throw dimension_error("robustness_simulation: calibration does not match (k=2, n)");
    for (double eta : config.eta_list)
        if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("robustness_simulation: eta must lie in [0,1]");

    MixtureSpec spec;
    spec.base = EllipticalModel{2, Eigen::VectorXd::Zero(2), v0, config.generator, 0.0};
    spec.contaminant = spec.base;
    switch (config.pattern) {
        case ContaminationPattern::a: spec.kind = ContaminantKind::rotate45; break;
        case ContaminationPattern::b: spec.kind = ContaminantKind::sphere; break;
        case ContaminationPattern::c: spec.kind = ContaminantKind::sphere_scaled_4; break;
    }

    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    SimTable table;
    const Rng master(config.seed);
    for (std::size_t ei = 0; ei < config.eta_list.size(); ++ei) {
        MixtureSpec eta_spec = spec;
        eta_spec.eta = config.eta_list[ei];
        const Rng param_stream = master.substream(ei);
        std::vector<std::uint8_t> rejected(static_cast<std::size_t>(config.replications));
        detail::parallel_for(config.replications, config.threads, [&](std::int64_t r) {
            Rng sub = param_stream.substream(static_cast<std::uint64_t>(r));
            const LabeledSample sample = sample_mixture(eta_spec, config.n, sub.next_u64());
            rejected[static_cast<std::size_t>(r)] =
                shape_test(sample.rows, origin, v0, config.calibration, sub.next_u64(), config.budget).rejected()
                    ? 1
                    : 0;
        });
        std::int64_t count = 0;
        for (auto b : rejected) count += b;
        table.push_back({config.eta_list[ei],
                         static_cast<double>(count) / static_cast<double>(config.replications),
                         config.replications});
    }
    return table;
}

}  // namespace shapedepth
