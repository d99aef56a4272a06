// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failures. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "shapedepth/shapedepth.hpp"
#include "test_oracles.hpp"

using namespace shapedepth;

namespace {

const Eigen::VectorXd kZero2 = Eigen::VectorXd::Zero(2);
constexpr std::uint64_t kSeed = 20260810ull;  // pre-registered, fixed
constexpr int kThreads = 2;

struct Criterion {
    int number;
    std::string name;
    bool pass = true;
    std::string detail;
};

std::vector<Criterion> results;

void report(int number, const std::string& name, bool pass, const std::string& detail,
            std::chrono::steady_clock::time_point t0) {
    const auto secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count() /
        1000.0;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " criterion " << number << ": " << name << " (" << detail << "; "
         << secs << " s)";
    std::cout << line.str() << std::endl;
    results.push_back({number, name, pass, detail});
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ShapeMatrix random_shape_2d(Rng& rng) {
    Eigen::Matrix2d a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = rng.next_gaussian();
    return normalize_to_shape(a * a.transpose() + 0.05 * Eigen::Matrix2d::Identity());
}

// ---------------------------------------------------------------- criteria

void criterion_1_exact_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(kSeed);
    int matches = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        Rng sub = rng.substream(t);
        const Eigen::MatrixXd pts = test_oracles::random_cloud_2d(sub, 100);
        if (origin_depth_exact_2d(pts).num == test_oracles::brute_force_origin_depth_2d(pts)) ++matches;
    }
    report(1, "exact 2-D depth equals brute-force candidate enumeration", matches == trials,
           std::to_string(matches) + "/" + std::to_string(trials) + " exact", t0);
}

void criterion_2_dimension_reduction() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(kSeed + 2);
    const Eigen::MatrixXd& h = expansion_matrix(2);
    const Eigen::MatrixXd hmap = h * (h.transpose() * h).inverse();
    int matches = 0;
    const int trials = 100;
    const auto wrap = [](double a) {
        if (a >= 2.0 * M_PI) a -= 2.0 * M_PI;
        if (a < 0.0) a += 2.0 * M_PI;
        return (a >= 2.0 * M_PI || a < 0.0) ? 0.0 : a;
    };
    for (int t = 0; t < trials; ++t) {
        Rng sub = rng.substream(t);
        const int n = 3 + static_cast<int>(sub.next_u64() % 58);
        Eigen::MatrixXd data(n, 2);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 2; ++c) data(i, c) = sub.next_gaussian();
        const ShapeMatrix v = random_shape_2d(sub);
        const DepthValue reduced = shape_depth_fixed_theta(data, kZero2, v);

        const Eigen::MatrixXd wcloud = wtilde_cloud(data, kZero2, v.entries());
        const Eigen::MatrixXd inv_sqrt = matrix_inv_sqrt(v.entries());
        Eigen::MatrixXd vec_cloud(n, 4);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd u = sign_vector_standardized(data.row(i), kZero2, inv_sqrt);
            const Eigen::MatrixXd l = u * u.transpose() - 0.5 * Eigen::MatrixXd::Identity(2, 2);
            vec_cloud.row(i) = Eigen::Map<const Eigen::VectorXd>(l.data(), 4).transpose();
        }
        std::vector<double> cand;
        for (int i = 0; i < n; ++i) {
            if (wcloud(i, 0) == 0.0 && wcloud(i, 1) == 0.0) continue;
            const double phi = wrap(std::atan2(wcloud(i, 1), wcloud(i, 0)));
            cand.push_back(wrap(phi + M_PI / 2.0));
            cand.push_back(wrap(phi - M_PI / 2.0));
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        std::int64_t best = n;
        for (std::size_t j = 0; j < cand.size(); ++j) {
            const double next = (j + 1 < cand.size()) ? cand[j + 1] : cand.front() + 2.0 * M_PI;
            const double mid = 0.5 * (cand[j] + next);
            const Eigen::VectorXd dir4 = hmap * Eigen::Vector2d(std::cos(mid), std::sin(mid));
            std::int64_t count = 0;
            for (int i = 0; i < n; ++i)
                if (dir4.dot(vec_cloud.row(i)) >= 0.0) ++count;
            best = std::min(best, count);
        }
        if (reduced == DepthValue{best, n}) ++matches;
    }
    report(2, "reduced-cloud depth equals the vec-space infimum over H-mapped directions", matches == trials,
           std::to_string(matches) + "/" + std::to_string(trials) + " exact", t0);
}

void criterion_3_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(kSeed + 3);
    double worst = 0.0;
    bool rescale_ok = true;
    const int pairs = 10;
    for (int t = 0; t < pairs; ++t) {
        Rng sub = rng.substream(t);
        const ShapeMatrix v = random_shape_2d(sub);
        const ShapeMatrix v0 = random_shape_2d(sub);
        const EllipticalModel model{2, kZero2, v0, Generator::normal, 0.0};
        const Eigen::MatrixXd data = sample_elliptical(model, 20000, sub.next_u64());
        const double emp = shape_depth_fixed_theta(data, kZero2, v).value();
        worst = std::max(worst, std::abs(emp - elliptical_depth_k2(v, model)));

        if (t == 0) {
            Eigen::MatrixXd rescaled = data;
            for (int i = 0; i < rescaled.rows(); ++i) rescaled.row(i) *= 0.02 + 4.0 * sub.next_double();
            rescale_ok = shape_depth_fixed_theta(rescaled, kZero2, v) ==
                         shape_depth_fixed_theta(data, kZero2, v);
        }
    }
    std::ostringstream detail;
    detail << "max |empirical - closed form| = " << worst << " (tol 0.02), radial rescale exact: "
           << (rescale_ok ? "yes" : "no");
    report(3, "closed-form elliptical depth agreement at n = 20000", worst <= 0.02 && rescale_ok, detail.str(),
           t0);
}

void criterion_4_max_depth() {
    const auto t0 = std::chrono::steady_clock::now();
    const ShapeMatrix id(Eigen::MatrixXd::Identity(2, 2));
    const EllipticalModel model{2, kZero2, id, Generator::normal, 0.0};
    std::vector<double> depths;
    for (int s = 0; s < 20; ++s)
        depths.push_back(
            shape_depth_fixed_theta(sample_elliptical(model, 2000, kSeed + 40 + s), kZero2, id).value());
    const double med = median(depths);
    const double limit = max_depth_value(200, 0.0);
    std::ostringstream detail;
    detail << "median depth = " << med << " (0.5 +- 0.03), k=200 limit = " << limit << " (0.317 +- 0.005)";
    report(4, "maximal depth at the true shape and the large-k limit",
           std::abs(med - 0.5) <= 0.03 && std::abs(limit - 0.317) <= 0.005, detail.str(), t0);
}

void criterion_5_affine_invariance() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(kSeed + 5);
    int matches = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        Rng sub = rng.substream(t);
        const int n = 5 + static_cast<int>(sub.next_u64() % 40);
        Eigen::MatrixXd data(n, 2);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 2; ++c) data(i, c) = sub.next_gaussian();
        const ShapeMatrix v = random_shape_2d(sub);
        Eigen::Vector2d theta(sub.next_gaussian(), sub.next_gaussian());
        Eigen::Matrix2d a;
        do {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) a(i, j) = sub.next_gaussian();
        } while (std::abs(a.determinant()) < 0.05);
        const Eigen::Vector2d b(sub.next_gaussian(), sub.next_gaussian());
        const ShapeMatrix va = normalize_to_shape(a * v.entries() * a.transpose());
        const Eigen::MatrixXd mapped = (data * a.transpose()).rowwise() + b.transpose();
        if (shape_depth_fixed_theta(mapped, a * theta + b, va) == shape_depth_fixed_theta(data, theta, v))
            ++matches;
    }
    report(5, "affine invariance of the exact bivariate depth", matches == trials,
           std::to_string(matches) + "/" + std::to_string(trials) + " exact", t0);
}

void criterion_6_quasi_concavity() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(kSeed + 6);
    Eigen::MatrixXd data(50, 2);
    for (int i = 0; i < 50; ++i)
        for (int c = 0; c < 2; ++c) data(i, c) = rng.next_gaussian();
    int violations = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        Rng sub = rng.substream(t);
        const ShapeMatrix va = random_shape_2d(sub);
        const ShapeMatrix vb = random_shape_2d(sub);
        const double w = sub.next_double();
        const ShapeMatrix vt = ShapeMatrix((1.0 - w) * va.entries() + w * vb.entries());
        const DepthValue lo =
            std::min(shape_depth_fixed_theta(data, kZero2, va), shape_depth_fixed_theta(data, kZero2, vb));
        if (shape_depth_fixed_theta(data, kZero2, vt) < lo) ++violations;
    }
    report(6, "quasi-concavity along shape segments", violations == 0,
           std::to_string(violations) + " violations in " + std::to_string(trials) + " triples", t0);
}

void criterion_7_consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    const ShapeMatrix truth(Eigen::Vector2d(1.6, 0.4).asDiagonal().toDenseMatrix());
    const EllipticalModel model{2, kZero2, truth, Generator::normal, 0.0};

    int close = 0;
    std::vector<double> depth_errs;
    std::vector<double> medians;
    for (int n : {200, 800, 3200}) {
        std::vector<double> dists;
        for (int s = 0; s < 20; ++s) {
            DeepestShapeOptions opts;
            opts.seed = kSeed + static_cast<std::uint64_t>(s);
            const Eigen::MatrixXd data =
                sample_elliptical(model, n, kSeed + 100ull * static_cast<std::uint64_t>(n) + s);
            const DeepestShapeResult res = deepest_shape_fixed_theta(data, kZero2, opts);
            const double dist = geodesic_distance(res.shape, truth);
            dists.push_back(dist);
            if (n == 800) {
                if (dist <= 0.25) ++close;
                depth_errs.push_back(std::abs(res.depth.value() - 0.5));
            }
        }
        medians.push_back(median(dists));
    }
    const bool trend = medians[1] < medians[0] && medians[2] < medians[1];
    std::ostringstream detail;
    detail << close << "/20 seeds within geodesic 0.25 at n=800 (need >= 18), median |depth-0.5| = "
           << median(depth_errs) << ", median distances " << medians[0] << " > " << medians[1] << " > "
           << medians[2];
    report(7, "deepest-shape consistency at desk scale", close >= 18 && trend && median(depth_errs) <= 0.05,
           detail.str(), t0);
}

Calibration g_calib_n200;
Calibration g_calib_n500;

void criterion_8_calibration() {
    const auto t0 = std::chrono::steady_clock::now();
    // Replicate count follows the paper's own calibration run: at the
    // library default of 100000, sigma(gamma_rand) is about 0.05 and the
    // +-0.05 gamma gates below would be coin flips.
    const std::int64_t reps = 500000;
    const Calibration n200 =
        calibrate_critical_values(2, 200, 0.05, reps, kSeed, {}, Generator::normal, kThreads);
    const Calibration n500 =
        calibrate_critical_values(2, 500, 0.05, reps, kSeed, {}, Generator::normal, kThreads);
    const Calibration c200 =
        calibrate_critical_values(2, 200, 0.05, reps, kSeed + 1, {}, Generator::cauchy, kThreads);
    const Calibration c500 =
        calibrate_critical_values(2, 500, 0.05, reps, kSeed + 1, {}, Generator::cauchy, kThreads);
    g_calib_n200 = n200;
    g_calib_n500 = n500;

    // The reported two-decimal critical values 0.40 and 0.43 are displays of
    // the lattice points 79/200 = 0.395 and 217/500 = 0.434: at 80/200 the
    // reported randomization probability 0.61 would be negative, and at
    // 215/500 the reported 0.25 would exceed one. The gate therefore
    // compares at display precision.
    const bool t200_ok = std::llround(100.0 * n200.t_crit) == 40;
    const bool t500_ok = std::llround(100.0 * n500.t_crit) == 43;
    const bool g200_ok = std::abs(n200.gamma_rand - 0.61) <= 0.05;
    const bool g500_ok = std::abs(n500.gamma_rand - 0.25) <= 0.05;
    const bool free_ok = n200.t_crit == c200.t_crit && n500.t_crit == c500.t_crit;

    std::ostringstream detail;
    detail << "t200 = " << n200.t_crit << " (prints 0.40), gamma200 = " << n200.gamma_rand
           << " (0.61 +- 0.05); t500 = " << n500.t_crit << " (prints 0.43), gamma500 = " << n500.gamma_rand
           << " (0.25 +- 0.05); cauchy t identical: " << (free_ok ? "yes" : "no") << ", cauchy gammas "
           << c200.gamma_rand << "/" << c500.gamma_rand;
    report(8, "test calibration reproduces the reported critical values",
           t200_ok && t500_ok && g200_ok && g500_ok && free_ok, detail.str(), t0);
}

void criterion_9_level_and_power() {
    const auto t0 = std::chrono::steady_clock::now();

    PowerConfig pc;
    pc.n = 500;
    pc.xi = 0.035;
    pc.ell_list = {0, 1, 2, 3, 4, 5, 6};
    pc.generator = Generator::normal;
    pc.replications = 1000;
    pc.seed = kSeed + 9;
    pc.calibration = g_calib_n500;
    pc.threads = kThreads;
    const SimTable power = power_simulation(pc);

    const bool level_ok = std::abs(power[0].frequency - 0.05) <= 0.015;
    int inversions = 0;
    double worst_inversion = 0.0;
    for (std::size_t i = 1; i < power.size(); ++i)
        if (power[i].frequency < power[i - 1].frequency) {
            ++inversions;
            worst_inversion = std::max(worst_inversion, power[i - 1].frequency - power[i].frequency);
        }
    const bool monotone_ok = inversions <= 1 && worst_inversion <= 0.02;
    const bool tail_ok = power.back().frequency >= 0.8;

    RobustnessConfig rc;
    rc.n = 200;
    rc.eta_list = {0.0};
    rc.generator = Generator::normal;
    rc.replications = 1000;
    rc.seed = kSeed + 10;
    rc.calibration = g_calib_n200;
    rc.threads = kThreads;
    rc.pattern = ContaminationPattern::a;
    const SimTable rob_a = robustness_simulation(rc);
    rc.pattern = ContaminationPattern::b;
    const SimTable rob_b = robustness_simulation(rc);
    const bool null_ok =
        std::abs(rob_a[0].frequency - 0.05) <= 0.015 && rob_a[0].frequency == rob_b[0].frequency;

    std::ostringstream detail;
    detail << "power: level " << power[0].frequency << " (0.05 +- 0.015), " << inversions
           << " inversion(s) up to " << worst_inversion << ", power(l=6) = " << power.back().frequency
           << " (>= 0.8, regression baseline); robustness eta=0: " << rob_a[0].frequency
           << ", equal across patterns: " << (rob_a[0].frequency == rob_b[0].frequency ? "yes" : "no");
    report(9, "null level and monotone power at desk scale", level_ok && monotone_ok && tail_ok && null_ok,
           detail.str(), t0);
}

void criterion_10_mcd_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(kSeed + 11);
    int exact = 0, within = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        Rng sub = rng.substream(t);
        Eigen::MatrixXd data(12, 2);
        for (int i = 0; i < 12; ++i)
            for (int c = 0; c < 2; ++c) data(i, c) = sub.next_gaussian();
        const McdResult res = mcd_subset(data, 8.0 / 12.0, 50, sub.next_u64());
        const auto oracle = test_oracles::exhaustive_mcd(data, 8);
        if (res.determinant <= oracle.determinant * 1.05) ++within;
        if (res.subset == oracle.subset) ++exact;
    }
    report(10, "concentration search versus exhaustive MCD enumeration", within == trials && exact >= 80,
           std::to_string(within) + "/100 within 5%, " + std::to_string(exact) + "/100 exact (need >= 80)", t0);
}

void criterion_11_gamma_curve() {
    const auto t0 = std::chrono::steady_clock::now();

    // Section 5.1 mixture at delta = 5, eta = 0.2, n = 400.
    MixtureSpec spec;
    spec.base = EllipticalModel{2, kZero2, normalize_to_shape(Eigen::Vector2d(4.0, 1.0).asDiagonal()),
                                Generator::normal, 0.0};
    spec.contaminant = EllipticalModel{2, Eigen::Vector2d(0.0, 5.0),
                                       ShapeMatrix(Eigen::MatrixXd::Identity(2, 2)), Generator::normal, 0.0};
    spec.kind = ContaminantKind::model;
    spec.eta = 0.2;
    spec.contaminant_sign_flip = true;
    const double base_scale = std::sqrt(5.0 / 2.0);  // scatter diag(4,1) from the trace-2 shape

    LabeledSample sample = sample_mixture(spec, 400, kSeed + 12);
    for (int i = 0; i < 400; ++i)
        if (sample.labels[static_cast<std::size_t>(i)] == 0) sample.rows.row(i) *= base_scale;
    const GammaCurve curve = gamma_depth_curve(sample.rows, {0.80, 0.90}, 100, kSeed + 13);
    const double drop = curve[0].depth.value() - curve[1].depth.value();

    // figure2-mode MSE over gamma, R = 100 replications.
    std::vector<double> gammas;
    for (int i = 0; i <= 10; ++i) gammas.push_back(0.5 + 0.05 * i);
    std::vector<double> mse(gammas.size(), 0.0);
    const Rng master(kSeed + 14);
    std::vector<std::vector<double>> errs(gammas.size(), std::vector<double>(100, 0.0));
    detail::parallel_for(100, kThreads, [&](std::int64_t r) {
        Rng sub = master.substream(static_cast<std::uint64_t>(r));
        LabeledSample rep = sample_mixture(spec, 400, sub.next_u64());
        for (int i = 0; i < 400; ++i)
            if (rep.labels[static_cast<std::size_t>(i)] == 0) rep.rows.row(i) *= base_scale;
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            const McdResult res = mcd_subset(rep.rows, gammas[gi], 50, sub.next_u64());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.shape.entries());
            errs[gi][static_cast<std::size_t>(r)] =
                std::acos(std::min(1.0, std::abs(es.eigenvectors().col(1)[0])));
        }
    });
    std::size_t best_gi = 0;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        for (double e : errs[gi]) mse[gi] += e * e;
        if (mse[gi] < mse[best_gi]) best_gi = gi;
    }
    const double minimizer = gammas[best_gi];

    std::ostringstream detail_str;
    detail_str << "depth drop over [0.80, 0.90] = " << drop << " (>= 0.05), MSE minimizer at gamma = "
               << minimizer << " (0.8 +- 0.05)";
    report(11, "gamma-curve kink and figure-2 MSE minimizer", drop >= 0.05 && std::abs(minimizer - 0.8) <= 0.05,
           detail_str.str(), t0);
}

void criterion_12_tyler() {
    const auto t0 = std::chrono::steady_clock::now();

    Eigen::MatrixXd plus(4, 2);
    plus << 1, 0, -1, 0, 0, 1, 0, -1;
    const ShapeMatrix sym = tyler_m_estimator(plus, kZero2);
    const double sym_err = (sym.entries() - Eigen::MatrixXd::Identity(2, 2)).norm();

    const ShapeMatrix truth(Eigen::Vector2d(1.6, 0.4).asDiagonal().toDenseMatrix());
    const Eigen::MatrixXd data =
        sample_elliptical(EllipticalModel{2, kZero2, truth, Generator::normal, 0.0}, 2000, kSeed + 15);
    const ShapeMatrix est = tyler_m_estimator(data, kZero2, 1e-9, 500);
    const double frob = (est.entries() - truth.entries()).norm();
    const Eigen::VectorXd mean_w = wtilde_cloud(data, kZero2, est.entries()).colwise().mean();
    const double residual = wtilde_expand(mean_w, 2).norm();

    std::ostringstream detail;
    detail << "fixed-point residual = " << residual << " (<= 2e-9 after renormalization), |est - truth|_F = "
           << frob << " (<= 0.1), symmetric 4-point error = " << sym_err << " (<= 1e-10)";
    report(12, "Tyler M-estimator accuracy", residual <= 2e-9 && frob <= 0.1 && sym_err <= 1e-10, detail.str(),
           t0);
}

void criterion_13_scan() {
    const auto t0 = std::chrono::steady_clock::now();
    // 20 synthetic groups, 2 with a 45-degree rotated shape, through the
    // scan pipeline's building blocks.
    const ShapeMatrix clean(Eigen::Vector2d(1.6, 0.4).asDiagonal().toDenseMatrix());
    Eigen::Matrix2d rot;
    const double c = std::sqrt(0.5);
    rot << c, -c, c, c;
    const ShapeMatrix rotated = normalize_to_shape(rot * clean.entries() * rot.transpose());
    const EllipticalModel clean_model{2, kZero2, clean, Generator::normal, 0.0};
    const double gap =
        elliptical_depth_k2(clean, clean_model) - elliptical_depth_k2(rotated, clean_model);

    const int n_groups = 20, per_group = 90;
    Eigen::MatrixXd pooled(n_groups * per_group, 2);
    std::vector<bool> atypical(n_groups, false);
    atypical[4] = atypical[13] = true;
    for (int g = 0; g < n_groups; ++g) {
        const EllipticalModel model{2, kZero2, atypical[static_cast<std::size_t>(g)] ? rotated : clean,
                                    Generator::normal, 0.0};
        pooled.middleRows(g * per_group, per_group) =
            sample_elliptical(model, per_group, kSeed + 600 + static_cast<std::uint64_t>(g));
    }
    std::vector<double> gammas;
    for (int i = 0; i <= 10; ++i) gammas.push_back(0.5 + 0.05 * i);
    const auto [gamma_hat, depth_hat] = select_gamma_max_depth(pooled, gammas, pooled, 60, kSeed + 16);
    std::size_t gi = 0;
    while (gammas[gi] != gamma_hat) ++gi;
    const McdResult full = mcd_subset(pooled, gamma_hat, 60, Rng(kSeed + 16).substream(gi).next_u64());

    std::vector<double> depths(n_groups);
    for (int g = 0; g < n_groups; ++g)
        depths[static_cast<std::size_t>(g)] =
            shape_depth(pooled.middleRows(g * per_group, per_group), full.shape).value();
    const double fence = boxplot_lower_fence(depths);
    bool exact_flags = true;
    for (int g = 0; g < n_groups; ++g)
        if ((depths[static_cast<std::size_t>(g)] < fence) != atypical[static_cast<std::size_t>(g)])
            exact_flags = false;

    std::ostringstream detail;
    detail << "closed-form depth gap = " << gap << ", gamma_hat = " << gamma_hat << ", fence = " << fence
           << ", flagged exactly the 2 planted groups: " << (exact_flags ? "yes" : "no");
    report(13, "group scan flags exactly the planted atypical groups", exact_flags, detail.str(), t0);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1_exact_oracle();
    criterion_2_dimension_reduction();
    criterion_3_closed_form();
    criterion_4_max_depth();
    criterion_5_affine_invariance();
    criterion_6_quasi_concavity();
    criterion_7_consistency();
    criterion_8_calibration();
    criterion_9_level_and_power();
    criterion_10_mcd_oracle();
    criterion_11_gamma_curve();
    criterion_12_tyler();
    criterion_13_scan();

    int failures = 0;
    for (const auto& r : results)
        if (!r.pass) ++failures;
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "\n" << (results.size() - failures) << "/" << results.size() << " criteria passed in " << secs
              << " s" << std::endl;
    return failures;
}
