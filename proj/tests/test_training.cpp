#include "doctest.h"
#include "kuramoto/dynamics.hpp"
#include "kuramoto/geometry.hpp"
#include "kuramoto/training.hpp"

using namespace kuramoto;

namespace {

// equilibrium snapshots of the Langevin model for a real symmetric coupling
std::vector<VectorXd> langevin_snapshots(const MatrixXd& k, double noise_kappa, int count,
                                         double spacing, std::uint64_t seed) {
    const int n = static_cast<int>(k.rows());
    Rng init(seed, 0xDA7A);
    VectorXd phases(n);
    for (int i = 0; i < n; ++i) phases[i] = init.uniform(0.0, kTwoPi);
    PhaseEnsemble m = PhaseEnsemble::symmetric(phases, 0.0, k, MatrixXd::Zero(n, n), noise_kappa);
    IntegratorConfig cfg{Method::EulerMaruyama, 1e-2, true};
    const double burn = 100.0 / noise_kappa;
    auto warm = simulate(m, cfg, burn, 1 << 30, seed);
    PhaseEnsemble state = warm.snapshots.back();
    std::vector<VectorXd> out;
    const int stride = std::max(1, static_cast<int>(spacing / cfg.dt));
    std::uint64_t step = 1u << 20;  // continue the noise stream past the burn-in
    while (static_cast<int>(out.size()) < count) {
        for (int s = 0; s < stride; ++s) state = step_phase(state, cfg, NoiseStream{seed, step++});
        out.push_back(state.phases);
    }
    return out;
}

}  // namespace

TEST_CASE("parameter_count matches the closed-form accounting") {
    CHECK(parameter_count(ParamCountMode::MoebiusSubEnsembles, 1) == 5);
    CHECK(parameter_count(ParamCountMode::MoebiusSubEnsembles, 4) == 26);
    CHECK(parameter_count(ParamCountMode::TorusCoupled, 3) == 21);
    CHECK(parameter_count(ParamCountMode::TorusCoupled, 1) == 5);
    CHECK_THROWS_AS(parameter_count(ParamCountMode::TorusCoupled, 0), InvalidParams);
}

TEST_CASE("cma-es minimizes the 10-d sphere function") {
    VectorXd target(10);
    for (int i = 0; i < 10; ++i) target[i] = 0.1 * (i - 4);
    auto f = [&](const VectorXd& x) { return (x - target).squaredNorm(); };
    ESOptions opt;
    opt.max_generations = 200;
    opt.seed = 7;
    ESResult res = es_optimize(f, ESState::from_point(VectorXd::Ones(10), 0.5), {}, opt);
    CHECK((res.best - target).norm() <= 1e-6);
    // elitist history is nonincreasing
    for (std::size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i] <= res.history[i - 1]);
}

TEST_CASE("cma-es is deterministic per seed and reports objective failures") {
    auto f = [](const VectorXd& x) { return x.squaredNorm(); };
    ESOptions opt;
    opt.max_generations = 40;
    opt.seed = 11;
    ESResult a = es_optimize(f, ESState::from_point(VectorXd::Ones(4), 0.4), {}, opt);
    ESResult b = es_optimize(f, ESState::from_point(VectorXd::Ones(4), 0.4), {}, opt);
    CHECK(a.history == b.history);
    CHECK((a.best - b.best).norm() == 0.0);

    auto boom = [](const VectorXd&) -> double { throw std::runtime_error("nope"); };
    CHECK_THROWS_AS(es_optimize(boom, ESState::from_point(VectorXd::Ones(3)), {}, opt),
                    ObjectiveFailure);
    ESOptions tiny;
    tiny.lambda = 3;
    CHECK_THROWS_AS(es_optimize(f, ESState::from_point(VectorXd::Ones(3)), {}, tiny),
                    InvalidParams);
}

TEST_CASE("cma-es retracts manifold blocks") {
    // minimize distance to a direction on the unit circle block + ball block
    ManifoldSpec spec;
    spec.blocks.push_back({ManifoldBlock::Kind::Angle, 0, 1, 0.0});
    spec.blocks.push_back({ManifoldBlock::Kind::Ball, 1, 2, 0.9});
    auto f = [](const VectorXd& x) {
        return sqr(circular_diff(x[0], 2.0)) + sqr(x[1] - 2.0) + sqr(x[2] + 2.0);
    };
    ESOptions opt;
    opt.max_generations = 150;
    opt.seed = 3;
    ESResult res = es_optimize(f, ESState::from_point(VectorXd::Zero(3), 0.5), spec, opt);
    CHECK(res.best[0] >= 0.0);
    CHECK(res.best[0] < kTwoPi);
    CHECK(std::abs(circular_diff(res.best[0], 2.0)) <= 1e-4);
    // ball block clamped to radius 0.9: optimum is the boundary point toward (2, -2)
    CHECK(res.best.segment(1, 2).norm() <= 0.9 + 1e-12);
    CHECK(res.best.segment(1, 2).norm() >= 0.9 - 1e-6);
}

TEST_CASE("score matching: null data gives near-zero couplings") {
    Rng rng(161);
    std::vector<VectorXd> snaps;
    for (int s = 0; s < 100000; ++s) {
        VectorXd p(4);
        for (int i = 0; i < 4; ++i) p[i] = rng.uniform(0.0, kTwoPi);
        snaps.push_back(p);
    }
    auto fit = score_matching_fit(snaps, 1.0);
    CHECK(fit.k.cwiseAbs().maxCoeff() <= 0.05);
    CHECK(fit.residual <= 1e-8);
}

TEST_CASE("score matching recovers a random symmetric network from equilibrium data") {
    Rng rng(162);
    const int n = 4;
    MatrixXd k = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) k(i, j) = k(j, i) = rng.uniform(-1.0, 1.0);
    const double noise = 1.0;
    auto snaps = langevin_snapshots(k, noise, 100000, 0.25, 909);
    auto fit = score_matching_fit(snaps, noise);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) CHECK(std::abs(fit.k(i, j) - k(i, j)) <= 0.1);
    CHECK(fit.residual <= 1e-8);
    // relabeling equivariance: permuting the oscillators permutes the estimate
    std::vector<int> perm = {2, 0, 3, 1};
    std::vector<VectorXd> permuted;
    for (const auto& s : snaps) {
        VectorXd p(n);
        for (int i = 0; i < n; ++i) p[i] = s[perm[i]];
        permuted.push_back(p);
    }
    auto pfit = score_matching_fit(permuted, noise);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) CHECK(pfit.k(i, j) == doctest::Approx(fit.k(perm[i], perm[j])).epsilon(1e-9));
}

TEST_CASE("score matching rejects synchronized data") {
    std::vector<VectorXd> snaps(200, VectorXd::Constant(4, 1.0));
    CHECK_THROWS_AS(score_matching_fit(snaps), SingularSystem);
}

TEST_CASE("mle update vanishes statistically when data comes from the model") {
    Rng rng(163);
    const int n = 3;
    MatrixXd k = MatrixXd::Zero(n, n);
    k(0, 1) = k(1, 0) = 0.8;
    k(1, 2) = k(2, 1) = -0.5;
    const double noise = 1.0;
    auto data = langevin_snapshots(k, noise, 10000, 0.5, 414);
    auto model = langevin_snapshots(k, noise, 10000, 0.5, 415);

    TrainProblem problem;
    problem.n_oscillators = n;
    problem.noise_kappa = noise;
    problem.dataset = data;

    HermitianCouplingMatrix kap{MatrixXcd(k.cast<Complex>())};
    const double lr = 1.0;
    HermitianCouplingMatrix next = mle_gradient_step(problem, kap, data, model, lr, 1e9);
    const MatrixXcd update = next.kappa - kap.kappa;

    // z-test per coordinate: the update is a difference of two means of
    // bounded quantities; 3 sigma with sd <= 1/sqrt(n_samples) per term
    const double sigma = std::sqrt(2.0 / 10000.0) / (n * noise);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            CHECK(std::abs(update(i, j).real()) <= 3.0 * sigma);
            CHECK(std::abs(update(i, j).imag()) <= 3.0 * sigma);
        }
    // Hermitian by construction
    CHECK((next.kappa - next.kappa.adjoint()).norm() <= 1e-14);
}

TEST_CASE("mle training recovers a 2-oscillator coupling") {
    const int n = 2;
    MatrixXd k = MatrixXd::Zero(n, n);
    k(0, 1) = k(1, 0) = 1.0;
    const double noise = 1.0;
    auto data = langevin_snapshots(k, noise, 10000, 0.5, 515);

    TrainProblem problem;
    problem.n_oscillators = n;
    problem.noise_kappa = noise;
    problem.dataset = data;
    problem.learn_beta = false;

    MleTrainOptions opt;
    opt.iterations = 300;
    opt.lr = 5e-2;
    opt.seed = 99;
    auto result = mle_train(problem, opt);
    CHECK(std::abs(result.kappa(0, 1).real() - 1.0) <= 0.1);

    // resuming reproduces the uninterrupted run bit for bit
    MleTrainOptions first = opt;
    first.iterations = 150;
    auto part = mle_train(problem, first);
    MleTrainOptions rest = opt;
    rest.iterations = 150;
    auto full = mle_train(problem, rest, part.kappa, part.chains, 150);
    CHECK((full.kappa - result.kappa).norm() == 0.0);
}

TEST_CASE("finite differences confirm the mle gradient direction") {
    // <d log q / d kappa> equals the moment gap; check against a finite
    // difference of the exact log-likelihood on a tiny N = 2 model where the
    // normalizer is computable by quadrature
    Rng rng(164);
    const int n = 2;
    auto logz = [&](double kk) {
        // Z(k) = int exp(k cos(d)) over the pair angle difference
        // log q(phi) = k cos(phi1 - phi2) / (N noise) + const, N noise = 2
        double acc = 0.0;
        const int grid = 4096;
        for (int i = 0; i < grid; ++i)
            acc += std::exp(kk * std::cos(kTwoPi * i / grid) / 2.0) / grid;
        return std::log(acc);
    };
    std::vector<VectorXd> data;
    for (int s = 0; s < 4000; ++s) {
        VectorXd p(2);
        p << rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi);
        data.push_back(p);
    }
    const double k0 = 0.7;
    auto mean_loglik = [&](double kk) {
        double acc = 0.0;
        for (const auto& p : data) acc += kk * std::cos(p[0] - p[1]) / 2.0;
        return acc / data.size() - logz(kk);
    };
    const double h = 1e-5;
    const double fd = (mean_loglik(k0 + h) - mean_loglik(k0 - h)) / (2.0 * h);

    // analytic: (<cos>_data - <cos>_model)/2; model moment by quadrature
    double num = 0.0, den = 0.0;
    const int grid = 8192;
    for (int i = 0; i < grid; ++i) {
        const double dphi = kTwoPi * i / grid;
        const double w = std::exp(k0 * std::cos(dphi) / 2.0);
        num += w * std::cos(dphi);
        den += w;
    }
    double data_cos = 0.0;
    for (const auto& p : data) data_cos += std::cos(p[0] - p[1]);
    data_cos /= data.size();
    const double analytic = (data_cos - num / den) / 2.0;
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(fd)));
}
