#include "kuramoto/training.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

#include "kuramoto/rng.hpp"

namespace kuramoto {

// ---------------------------------------------------------------------------
// manifold retraction
// ---------------------------------------------------------------------------

VectorXd ManifoldSpec::retract(VectorXd x) const {
    for (const auto& b : blocks) {
        if (b.offset < 0 || b.offset + b.size > x.size())
            throw DimensionMismatch("ManifoldSpec: block out of range");
        switch (b.kind) {
            case ManifoldBlock::Kind::Euclidean:
                break;
            case ManifoldBlock::Kind::Angle:
                for (int i = 0; i < b.size; ++i) x[b.offset + i] = wrap_angle(x[b.offset + i]);
                break;
            case ManifoldBlock::Kind::UnitVector: {
                auto seg = x.segment(b.offset, b.size);
                const double n = seg.norm();
                if (n > 1e-300) seg /= n;
                else seg.setZero(), seg[0] = 1.0;
                break;
            }
            case ManifoldBlock::Kind::Ball: {
                auto seg = x.segment(b.offset, b.size);
                const double n = seg.norm();
                if (n > b.radius) seg *= b.radius / n;
                break;
            }
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// CMA-ES
// ---------------------------------------------------------------------------

ESState ESState::from_point(VectorXd mean, double step_size) {
    ESState s;
    const int n = static_cast<int>(mean.size());
    s.mean = std::move(mean);
    s.covariance = MatrixXd::Identity(n, n);
    s.step_size = step_size;
    return s;
}

void ESState::validate() const {
    if (mean.size() == 0) throw InvalidParams("ESState: empty mean");
    if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
        throw DimensionMismatch("ESState: covariance size mismatch");
    if (!(step_size > 0.0)) throw InvalidParams("ESState: step size must be positive");
    Eigen::LLT<MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw InvalidParams("ESState: covariance must be positive definite");
}

ESResult es_optimize(const std::function<double(const VectorXd&)>& objective, ESState init,
                     const ManifoldSpec& spec, const ESOptions& opt) {
    init.validate();
    const int n = static_cast<int>(init.mean.size());
    const int lambda = opt.lambda > 0 ? opt.lambda : 4 + static_cast<int>(3.0 * std::log(n));
    if (lambda < 4) throw InvalidParams("es_optimize: population size must be >= 4");
    const int mu = lambda / 2;

    VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();

    const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
    const double cs = (mueff + 2.0) / (n + mueff + 5.0);
    const double c1 = 2.0 / (sqr(n + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / (sqr(n + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    VectorXd mean = init.mean;
    MatrixXd cov = init.covariance;
    double sigma = init.step_size;
    VectorXd ps = VectorXd::Zero(n), pc = VectorXd::Zero(n);

    Rng rng(opt.seed, 0xE5E5);
    ESResult result;
    result.best_value = INFINITY;

    std::vector<VectorXd> ys(lambda), xs(lambda);
    std::vector<double> fs(lambda);
    std::vector<int> order(lambda);

    for (int gen = init.generation; gen < init.generation + opt.max_generations; ++gen) {
        // eigendecomposition for sampling and the inverse square root
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success)
            throw NoConvergence("es_optimize: covariance eigendecomposition failed");
        const VectorXd evals = eig.eigenvalues().cwiseMax(1e-20);
        const MatrixXd b = eig.eigenvectors();
        const VectorXd d = evals.cwiseSqrt();

        for (int k = 0; k < lambda; ++k) {
            VectorXd z(n);
            for (int i = 0; i < n; ++i) z[i] = rng.normal();
            ys[k] = b * d.asDiagonal() * z;
            xs[k] = mean + sigma * ys[k];
            const VectorXd cand = spec.retract(xs[k]);
            try {
                fs[k] = objective(cand);
            } catch (const std::exception& e) {
                throw ObjectiveFailure("objective failed at generation " + std::to_string(gen) +
                                       ": " + e.what());
            }
            if (fs[k] < result.best_value) {
                result.best_value = fs[k];
                result.best = cand;
            }
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int c) { return fs[a] < fs[c]; });

        VectorXd ymean = VectorXd::Zero(n);
        for (int i = 0; i < mu; ++i) ymean += weights[i] * ys[order[i]];
        mean = spec.retract(mean + sigma * ymean);

        // cumulation paths
        const MatrixXd invsqrt = b * d.cwiseInverse().asDiagonal() * b.transpose();
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (invsqrt * ymean);
        const bool hsig = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) <
                          (1.4 + 2.0 / (n + 1.0)) * chi_n;
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * ymean;

        MatrixXd rank_mu = MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i)
            rank_mu += weights[i] * ys[order[i]] * ys[order[i]].transpose();
        cov = (1.0 - c1 - cmu) * cov +
              c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * cov) + cmu * rank_mu;
        cov = 0.5 * (cov + cov.transpose());
        sigma *= std::exp((cs / damps) * (ps.norm() / chi_n - 1.0));

        result.history.push_back(result.best_value);
        if (result.best_value <= opt.target_value) break;
    }
    result.state.mean = mean;
    result.state.covariance = cov;
    result.state.step_size = sigma;
    result.state.generation = init.generation + static_cast<int>(result.history.size());
    return result;
}

// ---------------------------------------------------------------------------
// score matching
// ---------------------------------------------------------------------------

void TrainProblem::validate() const {
    if (n_oscillators < 2) throw InvalidParams("TrainProblem: need at least 2 oscillators");
    if (dataset.empty()) throw InvalidParams("TrainProblem: empty dataset");
    if (noise_kappa <= 0.0) throw InvalidNoiseParameter("TrainProblem: noise_kappa must be > 0");
    for (const auto& s : dataset)
        if (s.size() != n_oscillators) throw DimensionMismatch("TrainProblem: snapshot size");
}

ScoreMatchingFit score_matching_fit(const std::vector<VectorXd>& snapshots, double noise_kappa) {
    if (snapshots.empty()) throw InsufficientData("score_matching_fit: no data");
    const int n = static_cast<int>(snapshots[0].size());
    if (n < 2) throw InsufficientData("score_matching_fit: need N >= 2");
    const int npairs = n * (n - 1) / 2;
    const int nfeat = 2 * npairs;  // cos and sin per unordered pair

    MatrixXd a = MatrixXd::Zero(nfeat, nfeat);
    VectorXd bvec = VectorXd::Zero(nfeat);
    MatrixXd g(nfeat, n);  // d feature / d phi_k for one sample

    for (const auto& s : snapshots) {
        if (s.size() != n) throw DimensionMismatch("score_matching_fit: ragged snapshots");
        g.setZero();
        int p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++p) {
                const double delta = s[i] - s[j];
                const double cd = std::cos(delta), sd = std::sin(delta);
                g(2 * p, i) = -sd;
                g(2 * p, j) = sd;
                g(2 * p + 1, i) = cd;
                g(2 * p + 1, j) = -cd;
                bvec[2 * p] += 2.0 * cd;
                bvec[2 * p + 1] += 2.0 * sd;
            }
        a.noalias() += g * g.transpose();
    }
    const double m = static_cast<double>(snapshots.size());
    a /= m;
    bvec /= m;

    Eigen::FullPivLU<MatrixXd> lu(a);
    lu.setThreshold(1e-9);
    if (lu.rank() < nfeat)
        throw SingularSystem("score_matching_fit: degenerate observations (rank-deficient system)");
    const VectorXd theta = lu.solve(bvec);
    const double residual = (a * theta - bvec).norm();

    ScoreMatchingFit fit;
    fit.k = MatrixXd::Zero(n, n);
    fit.beta = MatrixXd::Zero(n, n);
    fit.kappa = MatrixXcd::Zero(n, n);
    int p = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++p) {
            // log p coefficient (a + i b) on e^{i(phi_i - phi_j)} pairs back to
            // kappa_ij = K_ij e^{i beta_ij} through kappa = N noise (a + i b)
            const std::complex<double> kap =
                static_cast<double>(n) * noise_kappa * std::complex<double>(theta[2 * p], theta[2 * p + 1]);
            fit.kappa(i, j) = kap;
            fit.kappa(j, i) = std::conj(kap);
            double kmag = std::abs(kap), ang = std::arg(kap);
            if (ang > M_PI / 2 || ang <= -M_PI / 2) {
                kmag = -kmag;
                ang = circular_diff(ang, M_PI);
            }
            fit.k(i, j) = fit.k(j, i) = kmag;
            fit.beta(i, j) = ang;
            fit.beta(j, i) = -ang;
        }
    fit.residual = residual;
    return fit;
}

// ---------------------------------------------------------------------------
// maximum likelihood with persistent chains
// ---------------------------------------------------------------------------

namespace {

// per-pair moments (mean cos, mean sin of phi_i - phi_j, i < j)
void pair_moments(const std::vector<VectorXd>& batch, int n, VectorXd& mc, VectorXd& ms) {
    const int npairs = n * (n - 1) / 2;
    mc = VectorXd::Zero(npairs);
    ms = VectorXd::Zero(npairs);
    for (const auto& s : batch) {
        int p = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++p) {
                mc[p] += std::cos(s[i] - s[j]);
                ms[p] += std::sin(s[i] - s[j]);
            }
    }
    mc /= static_cast<double>(batch.size());
    ms /= static_cast<double>(batch.size());
}

}  // namespace

VectorXd hermitian_drift(const VectorXd& phases, const MatrixXcd& kappa) {
    const int n = static_cast<int>(phases.size());
    VectorXcd z(n);
    for (int i = 0; i < n; ++i) z[i] = std::polar(1.0, phases[i]);
    const VectorXcd w = kappa * z;
    VectorXd drift(n);
    for (int j = 0; j < n; ++j) drift[j] = std::imag(std::conj(z[j]) * w[j]) / n;
    return drift;
}

HermitianCouplingMatrix mle_gradient_step(const TrainProblem& problem,
                                          const HermitianCouplingMatrix& kappa,
                                          const std::vector<VectorXd>& data_batch,
                                          const std::vector<VectorXd>& model_batch, double lr,
                                          double clip) {
    problem.validate();
    if (data_batch.empty() || model_batch.empty())
        throw InsufficientData("mle_gradient_step: empty batch");
    const int n = problem.n_oscillators;
    if (kappa.n() != n) throw DimensionMismatch("mle_gradient_step: kappa size");

    VectorXd mc_d, ms_d, mc_m, ms_m;
    pair_moments(data_batch, n, mc_d, ms_d);
    pair_moments(model_batch, n, mc_m, ms_m);

    // d<log q>/d Re kappa_ij = (mc_data - mc_model)/(N noise);
    // d<log q>/d Im kappa_ij = -(ms_data - ms_model)/(N noise)
    const double scale = 1.0 / (n * problem.noise_kappa);
    VectorXd grad_re = scale * (mc_d - mc_m);
    VectorXd grad_im = problem.learn_beta ? VectorXd(-scale * (ms_d - ms_m))
                                          : VectorXd(VectorXd::Zero(mc_d.size()));
    const double gnorm = std::sqrt(grad_re.squaredNorm() + grad_im.squaredNorm());
    if (gnorm > clip) {
        grad_re *= clip / gnorm;
        grad_im *= clip / gnorm;
    }

    MatrixXcd next = kappa.kappa;
    int p = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++p) {
            next(i, j) += lr * std::complex<double>(grad_re[p], grad_im[p]);
            next(j, i) = std::conj(next(i, j));
        }
    return HermitianCouplingMatrix(std::move(next));
}

MleTrainResult mle_train(const TrainProblem& problem, const MleTrainOptions& opt, MatrixXcd kappa0,
                         std::vector<VectorXd> chains0, int start_iteration) {
    problem.validate();
    const int n = problem.n_oscillators;
    if (kappa0.size() == 0) kappa0 = MatrixXcd::Zero(n, n);

    std::vector<VectorXd> chains = std::move(chains0);
    if (chains.empty()) {
        Rng init(opt.seed, 0xC0A1);
        chains.resize(opt.chains);
        for (auto& c : chains) {
            c.resize(n);
            for (int i = 0; i < n; ++i) c[i] = init.uniform(0.0, kTwoPi);
        }
    }

    MleTrainResult result;
    result.kappa = std::move(kappa0);
    const double noise_scale = std::sqrt(2.0 * problem.noise_kappa * opt.chain_dt);
    for (int it = start_iteration; it < start_iteration + opt.iterations; ++it) {
        // refresh the persistent chains under the current model
        for (std::size_t c = 0; c < chains.size(); ++c) {
            for (int s = 0; s < opt.chain_steps; ++s) {
                const VectorXd drift = hermitian_drift(chains[c], result.kappa);
                for (int j = 0; j < n; ++j) {
                    const std::uint64_t channel =
                        (static_cast<std::uint64_t>(c) * opt.chain_steps + s) * n + j;
                    chains[c][j] = wrap_angle(chains[c][j] + opt.chain_dt * drift[j] +
                                              noise_scale *
                                                  Rng::normal_at(opt.seed, it + 1, channel));
                }
            }
        }
        HermitianCouplingMatrix next = mle_gradient_step(
            problem, HermitianCouplingMatrix(result.kappa), problem.dataset, chains, opt.lr,
            opt.clip);
        result.gradient_norms.push_back((next.kappa - result.kappa).norm() / opt.lr);
        result.kappa = next.kappa;
    }
    result.chains = std::move(chains);
    return result;
}

long parameter_count(ParamCountMode mode, int k) {
    if (k < 1) throw InvalidParams("parameter_count: k must be >= 1");
    switch (mode) {
        case ParamCountMode::MoebiusSubEnsembles:
            return static_cast<long>(k) * (k + 9) / 2;
        case ParamCountMode::TorusCoupled:
            return static_cast<long>(k) * (k + 4);
    }
    throw InvalidParams("parameter_count: unknown mode");
}

}  // namespace kuramoto
