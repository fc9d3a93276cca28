#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "kuramoto/common.hpp"
#include "kuramoto/potentials.hpp"

namespace kuramoto {

// ---------------------------------------------------------------------------
// evolution strategy (CMA-ES) with chart retractions for manifold parameters
// ---------------------------------------------------------------------------

struct ManifoldBlock {
    enum class Kind { Euclidean, Angle, UnitVector, Ball };
    Kind kind = Kind::Euclidean;
    int offset = 0;
    int size = 1;
    double radius = 1.0 - 1e-9;  // Ball blocks are clamped inside this radius
};

struct ManifoldSpec {
    std::vector<ManifoldBlock> blocks;
    VectorXd retract(VectorXd x) const;
};

struct ESState {
    VectorXd mean;
    MatrixXd covariance;  // symmetric positive definite
    double step_size = 0.3;
    int generation = 0;

    static ESState from_point(VectorXd mean, double step_size = 0.3);
    void validate() const;  // Cholesky must exist
};

struct ESOptions {
    int lambda = 0;  // 0 = default 4 + floor(3 ln n); must be >= 4 otherwise
    int max_generations = 200;
    double target_value = -1e300;  // stop when best <= target
    std::uint64_t seed = 0;
};

struct ESResult {
    VectorXd best;  // retracted
    double best_value = 0.0;
    std::vector<double> history;  // best-so-far per generation (nonincreasing)
    ESState state;
};

// Minimizes the objective; deterministic per options.seed. Objective
// exceptions are rethrown as ObjectiveFailure tagged with the generation.
ESResult es_optimize(const std::function<double(const VectorXd&)>& objective, ESState init,
                     const ManifoldSpec& spec = {}, const ESOptions& opt = {});

// ---------------------------------------------------------------------------
// network reconstruction
// ---------------------------------------------------------------------------

struct TrainProblem {
    enum class Loss { NegLogLikelihood, ScoreMatching, TaskLoss };
    int n_oscillators = 0;
    double noise_kappa = 1.0;  // Langevin noise scale of the generating model
    Loss loss = Loss::NegLogLikelihood;
    std::vector<VectorXd> dataset;  // observed phase snapshots
    bool learn_beta = true;         // when false, couplings stay real

    void validate() const;
};

struct ScoreMatchingFit {
    MatrixXd k;      // symmetric, zero diagonal
    MatrixXd beta;   // K_ij e^{i beta_ij} Hermitian: beta antisymmetric,
                     // branch beta in (-pi/2, pi/2] with signed K
    MatrixXcd kappa; // the combined Hermitian estimate
    double residual; // stationarity residual of the linear system
};

// Closed-form score-matching estimator for the torus energy model
//   log p = z^* kappa z / (2 N noise_kappa) + const.
// Throws SingularSystem for degenerate (e.g. fully synchronized) data.
ScoreMatchingFit score_matching_fit(const std::vector<VectorXd>& phase_snapshots,
                                    double noise_kappa = 1.0);

// One stochastic maximum-likelihood update: kappa moves along the moment gap
// <dE/dkappa>_data - <dE/dkappa>_model, stays Hermitian, gradient clipped.
HermitianCouplingMatrix mle_gradient_step(const TrainProblem& problem,
                                          const HermitianCouplingMatrix& kappa,
                                          const std::vector<VectorXd>& data_batch,
                                          const std::vector<VectorXd>& model_batch,
                                          double lr = 1e-2, double clip = 10.0);

// Langevin drift of the energy model with Hermitian coupling (beta = arg
// convention); the sampler behind the persistent model chains.
VectorXd hermitian_drift(const VectorXd& phases, const MatrixXcd& kappa);

struct MleTrainOptions {
    int iterations = 400;
    double lr = 1e-2;
    double clip = 10.0;
    int chains = 256;
    int chain_steps = 10;
    double chain_dt = 0.05;
    std::uint64_t seed = 1;
};

struct MleTrainResult {
    MatrixXcd kappa;
    std::vector<double> gradient_norms;  // per iteration
    std::vector<VectorXd> chains;        // final persistent chain states
};

// Persistent-chain training loop; resuming from iteration i is bit-identical
// to an uninterrupted run because noise streams are keyed by iteration.
MleTrainResult mle_train(const TrainProblem& problem, const MleTrainOptions& opt,
                         MatrixXcd kappa0 = MatrixXcd(),
                         std::vector<VectorXd> chains0 = {}, int start_iteration = 0);

// ---------------------------------------------------------------------------
// parameter accounting
// ---------------------------------------------------------------------------

enum class ParamCountMode { MoebiusSubEnsembles, TorusCoupled };

// MoebiusSubEnsembles: k(k+9)/2 for k sub-ensembles;
// TorusCoupled: d(d+4) for d coupled circles.
long parameter_count(ParamCountMode mode, int k);

}  // namespace kuramoto
