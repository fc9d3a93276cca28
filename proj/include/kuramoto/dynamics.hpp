#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "kuramoto/common.hpp"
#include "kuramoto/moebius.hpp"
#include "kuramoto/rng.hpp"

namespace kuramoto {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class Method { ProjectedRk4, LieEuler, EulerMaruyama };

struct IntegratorConfig {
    Method method = Method::ProjectedRk4;
    double dt = 1e-3;  // in (0, 0.1]
    bool renormalize = true;

    void validate() const {
        if (!(dt > 0.0) || dt > 0.1) throw InvalidStepSize("dt must lie in (0, 0.1]");
    }
};

// Addressable white-noise source: value = f(seed, step, channel), so streams
// are independent per oscillator and unaffected by ensemble size.
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    double normal(std::uint64_t channel) const { return Rng::normal_at(seed, step, channel); }
};

// ---------------------------------------------------------------------------
// circle models
// ---------------------------------------------------------------------------

struct UniformCoupling {
    double k = 0.0;
    double beta = 0.0;
};

struct DenseCoupling {
    MatrixXd k;     // N x N
    MatrixXd beta;  // N x N
};

using CircleCoupling = std::variant<UniformCoupling, DenseCoupling>;

// Classical phase ensemble: d/dt phi_j = omega
//   + (1/N) sum_i K_ij sin(phi_i - phi_j - beta_ij) + xi_j.
struct PhaseEnsemble {
    VectorXd phases;  // canonical representatives in [0, 2 pi)
    double omega = 0.0;
    CircleCoupling coupling = UniformCoupling{};
    double noise_kappa = 0.0;  // variance scale of the Gaussian frequency noise

    int n() const { return static_cast<int>(phases.size()); }

    // symmetric builder: K_ij = K_ji, beta_ij = beta_ji enforced
    static PhaseEnsemble symmetric(VectorXd phases, double omega, MatrixXd k, MatrixXd beta,
                                   double noise_kappa = 0.0);
};

// Globally coupled identical oscillators in complex form:
//   dz_j/dt = i (f z_j^2 + omega z_j + conj(f)),
//   f = (i K / 2N) sum_j e^{-i (phi_j - beta)}.
struct GlobalCircleModel {
    VectorXcd z;  // |z_j| = 1
    double omega = 0.0;
    double k = 0.0;
    double beta = 0.0;
};

// D globally coupled sub-ensembles:
//   d/dt phi_j^l = omega + sum_k (K_kl / N_k) sum_i sin(phi_i^k - phi_j^l - beta_kl).
struct SubEnsembleModel {
    std::vector<VectorXd> groups;
    MatrixXd k;     // D x D
    MatrixXd beta;  // D x D
    double omega = 0.0;

    int blocks() const { return static_cast<int>(groups.size()); }
};

// ---------------------------------------------------------------------------
// sphere models
// ---------------------------------------------------------------------------

struct SphereGlobalCoupling {
    double k = 0.0;
};
struct SphereDenseCoupling {
    MatrixXd k;  // N x N
};
// f^l = (1/D) sum_i (K_il / N_i) sum_j Q_il x_j^i, with per-pair SO(d) shifts.
struct SphereSubCoupling {
    std::vector<int> block_sizes;
    MatrixXd k;                // D x D
    std::vector<MatrixXd> q;   // row-major D x D entries, Q[i*D + l]; empty = identity
};
using SphereCoupling = std::variant<SphereGlobalCoupling, SphereDenseCoupling, SphereSubCoupling>;

// dx_j/dt = A x_j + f_j - <x_j, f_j> x_j, optionally with tangent white noise.
struct SphereEnsemble {
    std::vector<VectorXd> states;  // unit vectors in R^d
    MatrixXd a;                    // antisymmetric d x d
    SphereCoupling coupling = SphereGlobalCoupling{};
    double noise_kappa = 0.0;

    int n() const { return static_cast<int>(states.size()); }
    int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
};

// dzeta_j/dt = H zeta_j + g_j - <zeta_j, g_j>_C zeta_j,
// <u, v>_C = sum_k u_k conj(v_k).
struct ComplexSphereEnsemble {
    std::vector<VectorXcd> states;  // unit vectors in C^m
    MatrixXcd h;                    // anti-Hermitian m x m
    std::variant<SphereGlobalCoupling, SphereDenseCoupling> coupling = SphereGlobalCoupling{};

    int n() const { return static_cast<int>(states.size()); }
    int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
};

// ---------------------------------------------------------------------------
// matrix-group models
// ---------------------------------------------------------------------------

// dQ_j/dt = [J + (1/2N) sum_i K_ij (Q_i Q_j^T - Q_j Q_i^T)] Q_j on SO(n).
struct SoEnsemble {
    std::vector<MatrixXd> states;
    MatrixXd freq;  // antisymmetric J
    MatrixXd k;     // N x N

    int n() const { return static_cast<int>(states.size()); }
    int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].rows()); }
};

// dU_j/dt = [G + (1/2N) sum_i K_ij (U_i U_j^* - U_j U_i^*)] U_j on U(d);
// G is the anti-Hermitian generator (G = -iH for the Hermitian H of the
// Schroedinger-style form i dU U^* = H - ...).
struct UnitaryEnsemble {
    std::vector<MatrixXcd> states;
    MatrixXcd freq;  // anti-Hermitian G
    MatrixXd k;      // N x N

    int n() const { return static_cast<int>(states.size()); }
    int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].rows()); }
};

// ---------------------------------------------------------------------------
// deterministic drifts (exposed for potential/gradient cross-checks)
// ---------------------------------------------------------------------------

VectorXd phase_rhs(const PhaseEnsemble& m);
VectorXcd global_circle_rhs(const GlobalCircleModel& m);
std::vector<VectorXd> subensemble_rhs(const SubEnsembleModel& m);
std::vector<VectorXd> sphere_rhs(const SphereEnsemble& m);
std::vector<VectorXcd> complex_sphere_rhs(const ComplexSphereEnsemble& m);
std::vector<MatrixXd> so_rhs(const SoEnsemble& m);
std::vector<MatrixXcd> unitary_rhs(const UnitaryEnsemble& m);

// Mean of sqrt(1 + C cos(phi_i - phi)) over the ensemble, the multiplicative
// noise amplitude; evaluated through a cached cosine expansion of the kernel.
VectorXd multiplicative_noise_amplitude(const VectorXd& phases, double c);

// ---------------------------------------------------------------------------
// steppers
// ---------------------------------------------------------------------------

PhaseEnsemble step_phase(const PhaseEnsemble& m, const IntegratorConfig& cfg,
                         const NoiseStream& noise = {});
// Kuramoto model with multiplicative noise sqrt(1 + C cos(phi_i - phi_j));
// Ito/Euler-Maruyama discretization, C = 0 reduces bitwise to step_phase.
PhaseEnsemble step_phase_multiplicative(const PhaseEnsemble& m, double c,
                                        const IntegratorConfig& cfg, const NoiseStream& noise);
GlobalCircleModel step_global_circle(const GlobalCircleModel& m, const IntegratorConfig& cfg);
SubEnsembleModel step_subensemble(const SubEnsembleModel& m, const IntegratorConfig& cfg);
SphereEnsemble step_sphere_real(const SphereEnsemble& m, const IntegratorConfig& cfg,
                                const NoiseStream& noise = {});
ComplexSphereEnsemble step_sphere_complex(const ComplexSphereEnsemble& m,
                                          const IntegratorConfig& cfg);
SoEnsemble step_matrix(const SoEnsemble& m, const IntegratorConfig& cfg);
UnitaryEnsemble step_matrix(const UnitaryEnsemble& m, const IntegratorConfig& cfg);

// ---------------------------------------------------------------------------
// trajectories
// ---------------------------------------------------------------------------

template <class Model>
struct Trajectory {
    std::vector<double> times;
    std::vector<Model> snapshots;
    std::uint64_t rng_seed = 0;
    double step_size = 0.0;
    Method method = Method::ProjectedRk4;
};

// Integrate to t_end recording every `record_every` steps (plus the initial
// and final states). Reproducible given (seed, cfg).
template <class Model>
Trajectory<Model> simulate(const Model& initial, const IntegratorConfig& cfg, double t_end,
                           int record_every, std::uint64_t seed);

// Multiplicative-noise variant of simulate for the circle model.
Trajectory<PhaseEnsemble> simulate_multiplicative(const PhaseEnsemble& initial, double c,
                                                  const IntegratorConfig& cfg, double t_end,
                                                  int record_every, std::uint64_t seed);

// Largest manifold residual across the snapshot's states.
double manifold_residual(const PhaseEnsemble& m);
double manifold_residual(const GlobalCircleModel& m);
double manifold_residual(const SubEnsembleModel& m);
double manifold_residual(const SphereEnsemble& m);
double manifold_residual(const ComplexSphereEnsemble& m);
double manifold_residual(const SoEnsemble& m);
double manifold_residual(const UnitaryEnsemble& m);

// For every recorded time, the disc automorphism g_t with z_j(t) = g_t(z_j(0)),
// solved from the three most separated anchor oscillators and validated on the
// rest. Throws DegenerateInitialData when anchors nearly coincide.
std::vector<MoebiusMap> moebius_family_extract(const Trajectory<GlobalCircleModel>& traj);

// Anchor selection used by the extraction: greedy max-min arc separation.
std::array<int, 3> pick_anchor_triple(const VectorXcd& z);

}  // namespace kuramoto
