#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kuramoto/common.hpp"

namespace kuramoto {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Value plus the tangent-projected gradient, flattened over the product
// manifold in the same packing order the integrators use.
struct PotentialValue {
    double value = 0.0;
    VectorXd gradient;
};

// kappa_ij = K_ij e^{i beta_ij}, Hermitian (K symmetric, beta antisymmetric).
struct HermitianCouplingMatrix {
    MatrixXcd kappa;

    explicit HermitianCouplingMatrix(MatrixXcd k) : kappa(std::move(k)) {
        if (kappa.rows() != kappa.cols()) throw DimensionMismatch("coupling matrix must be square");
        if ((kappa - kappa.adjoint()).norm() > 1e-12)
            throw NonHermitian("coupling matrix must be Hermitian");
    }

    int n() const { return static_cast<int>(kappa.rows()); }
};

// V(Q_1..Q_N) = (1/2N^2) sum_ij K_ij Tr(Q_i^T Q_j); gradient blocks satisfy
// Q_j^T G_j antisymmetric. Nondecreasing along the zero-frequency flow.
PotentialValue potential_so(const std::vector<MatrixXd>& states, const MatrixXd& k);

// V(U_1..U_N) = (1/2N^2) sum_ij K_ij Tr(U_i^* U_j) (real for symmetric K);
// gradient packed re/im interleaved, U_j^* G_j anti-Hermitian.
PotentialValue potential_u(const std::vector<MatrixXcd>& states, const MatrixXd& k);

// V_sph = (1/2N^2) sum_ij K_ij (1 - cos theta_ij); nonincreasing along the
// zero-frequency flow with symmetric coupling.
PotentialValue potential_sphere(const std::vector<VectorXd>& states, const MatrixXd& k);

// E = (1/2N^2) sum_ij K_ij cos(phi_i - phi_j - beta_ij), as printed; the
// beta = 0 drift relation is drift = N * grad E (E nondecreasing).
PotentialValue potential_circle(const VectorXd& phases, const MatrixXd& k, const MatrixXd& beta);

// V_K = (1/2N^2) sum_ij K_ij sin^2((phi_j - phi_i)/2) = const - E/2 at beta=0.
double potential_circle_vk(const VectorXd& phases, const MatrixXd& k);

// E(z) = z^* kappa z, real for Hermitian kappa; equals 2 N^2 times the circle
// potential under kappa_ij = K_ij e^{i beta_ij}.
double energy_complex(const VectorXcd& z, const HermitianCouplingMatrix& kappa);

}  // namespace kuramoto
