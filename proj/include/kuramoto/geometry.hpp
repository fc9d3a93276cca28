#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "kuramoto/common.hpp"
#include "kuramoto/rng.hpp"

namespace kuramoto {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector4d;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Matrix3dd = Eigen::Matrix3d;

// ---- manifold residuals ---------------------------------------------------

inline double unit_residual(const VectorXd& x) { return std::abs(x.norm() - 1.0); }
inline double unit_residual(const VectorXcd& x) { return std::abs(x.norm() - 1.0); }

inline double orthogonality_residual(const MatrixXd& q) {
    return (q.transpose() * q - MatrixXd::Identity(q.rows(), q.cols())).norm();
}

inline double unitarity_residual(const MatrixXcd& u) {
    return (u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols())).norm();
}

inline double skewness_residual(const MatrixXd& a) { return (a + a.transpose()).norm(); }
inline double skewness_residual(const MatrixXcd& h) { return (h + h.adjoint()).norm(); }

void check_unit(const VectorXd& x, double tol = 1e-9);
void check_special_orthogonal(const MatrixXd& q, double tol = 1e-10);
void check_unitary(const MatrixXcd& u, double tol = 1e-10);
void check_antisymmetric(const MatrixXd& a, double tol = 1e-12);
void check_antihermitian(const MatrixXcd& h, double tol = 1e-12);

// ---- group exponential and projections -------------------------------------

// exp of an antisymmetric generator, lands in SO(n).
MatrixXd group_exp(const MatrixXd& skew);
// exp of an anti-Hermitian generator, lands in U(d).
MatrixXcd group_exp(const MatrixXcd& antiherm);

// Nearest (special) orthogonal / unitary matrix in Frobenius norm, via polar
// decomposition. Used to re-project integrator states.
MatrixXd project_so(const MatrixXd& m);
MatrixXcd project_unitary(const MatrixXcd& m);

// ---- chordal metric ---------------------------------------------------------

double chordal_distance(const VectorXd& a, const VectorXd& b);
double chordal_distance(const MatrixXd& a, const MatrixXd& b);
double chordal_distance(const MatrixXcd& a, const MatrixXcd& b);

// ---- double cover S^3 -> SO(3) ----------------------------------------------

// Rotation matrix of a unit quaternion (w, x, y, z); q and -q give the same
// matrix through the same arithmetic path.
Matrix3dd quaternion_double_cover(const Vector4d& q);

// Sign-normalize a quaternion to the hemisphere with first nonzero
// coordinate positive.
Vector4d upper_hemisphere(const Vector4d& q);

// ---- random elements --------------------------------------------------------

VectorXd random_unit_vector(int dim, Rng& rng);
VectorXcd random_complex_unit_vector(int dim, Rng& rng);
MatrixXd random_antisymmetric(int n, double scale, Rng& rng);
MatrixXcd random_antihermitian(int n, double scale, Rng& rng);
MatrixXd random_so(int n, Rng& rng);
MatrixXcd random_unitary(int n, Rng& rng);

// ---- orthogonal Procrustes --------------------------------------------------

// argmin_{R in SO(d)} sum_i a_i ||w_i - R v_i||^2. Throws DegenerateInstance
// when the attitude profile has rank < d-1 (solution not unique).
MatrixXd weighted_procrustes(const std::vector<VectorXd>& v,
                             const std::vector<VectorXd>& w,
                             const VectorXd& weights);

}  // namespace kuramoto
