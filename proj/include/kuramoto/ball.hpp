#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kuramoto/common.hpp"
#include "kuramoto/moebius.hpp"

namespace kuramoto {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Hyperbolic (Poincare-ball) distance between interior points.
double hyperbolic_distance(const VectorXd& u, const VectorXd& v);

// Conformal "Moebius addition" b (+) x: the hyperbolic translation taking 0
// to b, applied to x. Defined on the closed ball, maps boundary to boundary.
VectorXd mobius_add(const VectorXd& b, const VectorXd& x);

// Orientation-preserving isometry of the hyperbolic ball B^d, decomposed as a
// rotation followed by the hyperbolic translation: q(x) = T_b(R x).
class BallIsometry {
public:
    explicit BallIsometry(int dim);  // identity
    BallIsometry(VectorXd b, MatrixXd rot);

    static BallIsometry identity(int dim) { return BallIsometry(dim); }

    int dim() const { return static_cast<int>(b_.size()); }
    const VectorXd& translation() const { return b_; }
    const MatrixXd& rotation() const { return rot_; }

    // Action on the closed ball; throws OutsideBall for ||x|| > 1 + 1e-12.
    VectorXd apply(const VectorXd& x) const;

    BallIsometry inverse() const;
    BallIsometry compose(const BallIsometry& other) const;  // this after other

private:
    VectorXd b_;
    MatrixXd rot_;
};

// Conformal barycenter of weighted boundary points of B^d: zero of the
// hyperbolic gradient of sum_k w_k log[(1-|w|^2)/|x_k - w|^2]; coincides with
// the spherical Cauchy maximum-likelihood point.
VectorXd conformal_barycenter(const std::vector<VectorXd>& points,
                              const std::vector<double>& weights = {});

// Least-squares ball isometry from boundary correspondences q(src[k]) = dst[k]
// (k >= 3 for d = 2; >= d(d+1)/2 recommended). Solved by mapping the conformal
// barycenters of both configurations to the origin and aligning the centered
// points with a Procrustes rotation; rank-checked.
BallIsometry ball_isometry_from_boundary(const std::vector<VectorXd>& src,
                                         const std::vector<VectorXd>& dst);

// The conformal extension of a disc automorphism to B^2.
BallIsometry to_ball_isometry(const MoebiusMap& g);

}  // namespace kuramoto
