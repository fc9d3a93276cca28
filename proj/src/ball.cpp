#include "kuramoto/ball.hpp"

#include "kuramoto/geometry.hpp"

namespace kuramoto {

namespace {
constexpr double kBoundaryGuard = 1.0 - 1e-12;

void check_in_closed_ball(const VectorXd& x) {
    if (x.norm() > 1.0 + 1e-12) throw OutsideBall("point lies outside the closed unit ball");
}
}  // namespace

double hyperbolic_distance(const VectorXd& u, const VectorXd& v) {
    if (u.size() != v.size()) throw DimensionMismatch("hyperbolic_distance: size mismatch");
    const double nu = u.squaredNorm(), nv = v.squaredNorm();
    if (nu >= 1.0 || nv >= 1.0) throw OutsideBall("hyperbolic_distance needs interior points");
    const double arg = 1.0 + 2.0 * (u - v).squaredNorm() / ((1.0 - nu) * (1.0 - nv));
    return std::acosh(arg);
}

VectorXd mobius_add(const VectorXd& b, const VectorXd& x) {
    const double bx = b.dot(x), b2 = b.squaredNorm(), x2 = x.squaredNorm();
    const double den = 1.0 + 2.0 * bx + b2 * x2;
    if (std::abs(den) < 1e-300) throw OutsideBall("mobius_add: singular denominator");
    return ((1.0 + 2.0 * bx + x2) * b + (1.0 - b2) * x) / den;
}

BallIsometry::BallIsometry(int dim)
    : b_(VectorXd::Zero(dim)), rot_(MatrixXd::Identity(dim, dim)) {}

BallIsometry::BallIsometry(VectorXd b, MatrixXd rot) : b_(std::move(b)), rot_(std::move(rot)) {
    if (rot_.rows() != b_.size() || rot_.cols() != b_.size())
        throw DimensionMismatch("BallIsometry: rotation size does not match translation");
    if (b_.norm() >= kBoundaryGuard)
        throw InvalidParams("BallIsometry: ||b|| must be < 1 - 1e-12");
    check_special_orthogonal(rot_, 1e-9);
}

VectorXd BallIsometry::apply(const VectorXd& x) const {
    if (x.size() != b_.size()) throw DimensionMismatch("BallIsometry::apply: size mismatch");
    check_in_closed_ball(x);
    return mobius_add(b_, rot_ * x);
}

BallIsometry BallIsometry::inverse() const {
    // q^{-1} = R^T T_{-b}; canonical form extracted from the action.
    const int d = dim();
    const VectorXd binv = rot_.transpose() * (-b_);
    MatrixXd r(d, d);
    for (int k = 0; k < d; ++k) {
        // h = T_{-binv} o q^{-1} fixes the origin, hence acts linearly
        VectorXd y = rot_.transpose() * mobius_add(-b_, 0.5 * VectorXd::Unit(d, k));
        r.col(k) = 2.0 * mobius_add(-binv, y);
    }
    return BallIsometry(binv, project_so(r));
}

BallIsometry BallIsometry::compose(const BallIsometry& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("BallIsometry::compose: dim mismatch");
    const int d = dim();
    const VectorXd b = apply(other.apply(VectorXd::Zero(d)));
    MatrixXd r(d, d);
    for (int k = 0; k < d; ++k) {
        VectorXd y = apply(other.apply(0.5 * VectorXd::Unit(d, k)));
        r.col(k) = 2.0 * mobius_add(-b, y);
    }
    return BallIsometry(b, project_so(r));
}

VectorXd conformal_barycenter(const std::vector<VectorXd>& points,
                              const std::vector<double>& weights) {
    if (points.size() < 3) throw DegeneratePoints("conformal_barycenter: need at least 3 points");
    if (!weights.empty() && weights.size() != points.size())
        throw DimensionMismatch("conformal_barycenter: weight count mismatch");
    const int d = static_cast<int>(points[0].size());
    double wsum = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) wsum += weights.empty() ? 1.0 : weights[k];
    if (wsum <= 0.0) throw InvalidParams("conformal_barycenter: weights must sum to > 0");

    auto field = [&](const VectorXd& w) {
        VectorXd s = VectorXd::Zero(d);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double wk = weights.empty() ? 1.0 : weights[k];
            const VectorXd diff = points[k] - w;
            const double n2 = diff.squaredNorm();
            if (n2 < 1e-300) return VectorXd(VectorXd::Zero(d));
            s += (wk / n2) * diff;
        }
        return VectorXd((1.0 - w.squaredNorm()) / wsum * s - w);
    };

    VectorXd w = VectorXd::Zero(d);
    double step = 0.5;
    double vnorm = field(w).norm();
    for (int it = 0; it < 10000; ++it) {
        const VectorXd v = field(w);
        vnorm = v.norm();
        if (vnorm <= 1e-10) return w;
        // halve the step while the residual does not decrease
        VectorXd cand;
        double cnorm;
        do {
            cand = w + step * v;
            if (cand.norm() > kBoundaryGuard) cand *= kBoundaryGuard / cand.norm();
            cnorm = field(cand).norm();
            if (cnorm <= vnorm || step < 1e-8) break;
            step *= 0.5;
        } while (true);
        w = cand;
        step = std::min(0.5, step * 1.3);
    }
    throw NoConvergence("conformal_barycenter: fixed-point iteration did not converge");
}

BallIsometry ball_isometry_from_boundary(const std::vector<VectorXd>& src,
                                         const std::vector<VectorXd>& dst) {
    if (src.size() != dst.size() || src.size() < 3)
        throw DegenerateData("ball_isometry_from_boundary: need >= 3 correspondences");
    const int d = static_cast<int>(src[0].size());
    const VectorXd bu = conformal_barycenter(src);
    const VectorXd bw = conformal_barycenter(dst);

    // center both configurations, then align by a rotation
    std::vector<VectorXd> cu(src.size()), cw(dst.size());
    for (std::size_t k = 0; k < src.size(); ++k) {
        cu[k] = mobius_add(-bu, src[k]);
        cw[k] = mobius_add(-bw, dst[k]);
    }
    const MatrixXd r = weighted_procrustes(cu, cw, VectorXd());

    // q = T_bw o R o T_{-bu}, re-expressed in canonical (b, rot) form
    const VectorXd b = mobius_add(bw, r * mobius_add(-bu, VectorXd::Zero(d)));
    MatrixXd rot(d, d);
    for (int k = 0; k < d; ++k) {
        VectorXd y = mobius_add(bw, r * mobius_add(-bu, 0.5 * VectorXd::Unit(d, k)));
        rot.col(k) = 2.0 * mobius_add(-b, y);
    }
    return BallIsometry(b, project_so(rot));
}

BallIsometry to_ball_isometry(const MoebiusMap& g) {
    const Complex b = g.apply(Complex(0.0, 0.0));
    VectorXd bv(2);
    bv << b.real(), b.imag();
    // rotation part: T_{-b} o g fixes the origin
    const Complex y = g.apply(Complex(0.5, 0.0));
    VectorXd yv(2);
    yv << y.real(), y.imag();
    const VectorXd c1 = 2.0 * mobius_add(-bv, yv);
    MatrixXd rot(2, 2);
    rot << c1[0], -c1[1], c1[1], c1[0];
    return BallIsometry(bv, project_so(rot));
}

}  // namespace kuramoto
