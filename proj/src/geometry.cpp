#include "kuramoto/geometry.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace kuramoto {

void check_unit(const VectorXd& x, double tol) {
    if (unit_residual(x) > tol) throw OffManifoldPoint("vector is not unit length");
}

void check_special_orthogonal(const MatrixXd& q, double tol) {
    if (q.rows() != q.cols()) throw DimensionMismatch("matrix is not square");
    if (orthogonality_residual(q) > tol) throw OffManifoldPoint("matrix is not orthogonal");
    if (std::abs(q.determinant() - 1.0) > tol) throw OffManifoldPoint("determinant is not +1");
}

void check_unitary(const MatrixXcd& u, double tol) {
    if (u.rows() != u.cols()) throw DimensionMismatch("matrix is not square");
    if (unitarity_residual(u) > tol) throw OffManifoldPoint("matrix is not unitary");
}

void check_antisymmetric(const MatrixXd& a, double tol) {
    if (a.rows() != a.cols()) throw DimensionMismatch("matrix is not square");
    if (skewness_residual(a) > tol) throw InvalidParams("matrix is not antisymmetric");
}

void check_antihermitian(const MatrixXcd& h, double tol) {
    if (h.rows() != h.cols()) throw DimensionMismatch("matrix is not square");
    if (skewness_residual(h) > tol) throw InvalidParams("matrix is not anti-Hermitian");
}

MatrixXd group_exp(const MatrixXd& skew) {
    check_antisymmetric(skew);
    if (skew.rows() == 2) {
        // closed form: planar rotation by the (0,1)-generator angle
        double t = skew(1, 0);
        MatrixXd r(2, 2);
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        return r;
    }
    if (skew.rows() == 3) {
        // Rodrigues: exp(A) = I + sin(t)/t A + (1-cos(t))/t^2 A^2
        const double t = std::sqrt(sqr(skew(2, 1)) + sqr(skew(0, 2)) + sqr(skew(1, 0)));
        if (t < 1e-8) return MatrixXd::Identity(3, 3) + skew + 0.5 * skew * skew;
        return MatrixXd::Identity(3, 3) + std::sin(t) / t * skew +
               (1.0 - std::cos(t)) / (t * t) * skew * skew;
    }
    return skew.exp();  // scaling-and-squaring Pade
}

MatrixXcd group_exp(const MatrixXcd& antiherm) {
    check_antihermitian(antiherm);
    if (antiherm.rows() == 1) return (MatrixXcd(1, 1) << std::exp(antiherm(0, 0))).finished();
    if (antiherm.rows() == 2) {
        // split off the trace: G = (tr/2) I + B with B traceless, B^2 = -mu^2 I
        const std::complex<double> half_tr = 0.5 * (antiherm(0, 0) + antiherm(1, 1));
        MatrixXcd b = antiherm;
        b(0, 0) -= half_tr;
        b(1, 1) -= half_tr;
        const double mu2 = std::abs(b(0, 1) * b(1, 0) - b(0, 0) * b(1, 1));
        const double mu = std::sqrt(mu2);
        const double sinc = mu < 1e-8 ? 1.0 - mu2 / 6.0 : std::sin(mu) / mu;
        return std::exp(half_tr) *
               (std::cos(mu) * MatrixXcd::Identity(2, 2) + sinc * b);
    }
    return antiherm.exp();
}

MatrixXd project_so(const MatrixXd& m) {
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    MatrixXd r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        // flip the direction of smallest singular value to stay in SO(n)
        MatrixXd u = svd.matrixU();
        u.col(u.cols() - 1) *= -1.0;
        r = u * svd.matrixV().transpose();
    }
    return r;
}

MatrixXcd project_unitary(const MatrixXcd& m) {
    Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

double chordal_distance(const VectorXd& a, const VectorXd& b) {
    if (a.size() != b.size()) throw DimensionMismatch("chordal_distance: size mismatch");
    return (a - b).norm();
}

double chordal_distance(const MatrixXd& a, const MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("chordal_distance: size mismatch");
    return (a - b).norm();
}

double chordal_distance(const MatrixXcd& a, const MatrixXcd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("chordal_distance: size mismatch");
    return (a - b).norm();
}

Matrix3dd quaternion_double_cover(const Vector4d& q) {
    if (std::abs(q.norm() - 1.0) > 1e-9) throw OffManifoldPoint("quaternion is not unit");
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Matrix3dd r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

Vector4d upper_hemisphere(const Vector4d& q) {
    for (int i = 0; i < 4; ++i) {
        if (q[i] > 0.0) return q;
        if (q[i] < 0.0) return -q;
    }
    return q;
}

VectorXd random_unit_vector(int dim, Rng& rng) {
    VectorXd x(dim);
    do {
        for (int i = 0; i < dim; ++i) x[i] = rng.normal();
    } while (x.norm() < 1e-12);
    return x / x.norm();
}

VectorXcd random_complex_unit_vector(int dim, Rng& rng) {
    VectorXcd x(dim);
    do {
        for (int i = 0; i < dim; ++i) x[i] = std::complex<double>(rng.normal(), rng.normal());
    } while (x.norm() < 1e-12);
    return x / x.norm();
}

MatrixXd random_antisymmetric(int n, double scale, Rng& rng) {
    MatrixXd a = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = scale * rng.normal();
            a(i, j) = v;
            a(j, i) = -v;
        }
    return a;
}

MatrixXcd random_antihermitian(int n, double scale, Rng& rng) {
    MatrixXcd h = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = std::complex<double>(0.0, scale * rng.normal());
        for (int j = i + 1; j < n; ++j) {
            std::complex<double> v(scale * rng.normal(), scale * rng.normal());
            h(i, j) = v;
            h(j, i) = -std::conj(v);
        }
    }
    return h;
}

MatrixXd random_so(int n, Rng& rng) {
    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    return project_so(g);
}

MatrixXcd random_unitary(int n, Rng& rng) {
    MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(rng.normal(), rng.normal());
    return project_unitary(g);
}

MatrixXd weighted_procrustes(const std::vector<VectorXd>& v, const std::vector<VectorXd>& w,
                             const VectorXd& weights) {
    if (v.empty() || v.size() != w.size()) throw DimensionMismatch("procrustes: point count mismatch");
    const int d = static_cast<int>(v[0].size());
    MatrixXd b = MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < v.size(); ++i) {
        double a = weights.size() ? weights[static_cast<int>(i)] : 1.0;
        if (a <= 0.0) throw InvalidParams("procrustes: weights must be positive");
        b += a * w[i] * v[i].transpose();
    }
    Eigen::JacobiSVD<MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (d >= 2 && s[d - 2] <= 1e-12 * std::max(1.0, s[0]))
        throw DegenerateInstance("procrustes: attitude profile is rank deficient");
    MatrixXd r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        MatrixXd u = svd.matrixU();
        u.col(d - 1) *= -1.0;
        r = u * svd.matrixV().transpose();
    }
    return r;
}

}  // namespace kuramoto
