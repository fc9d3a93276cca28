#include "kuramoto/potentials.hpp"

namespace kuramoto {

namespace {

void check_square(const MatrixXd& k, int n, const char* what) {
    if (k.rows() != n || k.cols() != n) throw DimensionMismatch(what);
}

}  // namespace

PotentialValue potential_so(const std::vector<MatrixXd>& states, const MatrixXd& k) {
    const int n = static_cast<int>(states.size());
    if (n == 0) throw DimensionMismatch("potential_so: empty ensemble");
    const int d = static_cast<int>(states[0].rows());
    check_square(k, n, "potential_so: K must be N x N");
    const double scale = 1.0 / (2.0 * n * n);

    PotentialValue out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.value += k(i, j) * (states[i].transpose() * states[j]).trace();
    out.value *= scale;

    out.gradient.resize(n * d * d);
    for (int j = 0; j < n; ++j) {
        MatrixXd amb = MatrixXd::Zero(d, d);
        for (int i = 0; i < n; ++i) amb += (k(i, j) + k(j, i)) * states[i];
        amb *= scale;
        // tangent projection: G = Q skew(Q^T amb)
        const MatrixXd qtg = states[j].transpose() * amb;
        const MatrixXd proj = states[j] * (0.5 * (qtg - qtg.transpose()));
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) out.gradient[j * d * d + r * d + c] = proj(r, c);
    }
    return out;
}

PotentialValue potential_u(const std::vector<MatrixXcd>& states, const MatrixXd& k) {
    const int n = static_cast<int>(states.size());
    if (n == 0) throw DimensionMismatch("potential_u: empty ensemble");
    const int d = static_cast<int>(states[0].rows());
    check_square(k, n, "potential_u: K must be N x N");
    const double scale = 1.0 / (2.0 * n * n);

    PotentialValue out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.value += k(i, j) * (states[i].adjoint() * states[j]).trace().real();
    out.value *= scale;

    out.gradient.resize(n * 2 * d * d);
    for (int j = 0; j < n; ++j) {
        MatrixXcd amb = MatrixXcd::Zero(d, d);
        for (int i = 0; i < n; ++i) amb += (k(i, j) + k(j, i)) * states[i];
        amb *= scale;
        const MatrixXcd utg = states[j].adjoint() * amb;
        const MatrixXcd proj = states[j] * (0.5 * (utg - utg.adjoint()));
        int at = j * 2 * d * d;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                out.gradient[at++] = proj(r, c).real();
                out.gradient[at++] = proj(r, c).imag();
            }
    }
    return out;
}

PotentialValue potential_sphere(const std::vector<VectorXd>& states, const MatrixXd& k) {
    const int n = static_cast<int>(states.size());
    if (n == 0) throw DimensionMismatch("potential_sphere: empty ensemble");
    const int d = static_cast<int>(states[0].size());
    check_square(k, n, "potential_sphere: K must be N x N");
    const double scale = 1.0 / (2.0 * n * n);

    PotentialValue out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.value += k(i, j) * (1.0 - states[i].dot(states[j]));
    out.value *= scale;

    out.gradient.resize(n * d);
    for (int j = 0; j < n; ++j) {
        VectorXd amb = VectorXd::Zero(d);
        for (int i = 0; i < n; ++i) amb -= (k(i, j) + k(j, i)) * states[i];
        amb *= scale;
        const VectorXd proj = amb - states[j].dot(amb) * states[j];
        out.gradient.segment(j * d, d) = proj;
    }
    return out;
}

PotentialValue potential_circle(const VectorXd& phases, const MatrixXd& k, const MatrixXd& beta) {
    const int n = static_cast<int>(phases.size());
    check_square(k, n, "potential_circle: K must be N x N");
    check_square(beta, n, "potential_circle: beta must be N x N");
    const double scale = 1.0 / (2.0 * n * n);

    PotentialValue out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.value += k(i, j) * std::cos(phases[i] - phases[j] - beta(i, j));
    out.value *= scale;

    out.gradient.resize(n);
    for (int j = 0; j < n; ++j) {
        double g = 0.0;
        for (int i = 0; i < n; ++i) {
            g += k(i, j) * std::sin(phases[i] - phases[j] - beta(i, j));
            g -= k(j, i) * std::sin(phases[j] - phases[i] - beta(j, i));
        }
        out.gradient[j] = scale * g;
    }
    return out;
}

double potential_circle_vk(const VectorXd& phases, const MatrixXd& k) {
    const int n = static_cast<int>(phases.size());
    check_square(k, n, "potential_circle_vk: K must be N x N");
    double v = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v += k(i, j) * sqr(std::sin(0.5 * (phases[j] - phases[i])));
    return v / (2.0 * n * n);
}

double energy_complex(const VectorXcd& z, const HermitianCouplingMatrix& kappa) {
    if (z.size() != kappa.n()) throw DimensionMismatch("energy_complex: size mismatch");
    for (int i = 0; i < z.size(); ++i)
        if (std::abs(std::abs(z[i]) - 1.0) > 1e-9)
            throw OffManifoldPoint("energy_complex: states must lie on the unit circle");
    const std::complex<double> e = (z.adjoint() * kappa.kappa * z)(0, 0);
    return e.real();
}

}  // namespace kuramoto
