#include "kuramoto/quadrature.hpp"

#include <cmath>

#include "kuramoto/common.hpp"

namespace kuramoto {

namespace {

double simpson(const std::function<double(double)>& f, double a, double m, double b, double fa,
               double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double m, double b,
                     double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    const double diff = std::abs(left + right - whole);
    // the relative term keeps large-magnitude integrands from recursing
    // past the double-precision noise floor
    const double floor_ = 4e-15 * (std::abs(left) + std::abs(right));
    if (depth <= 0 || diff <= 15.0 * tol || diff <= floor_)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_step(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(f, a, m, b, fa, fm, fb);
    return adaptive_step(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

double integrate_circle(const std::function<double(double)>& f, double tol) {
    return adaptive_simpson(f, 0.0, kTwoPi, tol);
}

double integrate_sphere2(const std::function<double(const Eigen::Vector3d&)>& f, int n_polar,
                         int n_azimuth) {
    std::vector<double> t, wt;
    gauss_legendre(n_polar, t, wt);  // t = cos(theta)
    double total = 0.0;
    const double dphi = kTwoPi / n_azimuth;
    for (int i = 0; i < n_polar; ++i) {
        const double c = t[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
        double ring = 0.0;
        for (int j = 0; j < n_azimuth; ++j) {
            const double phi = dphi * j;
            ring += f(Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), c));
        }
        total += wt[i] * ring * dphi;
    }
    return total;
}

double integrate_sphere3(const std::function<double(const Eigen::Vector4d&)>& f, int n_chi,
                         int n_polar, int n_azimuth) {
    // x = (cos(chi), sin(chi) * omega), omega in S^2; dS = sin^2(chi) dchi dS2
    std::vector<double> xc, wc, t, wt;
    gauss_legendre(n_chi, xc, wc);
    gauss_legendre(n_polar, t, wt);
    const double dphi = kTwoPi / n_azimuth;
    double total = 0.0;
    for (int a = 0; a < n_chi; ++a) {
        const double chi = 0.5 * M_PI * (xc[a] + 1.0);  // map [-1,1] -> [0, pi]
        const double jac = 0.5 * M_PI * wc[a] * sqr(std::sin(chi));
        const double cchi = std::cos(chi), schi = std::sin(chi);
        double shell = 0.0;
        for (int i = 0; i < n_polar; ++i) {
            const double c = t[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
            double ring = 0.0;
            for (int j = 0; j < n_azimuth; ++j) {
                const double phi = dphi * j;
                ring += f(Eigen::Vector4d(cchi, schi * s * std::cos(phi),
                                          schi * s * std::sin(phi), schi * c));
            }
            shell += wt[i] * ring * dphi;
        }
        total += jac * shell;
    }
    return total;
}

double sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace kuramoto
