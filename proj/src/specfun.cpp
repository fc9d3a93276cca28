#include "kuramoto/specfun.hpp"

#include <cmath>

#include "kuramoto/common.hpp"
#include "kuramoto/quadrature.hpp"

namespace kuramoto {

namespace {

// power series sum_k (x^2/4)^k / (k! Gamma(k+nu+1)), scaled by (x/2)^nu
double bessel_i_series(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (k * (k + nu));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;  // I_nu(x) = (x/2)^nu * sum
}

}  // namespace

double log_bessel_i0(double x) {
    x = std::abs(x);
    if (x < 500.0) return std::log(bessel_i_series(0.0, x));
    // I_0(x) ~ e^x/sqrt(2 pi x) * (1 + 1/(8x) + 9/(128 x^2) + ...)
    const double ix = 1.0 / x;
    const double corr = 1.0 + ix * (0.125 + ix * (0.0703125 + ix * 0.0732421875));
    return x - 0.5 * std::log(kTwoPi * x) + std::log(corr);
}

double log_bessel_i1(double x) {
    x = std::abs(x);
    if (x < 1e-300) return -INFINITY;
    if (x < 500.0) return std::log(0.5 * x * bessel_i_series(1.0, x));
    const double ix = 1.0 / x;
    const double corr = 1.0 - ix * (0.375 + ix * (0.1171875 + ix * 0.1025390625));
    return x - 0.5 * std::log(kTwoPi * x) + std::log(corr);
}

double log_bessel_i(double nu, double x) {
    if (nu < 0.0) throw InvalidParams("log_bessel_i: nu must be >= 0");
    if (x < 0.0) throw InvalidParams("log_bessel_i: x must be >= 0");
    if (nu == 0.0) return log_bessel_i0(x);
    if (nu == 1.0) return log_bessel_i1(x);
    if (x == 0.0) return -INFINITY;
    if (x < 500.0 && nu < 120.0)
        return nu * std::log(0.5 * x) + std::log(bessel_i_series(nu, x));
    // I_nu(x) = (x/2)^nu / (sqrt(pi) Gamma(nu+1/2)) Int_0^pi e^{x cos t} sin^{2 nu} t dt
    const double log_int = std::log(adaptive_simpson(
        [&](double t) { return std::exp(x * (std::cos(t) - 1.0)) * std::pow(std::sin(t), 2.0 * nu); },
        0.0, M_PI, 1e-14));
    return nu * std::log(0.5 * x) - 0.5 * std::log(M_PI) - std::lgamma(nu + 0.5) + x + log_int;
}

double bessel_ratio(int d, double kappa) {
    if (kappa <= 0.0) return 0.0;
    return std::exp(log_bessel_i(0.5 * d, kappa) - log_bessel_i(0.5 * d - 1.0, kappa));
}

double inverse_bessel_ratio(int d, double r) {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) throw InvalidParams("inverse_bessel_ratio: resultant must be < 1");
    // Banerjee approximation as the starting point, then Newton
    double k = r * (d - r * r) / (1.0 - r * r);
    for (int it = 0; it < 100; ++it) {
        const double a = bessel_ratio(d, k);
        // A'(k) = 1 - A^2 - (d-1)/k * A
        const double da = 1.0 - a * a - (d - 1.0) / k * a;
        const double step = (a - r) / da;
        k -= step;
        if (k <= 0.0) k = 1e-8;
        if (std::abs(step) < 1e-12 * (1.0 + k)) break;
    }
    return k;
}

double legendre_p(double alpha, double x) {
    if (x < 1.0) throw InvalidParams("legendre_p: defined here for x >= 1");
    const double s = std::sqrt(x * x - 1.0);
    return adaptive_simpson([&](double t) { return std::pow(x + s * std::cos(t), -alpha); }, 0.0,
                            M_PI, 1e-12) /
           M_PI;
}

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw InvalidParams("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // series representation
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q(a, x)
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

double chi_square_sf(double stat, double dof) {
    if (dof <= 0.0) return 1.0;
    return 1.0 - gamma_p(0.5 * dof, 0.5 * stat);
}

double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-14) break;
    }
    return std::min(1.0, std::max(0.0, sum));
}

}  // namespace kuramoto
