#pragma once

namespace kuramoto {

// log I_0(x), log I_1(x): modified Bessel functions, overflow-safe.
double log_bessel_i0(double x);
double log_bessel_i1(double x);

// log I_nu(x) for nu >= 0, x >= 0 (quadrature-backed, overflow-safe).
double log_bessel_i(double nu, double x);

// A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa), the mean resultant length of
// a von Mises-Fisher distribution on S^{d-1}; and its inverse in kappa.
double bessel_ratio(int d, double kappa);
double inverse_bessel_ratio(int d, double r);

// Legendre function P_{-alpha}(x) for x >= 1, via the Laplace integral.
double legendre_p(double alpha, double x);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Chi-square upper tail probability with k degrees of freedom.
double chi_square_sf(double stat, double dof);

// Kolmogorov distribution complementary CDF Q(lambda).
double kolmogorov_q(double lambda);

}  // namespace kuramoto
