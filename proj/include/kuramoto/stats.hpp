#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace kuramoto {

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
};

// Pearson chi-square against given bin probabilities. Bins with expected
// count below `min_expected` are pooled into their neighbor; `n_fitted`
// parameters are subtracted from the degrees of freedom.
GofResult chi_square_gof(const std::vector<double>& observed_counts,
                         const std::vector<double>& bin_probs, int n_fitted = 0,
                         double min_expected = 5.0);

// Chi-square GOF of circular samples against a density on [0, 2*pi).
GofResult chi_square_circular(const std::vector<double>& angles,
                              const std::function<double(double)>& density, int n_bins = 36,
                              int n_fitted = 0);

// One-sample Kolmogorov-Smirnov test against a CDF.
GofResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov test.
GofResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Rayleigh test of circular uniformity.
GofResult rayleigh_test(const std::vector<double>& angles);

// Mean resultant vector of angles.
std::complex<double> circular_mean_resultant(const std::vector<double>& angles,
                                             const std::vector<double>& weights = {});

}  // namespace kuramoto
