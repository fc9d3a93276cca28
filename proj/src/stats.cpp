#include "kuramoto/stats.hpp"

#include <algorithm>
#include <cmath>

#include "kuramoto/common.hpp"
#include "kuramoto/quadrature.hpp"
#include "kuramoto/specfun.hpp"

namespace kuramoto {

GofResult chi_square_gof(const std::vector<double>& observed_counts,
                         const std::vector<double>& bin_probs, int n_fitted,
                         double min_expected) {
    if (observed_counts.size() != bin_probs.size() || observed_counts.empty())
        throw DimensionMismatch("chi_square_gof: bin count mismatch");
    double n = 0.0;
    for (double c : observed_counts) n += c;

    // pool adjacent bins until every expected count clears the threshold
    std::vector<double> obs, exp;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < bin_probs.size(); ++i) {
        o_acc += observed_counts[i];
        e_acc += n * bin_probs[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (!exp.empty()) {
            obs.back() += o_acc;
            exp.back() += e_acc;
        } else {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        }
    }
    GofResult r;
    for (std::size_t i = 0; i < obs.size(); ++i) r.statistic += sqr(obs[i] - exp[i]) / exp[i];
    r.dof = static_cast<double>(obs.size()) - 1.0 - n_fitted;
    if (r.dof < 1.0) r.dof = 1.0;
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

GofResult chi_square_circular(const std::vector<double>& angles,
                              const std::function<double(double)>& density, int n_bins,
                              int n_fitted) {
    std::vector<double> counts(n_bins, 0.0), probs(n_bins, 0.0);
    const double width = kTwoPi / n_bins;
    for (double a : angles) {
        int b = static_cast<int>(wrap_angle(a) / width);
        if (b >= n_bins) b = n_bins - 1;
        counts[b] += 1.0;
    }
    double total = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        probs[b] = adaptive_simpson(density, b * width, (b + 1) * width, 1e-10);
        total += probs[b];
    }
    for (int b = 0; b < n_bins; ++b) probs[b] /= total;
    return chi_square_gof(counts, probs, n_fitted);
}

GofResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw DegenerateData("ks_test: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max(d, std::max(f - i / n, (i + 1.0) / n - f));
    }
    GofResult r;
    r.statistic = d;
    const double en = std::sqrt(n);
    r.p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    return r;
}

GofResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DegenerateData("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    const double en = std::sqrt(ne);
    GofResult r;
    r.statistic = d;
    r.p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    return r;
}

GofResult rayleigh_test(const std::vector<double>& angles) {
    if (angles.empty()) throw DegenerateData("rayleigh_test: empty sample");
    const double n = static_cast<double>(angles.size());
    const double rbar = std::abs(circular_mean_resultant(angles));
    const double z = n * rbar * rbar;
    GofResult r;
    r.statistic = z;
    // Berens small-sample correction of exp(-z)
    r.p_value = std::exp(-z) *
                (1.0 + (2.0 * z - z * z) / (4.0 * n) -
                 (24.0 * z - 132.0 * z * z + 76.0 * z * z * z - 9.0 * z * z * z * z) /
                     (288.0 * n * n));
    r.p_value = std::min(1.0, std::max(0.0, r.p_value));
    return r;
}

std::complex<double> circular_mean_resultant(const std::vector<double>& angles,
                                             const std::vector<double>& weights) {
    if (angles.empty()) throw DegenerateData("circular_mean_resultant: empty sample");
    std::complex<double> s(0.0, 0.0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        s += w * std::polar(1.0, angles[i]);
        wsum += w;
    }
    return s / wsum;
}

}  // namespace kuramoto
