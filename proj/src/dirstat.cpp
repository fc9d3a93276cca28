#include "kuramoto/dirstat.hpp"

#include <algorithm>

#include "kuramoto/geometry.hpp"
#include "kuramoto/optim.hpp"
#include "kuramoto/quadrature.hpp"
#include "kuramoto/specfun.hpp"
#include "kuramoto/stats.hpp"

namespace kuramoto {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw InvalidParams(msg);
}

void check_on_sphere(const VectorXd& x) {
    if (std::abs(x.norm() - 1.0) > 1e-9) throw OffManifoldPoint("point is not on the sphere");
}

void check_on_sphere(const VectorXcd& x) {
    if (std::abs(x.norm() - 1.0) > 1e-9) throw OffManifoldPoint("point is not on the sphere");
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Gamma(a) deviate, Marsaglia-Tsang; boosted for a < 1.
double gamma_deviate(double a, Rng& rng) {
    if (a < 1.0) return gamma_deviate(a + 1.0, rng) * std::pow(rng.uniform_open(), 1.0 / a);
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double beta_deviate(double a, double b, Rng& rng) {
    const double x = gamma_deviate(a, rng);
    const double y = gamma_deviate(b, rng);
    return x / (x + y);
}

// Householder map taking e1 to mu (applied to x).
VectorXd rotate_north_to(const VectorXd& mu, const VectorXd& x) {
    VectorXd v = VectorXd::Unit(mu.size(), 0) - mu;
    const double n2 = v.squaredNorm();
    if (n2 < 1e-24) return x;
    return x - (2.0 * v.dot(x) / n2) * v;
}

std::complex<double> inner_cs(const VectorXcd& u, const VectorXcd& v) {
    // <u, v> = sum u_k conj(v_k)
    return (v.adjoint() * u)(0, 0);
}

}  // namespace

// ---------------------------------------------------------------------------
// log densities
// ---------------------------------------------------------------------------

double log_density(const VonMisesParams& p, double phi) {
    require(p.kappa >= 0.0, "von Mises: kappa must be >= 0");
    return p.kappa * std::cos(phi - p.mu) - std::log(kTwoPi) - log_bessel_i0(p.kappa);
}

double log_density(const WrappedCauchyParams& p, double phi) {
    const double r = std::abs(p.alpha);
    require(r < 1.0, "wrapped Cauchy: |alpha| must be < 1");
    const double d = 1.0 + r * r - 2.0 * r * std::cos(phi - std::arg(p.alpha));
    return std::log1p(-r * r) - std::log(kTwoPi) - std::log(d);
}

double log_density(const KatoJonesParams& p, double phi) {
    require(p.r >= 0.0 && p.r < 1.0, "Kato-Jones: r must be in [0, 1)");
    require(p.kappa >= 0.0, "Kato-Jones: kappa must be >= 0");
    const double d = 1.0 + p.r * p.r - 2.0 * p.r * std::cos(phi - p.gamma());
    const double expo = p.kappa * (p.xi() * std::cos(phi - p.eta()) - 2.0 * p.r * std::cos(p.nu)) / d;
    return expo + std::log1p(-p.r * p.r) - std::log(kTwoPi) - log_bessel_i0(p.kappa) - std::log(d);
}

double hvm_normalizer(double eta, double alpha) {
    require(eta >= 0.0, "hyperbolic von Mises: eta must be >= 0");
    const double t = std::tanh(eta);
    return adaptive_simpson(
        [&](double u) { return std::pow(1.0 + t * std::cos(u), -alpha); }, 0.0, kTwoPi, 1e-12);
}

double log_density(const HyperbolicVonMisesParams& p, double phi) {
    require(std::abs(p.C) <= 1.0, "hyperbolic von Mises: |C| must be <= 1");
    const double t = std::tanh(p.eta);
    return -p.alpha * std::log1p(t * std::cos(p.psi - phi)) - std::log(hvm_normalizer(p.eta, p.alpha));
}

double log_density(const VonMisesFisherParams& p, const VectorXd& x) {
    check_on_sphere(x);
    require(p.kappa >= 0.0, "vMF: kappa must be >= 0");
    if (x.size() != p.mu.size()) throw DimensionMismatch("vMF: dimension mismatch");
    require(std::abs(p.mu.norm() - 1.0) <= 1e-9, "vMF: mu must be unit");
    const int d = static_cast<int>(x.size());
    if (p.kappa == 0.0) return -std::log(sphere_area(d));
    const double logc = (0.5 * d - 1.0) * std::log(p.kappa) - 0.5 * d * std::log(kTwoPi) -
                        log_bessel_i(0.5 * d - 1.0, p.kappa);
    return p.kappa * p.mu.dot(x) + logc;
}

double log_density(const SphericalCauchyParams& p, const VectorXd& x) {
    check_on_sphere(x);
    if (x.size() != p.zeta.size()) throw DimensionMismatch("sphC: dimension mismatch");
    const double rho2 = p.zeta.squaredNorm();
    require(rho2 < 1.0, "sphC: ||zeta|| must be < 1");
    const int d = static_cast<int>(x.size());
    const double kern = std::log1p(-rho2) - std::log1p(rho2 - 2.0 * p.zeta.dot(x));
    return (d - 1.0) * kern - std::log(sphere_area(d));
}

double log_density(const BergmanSphericalCauchyParams& p, const VectorXcd& zeta) {
    check_on_sphere(zeta);
    if (zeta.size() != p.w.size()) throw DimensionMismatch("BsphC: dimension mismatch");
    const int m = static_cast<int>(zeta.size());
    const double w2 = p.w.squaredNorm();
    require(w2 < 1.0, "BsphC: |w| must be < 1");
    const double denom = std::norm(1.0 - inner_cs(p.w, zeta));
    return m * (std::log1p(-w2) - std::log(denom)) - std::log(sphere_area(2 * m));
}

namespace {
// the normalizer depends only on z; memoize the last value since densities
// are typically evaluated many times for fixed parameters
double bingham_log_normalizer_cached(const VectorXd& z) {
    thread_local VectorXd last_z;
    thread_local double last_logc = 0.0;
    if (last_z.size() != z.size() || last_z != z) {
        last_logc = std::log(bingham_normalizer(z));
        last_z = z;
    }
    return last_logc;
}
}  // namespace

double log_density(const BinghamParams& p, const VectorXd& x) {
    check_on_sphere(x);
    if (x.size() != p.z.size() || p.M.rows() != x.size())
        throw DimensionMismatch("Bingham: dimension mismatch");
    const VectorXd y = p.M.transpose() * x;
    return y.cwiseAbs2().dot(p.z) - bingham_log_normalizer_cached(p.z);
}

// ---------------------------------------------------------------------------
// samplers
// ---------------------------------------------------------------------------

std::vector<double> sample(const VonMisesParams& p, int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    require(p.kappa >= 0.0, "von Mises: kappa must be >= 0");
    std::vector<double> out(n);
    if (p.kappa == 0.0) {
        for (auto& a : out) a = rng.uniform(0.0, kTwoPi);
        return out;
    }
    // Best-Fisher rejection from a wrapped Cauchy envelope
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * p.kappa * p.kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * p.kappa);
    const double rr = (1.0 + rho * rho) / (2.0 * rho);
    for (auto& a : out) {
        double f;
        while (true) {
            const double z = std::cos(M_PI * rng.uniform());
            f = (1.0 + rr * z) / (rr + z);
            const double c = p.kappa * (rr - f);
            const double u2 = rng.uniform_open();
            if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) break;
        }
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        a = wrap_angle(p.mu + sign * std::acos(std::clamp(f, -1.0, 1.0)));
    }
    return out;
}

std::vector<double> sample(const WrappedCauchyParams& p, int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    require(std::abs(p.alpha) < 1.0, "wrapped Cauchy: |alpha| must be < 1");
    std::vector<double> out(n);
    if (std::abs(p.alpha) == 0.0) {
        for (auto& a : out) a = rng.uniform(0.0, kTwoPi);
        return out;
    }
    const MoebiusMap push = MoebiusMap::translation(p.alpha);
    for (auto& a : out)
        a = wrap_angle(std::arg(push.apply(std::polar(1.0, rng.uniform(0.0, kTwoPi)))));
    return out;
}

std::vector<double> sample(const KatoJonesParams& p, int n, Rng& rng) {
    require(p.r >= 0.0 && p.r < 1.0, "Kato-Jones: r must be in [0, 1)");
    VonMisesParams base{0.0, p.kappa};
    std::vector<double> thetas = sample(base, n, rng);
    const MoebiusMap push(-std::polar(p.r, p.nu), p.mu);
    for (auto& a : thetas) a = wrap_angle(std::arg(push.apply(std::polar(1.0, a))));
    return thetas;
}

std::vector<double> sample(const HyperbolicVonMisesParams& p, int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    const double t = std::tanh(p.eta);
    std::vector<double> out(n);
    if (t == 0.0) {
        for (auto& a : out) a = rng.uniform(0.0, kTwoPi);
        return out;
    }
    // inverse CDF on a dense periodic grid, then Newton polish
    const int grid = 4096;
    std::vector<double> cdf(grid + 1, 0.0);
    auto kern = [&](double x) { return std::pow(1.0 + t * std::cos(p.psi - x), -p.alpha); };
    const double h = kTwoPi / grid;
    for (int i = 1; i <= grid; ++i)
        cdf[i] = cdf[i - 1] + 0.5 * h * (kern((i - 1) * h) + kern(i * h));
    const double total = cdf[grid];
    for (auto& a : out) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        int i = static_cast<int>(std::max<std::ptrdiff_t>(1, it - cdf.begin())) - 1;
        if (i >= grid) i = grid - 1;
        double x = (i + (u - cdf[i]) / std::max(1e-300, cdf[i + 1] - cdf[i])) * h;
        for (int newton = 0; newton < 3; ++newton) {
            const double f = cdf[i] + 0.5 * (x - i * h) * (kern(i * h) + kern(x)) - u;
            x -= f / kern(x);
            x = std::clamp(x, i * h, (i + 1) * h);
        }
        a = wrap_angle(x);
    }
    return out;
}

std::vector<VectorXd> sample(const VonMisesFisherParams& p, int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    require(std::abs(p.mu.norm() - 1.0) <= 1e-9, "vMF: mu must be unit");
    const int d = static_cast<int>(p.mu.size());
    std::vector<VectorXd> out;
    out.reserve(n);
    if (p.kappa == 0.0) {
        for (int i = 0; i < n; ++i) out.push_back(random_unit_vector(d, rng));
        return out;
    }
    // Wood (1994) rejection for the polar coordinate
    const double b = (d - 1.0) / (2.0 * p.kappa + std::sqrt(4.0 * p.kappa * p.kappa + sqr(d - 1.0)));
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = p.kappa * x0 + (d - 1.0) * std::log1p(-x0 * x0);
    for (int i = 0; i < n; ++i) {
        double w;
        while (true) {
            const double z = beta_deviate(0.5 * (d - 1.0), 0.5 * (d - 1.0), rng);
            w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
            if (p.kappa * w + (d - 1.0) * std::log1p(-x0 * w) - c >= std::log(rng.uniform_open()))
                break;
        }
        VectorXd x(d);
        x[0] = w;
        if (d > 1) {
            VectorXd v = random_unit_vector(d - 1, rng);
            const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
            for (int k = 1; k < d; ++k) x[k] = s * v[k - 1];
        }
        out.push_back(rotate_north_to(p.mu, x).normalized());
    }
    return out;
}

std::vector<VectorXd> sample(const SphericalCauchyParams& p, int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    require(p.zeta.norm() < 1.0, "sphC: ||zeta|| must be < 1");
    const int d = static_cast<int>(p.zeta.size());
    std::vector<VectorXd> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(mobius_add(p.zeta, random_unit_vector(d, rng)).normalized());
    return out;
}

VectorXcd complex_ball_automorphism(const VectorXcd& w, const VectorXcd& z) {
    const double w2 = w.squaredNorm();
    if (w2 >= 1.0) throw OutsideBall("complex_ball_automorphism: |w| must be < 1");
    if (w2 < 1e-300) return -z;  // phi_0 = -identity
    const std::complex<double> zw = inner_cs(z, w);
    const VectorXcd proj = (zw / w2) * w;  // P_w z
    const VectorXcd orth = z - proj;       // Q_w z
    const double s = std::sqrt(1.0 - w2);
    return (w - proj - s * orth) / (1.0 - zw);
}

std::vector<VectorXcd> sample(const BergmanSphericalCauchyParams& p, int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    require(p.w.norm() < 1.0, "BsphC: |w| must be < 1");
    const int m = static_cast<int>(p.w.size());
    std::vector<VectorXcd> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        VectorXcd u = random_complex_unit_vector(m, rng);
        VectorXcd z = complex_ball_automorphism(p.w, u);
        out.push_back(z / z.norm());
    }
    return out;
}

std::vector<VectorXd> sample(const BinghamParams& p, int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    const int d = static_cast<int>(p.z.size());
    check_special_orthogonal(p.M, 1e-8);
    // rejection from an angular central Gaussian envelope in the M frame
    const VectorXd zs = p.z.array() - p.z.maxCoeff();  // <= 0
    const VectorXd lambda = -zs;                       // eigenvalues of A >= 0
    double lo = 1e-12, hi = d;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double g = 0.0;
        for (int i = 0; i < d; ++i) g += 1.0 / (mid + 2.0 * lambda[i]);
        (g > 1.0 ? lo : hi) = mid;
    }
    const double b = 0.5 * (lo + hi);
    const VectorXd omega = VectorXd::Ones(d) + 2.0 * lambda / b;
    const double log_norm = 0.5 * (d - b) - 0.5 * d * std::log(d / b);
    std::vector<VectorXd> out;
    out.reserve(n);
    VectorXd y(d);
    while (static_cast<int>(out.size()) < n) {
        for (int i = 0; i < d; ++i) y[i] = rng.normal() / std::sqrt(omega[i]);
        y.normalize();
        const double s = lambda.dot(y.cwiseAbs2());
        const double log_ratio = -s + 0.5 * d * std::log1p(2.0 * s / b) + log_norm;
        if (std::log(rng.uniform_open()) <= log_ratio) out.push_back(p.M * y);
    }
    return out;
}

std::vector<Vector2d> sample_hyperbolic_disc(int n, Rng& rng) {
    require(n >= 1, "sample: n must be >= 1");
    std::vector<Vector2d> out;
    out.reserve(n);
    const double c = std::cosh(1.0) - 1.0;
    for (int i = 0; i < n; ++i) {
        const double r = std::acosh(1.0 + c * rng.uniform());
        const double t = rng.uniform(0.0, kTwoPi);
        out.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// fitters
// ---------------------------------------------------------------------------

VonMisesParams fit_von_mises(const std::vector<double>& angles,
                             const std::vector<double>& weights) {
    if (angles.size() < 3) throw InsufficientData("fit_von_mises: need >= 3 angles");
    const auto m = circular_mean_resultant(angles, weights);
    const double rbar = std::abs(m);
    if (rbar > 1.0 - 1e-12) throw DegenerateData("fit_von_mises: all points identical");
    return {wrap_angle(std::arg(m)), inverse_bessel_ratio(2, rbar)};
}

WrappedCauchyParams fit_wrapped_cauchy(const std::vector<double>& angles,
                                       const std::vector<double>& weights) {
    if (angles.size() < 3) throw InsufficientData("fit_wrapped_cauchy: need >= 3 angles");
    std::vector<Complex> pts;
    pts.reserve(angles.size());
    for (double a : angles) pts.push_back(std::polar(1.0, a));
    return {conformal_barycenter(pts, weights)};
}

namespace {

// shared scaffold: multi-start Nelder-Mead on a coarse subsample, then a
// single polish pass on the full data; `nll` hoists per-candidate constants
VectorXd multistart_mle(const std::vector<double>& data, const std::vector<VectorXd>& starts,
                        const std::function<double(const VectorXd&, const std::vector<double>&)>& nll,
                        int coarse_cap = 20000) {
    const std::size_t m = std::min<std::size_t>(data.size(), coarse_cap);
    const std::vector<double> coarse(data.begin(), data.begin() + m);
    auto on = [&nll](const std::vector<double>* pts) {
        return [pts, &nll](const VectorXd& u) { return nll(u, *pts); };
    };
    VectorXd best;
    double best_f = INFINITY;
    for (const auto& s0 : starts) {
        VectorXd u = s0;
        const double f = nelder_mead(on(&coarse), u, 0.4, 400, 1e-11);
        if (f < best_f) {
            best_f = f;
            best = u;
        }
    }
    nelder_mead(on(&data), best, 0.05, 500, 1e-13);
    return best;
}

}  // namespace

KatoJonesParams fit_kato_jones(const std::vector<double>& angles) {
    if (angles.size() < 8) throw InsufficientData("fit_kato_jones: need >= 8 angles");
    const auto m = circular_mean_resultant(angles);
    if (std::abs(m) > 1.0 - 1e-12) throw DegenerateData("fit_kato_jones: all points identical");
    const double mu0 = std::arg(m);
    auto make = [](const VectorXd& u) {
        return KatoJonesParams{wrap_angle(u[0]), wrap_angle(u[1]), 0.999 * logistic(u[2]),
                               std::exp(std::clamp(u[3], -8.0, 6.0))};
    };
    auto nll = [&make](const VectorXd& u, const std::vector<double>& pts) {
        const KatoJonesParams p = make(u);
        const double g = p.gamma(), xi = p.xi(), eta = p.eta();
        const double r2 = p.r * p.r, shift = 2.0 * p.r * std::cos(p.nu);
        const double c0 = std::log1p(-r2) - std::log(kTwoPi) - log_bessel_i0(p.kappa);
        double s = 0.0;
        for (double a : pts) {
            const double d = 1.0 + r2 - 2.0 * p.r * std::cos(a - g);
            s -= p.kappa * (xi * std::cos(a - eta) - shift) / d + c0 - std::log(d);
        }
        return s / static_cast<double>(pts.size());
    };
    std::vector<VectorXd> starts;
    for (double nu : {0.0, M_PI / 2, M_PI, 3 * M_PI / 2})
        for (double logk : {0.0, 1.0}) {
            VectorXd u(4);
            u << mu0, nu, -1.0, logk;
            starts.push_back(u);
        }
    const VectorXd u = multistart_mle(angles, starts, nll);
    return make(u);
}

HyperbolicVonMisesParams fit_hyperbolic_von_mises(const std::vector<double>& angles) {
    if (angles.size() < 8) throw InsufficientData("fit_hyperbolic_von_mises: need >= 8 angles");
    const auto m = circular_mean_resultant(angles);
    const double psi0 = std::arg(m);
    auto make = [](const VectorXd& u) {
        const double t = 0.999 * logistic(u[0]);
        return HyperbolicVonMisesParams{std::atanh(t), std::clamp(u[1], -60.0, 60.0),
                                        wrap_angle(u[2]), 0.0};
    };
    auto nll = [&make](const VectorXd& u, const std::vector<double>& pts) {
        const HyperbolicVonMisesParams p = make(u);
        const double t = std::tanh(p.eta);
        const double logz = std::log(hvm_normalizer(p.eta, p.alpha));
        if (!std::isfinite(logz)) return 1e100;
        double s = 0.0;
        for (double a : pts) s += p.alpha * std::log1p(t * std::cos(p.psi - a)) + logz;
        return s / static_cast<double>(pts.size());
    };
    std::vector<VectorXd> starts;
    for (double a0 : {1.0, 3.0, -1.0})
        for (double t0 : {-0.5, 1.0}) {
            VectorXd u(3);
            // density peaks opposite psi for alpha > 0
            u << t0, a0, (a0 > 0 ? psi0 + M_PI : psi0);
            starts.push_back(u);
        }
    const VectorXd u = multistart_mle(angles, starts, nll);
    return make(u);
}

VonMisesFisherParams fit_von_mises_fisher(const std::vector<VectorXd>& points) {
    if (points.empty()) throw InsufficientData("fit_von_mises_fisher: empty sample");
    const int d = static_cast<int>(points[0].size());
    if (static_cast<int>(points.size()) < d + 1)
        throw InsufficientData("fit_von_mises_fisher: need >= d + 1 points");
    VectorXd mean = VectorXd::Zero(d);
    for (const auto& x : points) mean += x;
    mean /= static_cast<double>(points.size());
    const double rbar = mean.norm();
    if (rbar > 1.0 - 1e-12) throw DegenerateData("fit_von_mises_fisher: all points identical");
    if (rbar < 1e-12) return {VectorXd::Unit(d, 0), 0.0};
    return {mean / rbar, inverse_bessel_ratio(d, rbar)};
}

SphericalCauchyParams fit_spherical_cauchy(const std::vector<VectorXd>& points) {
    if (points.empty()) throw InsufficientData("fit_spherical_cauchy: empty sample");
    const int d = static_cast<int>(points[0].size());
    if (static_cast<int>(points.size()) < d + 1)
        throw InsufficientData("fit_spherical_cauchy: need >= d + 1 points");
    return {conformal_barycenter(points)};
}

BergmanSphericalCauchyParams fit_bergman_spherical_cauchy(const std::vector<VectorXcd>& points) {
    if (points.size() < 4) throw InsufficientData("fit_bergman_spherical_cauchy: small sample");
    const int m = static_cast<int>(points[0].size());
    const double n = static_cast<double>(points.size());

    auto field = [&](const VectorXcd& w) {
        VectorXcd s = VectorXcd::Zero(m);
        for (const auto& z : points) s += z / (1.0 - inner_cs(z, w));
        return VectorXcd((1.0 - w.squaredNorm()) / n * s - w);
    };
    VectorXcd w = VectorXcd::Zero(m);
    double step = 0.5;
    for (int it = 0; it < 10000; ++it) {
        const VectorXcd v = field(w);
        const double vn = v.norm();
        if (vn <= 1e-10) return {w};
        VectorXcd cand;
        do {
            cand = w + step * v;
            if (cand.norm() > 1.0 - 1e-12) cand *= (1.0 - 1e-12) / cand.norm();
            if (field(cand).norm() <= vn || step < 1e-8) break;
            step *= 0.5;
        } while (true);
        w = cand;
        step = std::min(0.5, step * 1.3);
    }
    throw NoConvergence("fit_bergman_spherical_cauchy: iteration did not converge");
}

namespace {

// normalized moments m_i = E[x_i^2] under density ~ exp(sum z_i x_i^2)
VectorXd bingham_moments(const VectorXd& z) {
    const int d = static_cast<int>(z.size());
    VectorXd num = VectorXd::Zero(d);
    double den = 0.0;
    if (d == 2) {
        den = adaptive_simpson(
            [&](double t) {
                return std::exp(z[0] * sqr(std::cos(t)) + z[1] * sqr(std::sin(t)));
            },
            0.0, kTwoPi, 1e-12);
        for (int i = 0; i < d; ++i)
            num[i] = adaptive_simpson(
                [&](double t) {
                    const double x0 = std::cos(t), x1 = std::sin(t);
                    const double xi = i == 0 ? x0 : x1;
                    return xi * xi * std::exp(z[0] * x0 * x0 + z[1] * x1 * x1);
                },
                0.0, kTwoPi, 1e-12);
    } else if (d == 3) {
        auto f = [&](const Eigen::Vector3d& x) {
            return std::exp(z[0] * x[0] * x[0] + z[1] * x[1] * x[1] + z[2] * x[2] * x[2]);
        };
        den = integrate_sphere2(f);
        for (int i = 0; i < d; ++i)
            num[i] = integrate_sphere2([&](const Eigen::Vector3d& x) { return x[i] * x[i] * f(x); });
    } else if (d == 4) {
        auto f = [&](const Eigen::Vector4d& x) {
            return std::exp(z[0] * x[0] * x[0] + z[1] * x[1] * x[1] + z[2] * x[2] * x[2] +
                            z[3] * x[3] * x[3]);
        };
        den = integrate_sphere3(f);
        for (int i = 0; i < d; ++i)
            num[i] = integrate_sphere3([&](const Eigen::Vector4d& x) { return x[i] * x[i] * f(x); });
    } else {
        throw InvalidParams("bingham moments implemented for d in {2, 3, 4}");
    }
    return num / den;
}

}  // namespace

double bingham_normalizer(const VectorXd& z) {
    const int d = static_cast<int>(z.size());
    if (z.cwiseAbs().maxCoeff() > 50.0)
        throw NoConvergence("bingham_normalizer: entries beyond +-50");
    if (d == 2)
        return adaptive_simpson(
            [&](double t) { return std::exp(z[0] * sqr(std::cos(t)) + z[1] * sqr(std::sin(t))); },
            0.0, kTwoPi, 1e-12);
    if (d == 3) {
        double prev = 0.0;
        for (int n = 64; n <= 512; n *= 2) {
            const double cur = integrate_sphere2(
                [&](const Eigen::Vector3d& x) {
                    return std::exp(z[0] * x[0] * x[0] + z[1] * x[1] * x[1] + z[2] * x[2] * x[2]);
                },
                n, 2 * n);
            if (prev != 0.0 && std::abs(cur - prev) <= 1e-7 * std::abs(cur)) return cur;
            prev = cur;
        }
        return prev;
    }
    if (d == 4) {
        double prev = 0.0;
        for (int n = 32; n <= 128; n *= 2) {
            const double cur = integrate_sphere3(
                [&](const Eigen::Vector4d& x) {
                    return std::exp(z[0] * x[0] * x[0] + z[1] * x[1] * x[1] + z[2] * x[2] * x[2] +
                                    z[3] * x[3] * x[3]);
                },
                n, n, 2 * n);
            if (prev != 0.0 && std::abs(cur - prev) <= 1e-7 * std::abs(cur)) return cur;
            prev = cur;
        }
        return prev;
    }
    throw InvalidParams("bingham_normalizer implemented for d in {2, 3, 4}");
}

BinghamParams fit_bingham(const std::vector<VectorXd>& points) {
    if (points.empty()) throw InsufficientData("fit_bingham: empty sample");
    const int d = static_cast<int>(points[0].size());
    if (static_cast<int>(points.size()) < d * (d + 1))
        throw InsufficientData("fit_bingham: sample too small");
    MatrixXd s = MatrixXd::Zero(d, d);
    for (const auto& x : points) s += x * x.transpose();
    s /= static_cast<double>(points.size());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
    // descending order: column 0 carries the largest scatter eigenvalue
    MatrixXd m(d, d);
    VectorXd lam(d);
    for (int i = 0; i < d; ++i) {
        m.col(i) = eig.eigenvectors().col(d - 1 - i);
        lam[i] = eig.eigenvalues()[d - 1 - i];
    }
    if (m.determinant() < 0.0) m.col(d - 1) *= -1.0;
    if (lam[d - 1] < 1e-10) throw DegenerateData("fit_bingham: degenerate scatter");

    // moment matching on the free entries z_1..z_{d-1} (z_0 pinned to 0)
    VectorXd z = VectorXd::Zero(d);
    for (int i = 1; i < d; ++i) z[i] = 0.5 / lam[0] - 0.5 / lam[i];
    for (int it = 0; it < 60; ++it) {
        const VectorXd mom = bingham_moments(z);
        VectorXd resid = mom.tail(d - 1) - lam.tail(d - 1);
        if (resid.cwiseAbs().maxCoeff() < 1e-10) break;
        MatrixXd jac(d - 1, d - 1);
        const double h = 1e-5;
        for (int j = 1; j < d; ++j) {
            VectorXd zp = z;
            zp[j] += h;
            jac.col(j - 1) = (bingham_moments(zp).tail(d - 1) - mom.tail(d - 1)) / h;
        }
        VectorXd step = jac.fullPivLu().solve(resid);
        double scale = 1.0;
        for (int j = 1; j < d; ++j) {
            z[j] -= scale * step[j - 1];
            z[j] = std::clamp(z[j], -49.0, 49.0);
        }
    }
    return {m, z};
}

// ---------------------------------------------------------------------------
// pushforwards
// ---------------------------------------------------------------------------

WrappedCauchyParams pushforward(const WrappedCauchyParams& p, const MoebiusMap& g) {
    return {g.apply(p.alpha)};
}

SphericalCauchyParams pushforward(const SphericalCauchyParams& p, const BallIsometry& q) {
    return {q.apply(p.zeta)};
}

}  // namespace kuramoto
