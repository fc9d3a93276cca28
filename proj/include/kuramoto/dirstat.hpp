#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "kuramoto/ball.hpp"
#include "kuramoto/common.hpp"
#include "kuramoto/moebius.hpp"
#include "kuramoto/rng.hpp"

namespace kuramoto {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// circle families
// ---------------------------------------------------------------------------

// vM(mu, kappa): density ~ exp(kappa cos(phi - mu)) / (2 pi I0(kappa)).
struct VonMisesParams {
    double mu = 0.0;
    double kappa = 0.0;  // >= 0
};

// wC(alpha): density (1/2pi)(1-r^2)/(1 - 2 r cos(phi - Phi) + r^2), alpha = r e^{i Phi}.
struct WrappedCauchyParams {
    Complex alpha{0.0, 0.0};  // |alpha| < 1
};

// Kato-Jones family: the Moebius image M_{mu,nu,r} of vM(0, kappa), where
// M(z) = e^{i mu}(z + r e^{i nu})/(1 + r e^{-i nu} z). Free parameters are
// stored; gamma, xi, eta are recomputed on demand from the printed relations.
struct KatoJonesParams {
    double mu = 0.0;
    double nu = 0.0;
    double r = 0.0;      // in [0, 1)
    double kappa = 1.0;  // >= 0; kappa = 0 degenerates to wrapped Cauchy

    double gamma() const { return wrap_angle(mu + nu); }
    double xi() const { return std::sqrt(r * r * r * r + 2.0 * r * r * std::cos(2.0 * nu) + 1.0); }
    double eta() const {
        return wrap_angle(mu + std::atan2(r * r * std::sin(2.0 * nu),
                                          r * r * std::cos(2.0 * nu) + 1.0));
    }
};

// Hyperbolic von Mises: density ~ (1 + tanh(eta) cos(psi - phi))^{-alpha},
// normalized by 2 pi P^0_{-alpha}(cosh eta) cosh^alpha(eta) (evaluated by
// quadrature). C is the multiplicative-noise constant of the generating
// model; it does not enter the density.
struct HyperbolicVonMisesParams {
    double eta = 0.0;    // >= 0
    double alpha = 1.0;  // any real
    double psi = 0.0;
    double C = 0.0;  // |C| <= 1
};

// ---------------------------------------------------------------------------
// sphere families
// ---------------------------------------------------------------------------

struct VonMisesFisherParams {
    VectorXd mu;         // unit
    double kappa = 0.0;  // >= 0
};

// sphC(zeta): density ~ ((1-rho^2)/(1 + rho^2 - 2 rho mu.x))^{d-1}, zeta = rho mu.
struct SphericalCauchyParams {
    VectorXd zeta;  // ||zeta|| < 1
};

// Bergman-spherical Cauchy on S^{2m-1} in C^m:
// density ~ (1-|w|^2)^m / |1 - <w, zeta>|^{2m} with <u,v> = sum u_k conj(v_k).
struct BergmanSphericalCauchyParams {
    VectorXcd w;  // |w| < 1
};

// Bing(M, Z): density ~ exp(x^T M Z M^T x); Z diagonal with max entry pinned
// to zero for identifiability.
struct BinghamParams {
    MatrixXd M;  // orthogonal
    VectorXd z;  // diagonal entries
};

using DirectionalDistribution =
    std::variant<VonMisesParams, WrappedCauchyParams, KatoJonesParams, HyperbolicVonMisesParams,
                 VonMisesFisherParams, SphericalCauchyParams, BergmanSphericalCauchyParams,
                 BinghamParams>;

// ---------------------------------------------------------------------------
// log densities (with respect to angle / unnormalized surface measure)
// ---------------------------------------------------------------------------

double log_density(const VonMisesParams& p, double phi);
double log_density(const WrappedCauchyParams& p, double phi);
double log_density(const KatoJonesParams& p, double phi);
double log_density(const HyperbolicVonMisesParams& p, double phi);
double log_density(const VonMisesFisherParams& p, const VectorXd& x);
double log_density(const SphericalCauchyParams& p, const VectorXd& x);
double log_density(const BergmanSphericalCauchyParams& p, const VectorXcd& zeta);
double log_density(const BinghamParams& p, const VectorXd& x);

// ---------------------------------------------------------------------------
// samplers (deterministic given the rng state)
// ---------------------------------------------------------------------------

std::vector<double> sample(const VonMisesParams& p, int n, Rng& rng);
std::vector<double> sample(const WrappedCauchyParams& p, int n, Rng& rng);
std::vector<double> sample(const KatoJonesParams& p, int n, Rng& rng);
std::vector<double> sample(const HyperbolicVonMisesParams& p, int n, Rng& rng);
std::vector<VectorXd> sample(const VonMisesFisherParams& p, int n, Rng& rng);
std::vector<VectorXd> sample(const SphericalCauchyParams& p, int n, Rng& rng);
std::vector<VectorXcd> sample(const BergmanSphericalCauchyParams& p, int n, Rng& rng);
std::vector<VectorXd> sample(const BinghamParams& p, int n, Rng& rng);

// Random point in B^2: angle uniform, radius with density 2 sinh(r)/(e + 1/e - 2).
std::vector<Vector2d> sample_hyperbolic_disc(int n, Rng& rng);

// ---------------------------------------------------------------------------
// fitters (maximum likelihood)
// ---------------------------------------------------------------------------

VonMisesParams fit_von_mises(const std::vector<double>& angles,
                             const std::vector<double>& weights = {});
WrappedCauchyParams fit_wrapped_cauchy(const std::vector<double>& angles,
                                       const std::vector<double>& weights = {});
KatoJonesParams fit_kato_jones(const std::vector<double>& angles);
HyperbolicVonMisesParams fit_hyperbolic_von_mises(const std::vector<double>& angles);
VonMisesFisherParams fit_von_mises_fisher(const std::vector<VectorXd>& points);
SphericalCauchyParams fit_spherical_cauchy(const std::vector<VectorXd>& points);
BergmanSphericalCauchyParams fit_bergman_spherical_cauchy(const std::vector<VectorXcd>& points);
BinghamParams fit_bingham(const std::vector<VectorXd>& points);

// ---------------------------------------------------------------------------
// group pushforwards
// ---------------------------------------------------------------------------

WrappedCauchyParams pushforward(const WrappedCauchyParams& p, const MoebiusMap& g);
SphericalCauchyParams pushforward(const SphericalCauchyParams& p, const BallIsometry& q);

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

// Int_0^{2pi} (1 + tanh(eta) cos t)^{-alpha} dt, the hyperbolic von Mises
// normalizer (equals 2 pi cosh^alpha(eta) P^0_{-alpha}(cosh eta)).
double hvm_normalizer(double eta, double alpha);

// Int_{S^{d-1}} exp(x^T diag(z) x) dS, d = z.size() in {2, 3, 4}; adaptive
// node doubling to relative 1e-6, NoConvergence for entries beyond +-50.
double bingham_normalizer(const VectorXd& z);

// Holomorphic automorphism phi_w of the complex unit ball (an involution
// exchanging 0 and w); acts on the boundary sphere S^{2m-1}.
VectorXcd complex_ball_automorphism(const VectorXcd& w, const VectorXcd& z);

// Total log-likelihood of a sample.
template <class Params, class Point>
double log_likelihood(const Params& p, const std::vector<Point>& pts) {
    double s = 0.0;
    for (const auto& x : pts) s += log_density(p, x);
    return s;
}

}  // namespace kuramoto
