#pragma once

#include <array>
#include <complex>
#include <vector>

#include "kuramoto/common.hpp"

namespace kuramoto {

using Complex = std::complex<double>;

// Orientation-preserving conformal self-map of the unit disc,
//
//   g(z) = e^{i psi} (z - alpha) / (1 - conj(alpha) z),   |alpha| < 1.
//
// The chart (alpha, psi) covers the whole group; composition and inverse go
// through the SU(1,1) matrix representation [[a, b], [conj(b), conj(a)]].
class MoebiusMap {
public:
    MoebiusMap() : alpha_(0.0, 0.0), psi_(0.0) {}
    MoebiusMap(Complex alpha, double psi);

    static MoebiusMap identity() { return MoebiusMap(); }

    // Disc translation sending 0 to b (and -b to 0): z -> (z + b)/(1 + conj(b) z).
    static MoebiusMap translation(Complex b);

    // The unique disc automorphism with g(src[k]) = dst[k] for three distinct
    // boundary points. Throws DegenerateInitialData when the points are too
    // close or the correspondence is not realizable by a disc automorphism.
    static MoebiusMap from_three_points(const std::array<Complex, 3>& src,
                                        const std::array<Complex, 3>& dst);

    Complex alpha() const { return alpha_; }
    double psi() const { return psi_; }

    // Action on the closed disc (|z| <= 1).
    Complex apply(Complex z) const;

    MoebiusMap inverse() const;
    MoebiusMap compose(const MoebiusMap& other) const;  // this after other

    bool is_identity(double tol = 1e-12) const {
        return std::abs(alpha_) <= tol && std::abs(circular_diff(psi_, 0.0)) <= tol;
    }

private:
    Complex alpha_;
    double psi_;  // in [0, 2*pi)
};

// Cross ratio ((z1-z3)(z2-z4)) / ((z1-z4)(z2-z3)); Moebius invariant.
// Throws DegeneratePoints when two arguments nearly coincide.
Complex cross_ratio(Complex z1, Complex z2, Complex z3, Complex z4);

// Conformal barycenter of weighted boundary points: the interior zero of the
// hyperbolic gradient of sum_k w_k log[(1-|w|^2)/|z_k - w|^2], i.e. the
// maximum-likelihood point of the wrapped Cauchy family. Damped fixed-point
// iteration, step 0.5, gradient tolerance 1e-10, at most 10000 iterations.
Complex conformal_barycenter(const std::vector<Complex>& points,
                             const std::vector<double>& weights = {});

}  // namespace kuramoto
