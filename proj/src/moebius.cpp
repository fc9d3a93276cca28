#include "kuramoto/moebius.hpp"

namespace kuramoto {

namespace {

constexpr double kBoundaryGuard = 1.0 - 1e-12;

// 2x2 complex matrix acting projectively.
struct Mat2 {
    Complex a, b, c, d;
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse_proj() const { return {d, -b, -c, a}; }
    Complex apply(Complex z) const { return (a * z + b) / (c * z + d); }
};

// Matrix sending (p1, p2, p3) to (0, 1, infinity).
Mat2 to_standard_triple(const std::array<Complex, 3>& p) {
    const Complex d12 = p[1] - p[2], d10 = p[1] - p[0];
    return {d12, -p[0] * d12, d10, -p[2] * d10};
}

}  // namespace

MoebiusMap::MoebiusMap(Complex alpha, double psi) : alpha_(alpha), psi_(wrap_angle(psi)) {
    if (std::abs(alpha) >= kBoundaryGuard)
        throw InvalidParams("MoebiusMap: |alpha| must be < 1 - 1e-12");
}

MoebiusMap MoebiusMap::translation(Complex b) {
    // (z + b)/(1 + conj(b) z) = e^{i0}(z - (-b))/(1 - conj(-b) z)
    return MoebiusMap(-b, 0.0);
}

Complex MoebiusMap::apply(Complex z) const {
    return std::polar(1.0, psi_) * (z - alpha_) / (1.0 - std::conj(alpha_) * z);
}

MoebiusMap MoebiusMap::inverse() const {
    // g^{-1}(w) = e^{-i psi}(w + e^{i psi} alpha)/(1 + conj(e^{i psi} alpha) e^{-i psi} ... )
    // easiest through SU(1,1): M = [[a, b], [conj b, conj a]] with
    // a = e^{i psi/2}/s, b = -e^{i psi/2} alpha / s.
    const Complex a = std::polar(1.0, psi_ / 2.0);
    const Complex b = -a * alpha_;
    // inverse matrix (projective): [[conj a, -b], [-conj b, a]]
    const Complex ia = std::conj(a), ib = -b;
    return MoebiusMap(-ib / ia, wrap_angle(2.0 * std::arg(ia)));
}

MoebiusMap MoebiusMap::compose(const MoebiusMap& other) const {
    const Complex a1 = std::polar(1.0, psi_ / 2.0), b1 = -a1 * alpha_;
    const Complex a2 = std::polar(1.0, other.psi_ / 2.0), b2 = -a2 * other.alpha_;
    // SU(1,1) product [[a1,b1],[cb1,ca1]] * [[a2,b2],[cb2,ca2]]
    const Complex a = a1 * a2 + b1 * std::conj(b2);
    const Complex b = a1 * b2 + b1 * std::conj(a2);
    return MoebiusMap(-b / a, wrap_angle(2.0 * std::arg(a)));
}

MoebiusMap MoebiusMap::from_three_points(const std::array<Complex, 3>& src,
                                         const std::array<Complex, 3>& dst) {
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            if (std::abs(src[i] - src[j]) < 1e-8 || std::abs(dst[i] - dst[j]) < 1e-8)
                throw DegenerateInitialData("from_three_points: anchor points nearly coincide");
        }
    const Mat2 m = to_standard_triple(dst).inverse_proj() * to_standard_triple(src);
    if (std::abs(m.a) < 1e-14 || std::abs(m.d) < 1e-14)
        throw DegenerateInitialData("from_three_points: degenerate correspondence");
    const Complex alpha = -m.b / m.a;
    const double psi = std::arg(m.a / m.d);
    if (std::abs(alpha) >= kBoundaryGuard)
        throw DegenerateInitialData("from_three_points: map is not a disc automorphism");
    MoebiusMap g(alpha, psi);
    for (int i = 0; i < 3; ++i) {
        if (std::abs(g.apply(src[i]) - dst[i]) > 1e-6)
            throw DegenerateInitialData("from_three_points: correspondence not conformal");
    }
    return g;
}

Complex cross_ratio(Complex z1, Complex z2, Complex z3, Complex z4) {
    const Complex zs[4] = {z1, z2, z3, z4};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(zs[i] - zs[j]) <= 1e-10)
                throw DegeneratePoints("cross_ratio: points must be pairwise distinct");
    return ((z1 - z3) * (z2 - z4)) / ((z1 - z4) * (z2 - z3));
}

Complex conformal_barycenter(const std::vector<Complex>& points,
                             const std::vector<double>& weights) {
    if (points.size() < 3) throw DegeneratePoints("conformal_barycenter: need at least 3 points");
    if (!weights.empty() && weights.size() != points.size())
        throw DimensionMismatch("conformal_barycenter: weight count mismatch");
    double wsum = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) wsum += weights.empty() ? 1.0 : weights[k];
    if (wsum <= 0.0) throw InvalidParams("conformal_barycenter: weights must sum to > 0");

    // V(w) = (1-|w|^2)/W * sum_k w_k (z_k - w)/|z_k - w|^2  -  w
    // vanishes exactly at the stationary point of the log-likelihood.
    auto field = [&](Complex w) {
        Complex s(0.0, 0.0);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double wk = weights.empty() ? 1.0 : weights[k];
            const Complex d = points[k] - w;
            const double n2 = std::norm(d);
            if (n2 < 1e-300) return Complex(0.0, 0.0);  // w sits on a data point: stay put
            s += wk * d / n2;
        }
        return (1.0 - std::norm(w)) / wsum * s - w;
    };

    Complex w(0.0, 0.0);
    double step = 0.5;
    for (int it = 0; it < 10000; ++it) {
        const Complex v = field(w);
        const double vnorm = std::abs(v);
        if (vnorm <= 1e-10) return w;
        // halve the step while the residual does not decrease
        Complex cand;
        double cnorm;
        do {
            cand = w + step * v;
            if (std::abs(cand) > kBoundaryGuard) cand *= kBoundaryGuard / std::abs(cand);
            cnorm = std::abs(field(cand));
            if (cnorm <= vnorm || step < 1e-8) break;
            step *= 0.5;
        } while (true);
        w = cand;
        step = std::min(0.5, step * 1.3);
    }
    throw NoConvergence("conformal_barycenter: fixed-point iteration did not converge");
}

}  // namespace kuramoto
