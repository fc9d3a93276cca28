#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace kuramoto {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Base class for all library errors. Subclasses distinguish failure modes so
// callers (and the CLI exit-code mapping) can react without string matching.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error { public: using Error::Error; };
class InvalidParams : public Error { public: using Error::Error; };
class InvalidStepSize : public Error { public: using Error::Error; };
class InvalidNoiseParameter : public Error { public: using Error::Error; };
class OffManifoldPoint : public Error { public: using Error::Error; };
class OutsideBall : public Error { public: using Error::Error; };
class DegeneratePoints : public Error { public: using Error::Error; };
class DegenerateData : public Error { public: using Error::Error; };
class DegenerateInitialData : public Error { public: using Error::Error; };
class DegenerateInstance : public Error { public: using Error::Error; };
class NoConvergence : public Error { public: using Error::Error; };
class NonHermitian : public Error { public: using Error::Error; };
class SingularSystem : public Error { public: using Error::Error; };
class InsufficientData : public Error { public: using Error::Error; };
class ObjectiveFailure : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

// Canonical angle representative in [0, 2*pi).
inline double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;  // fmod can land exactly on 2*pi after the add
    return w;
}

// Signed circular difference a - b mapped to (-pi, pi].
inline double circular_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -M_PI) d += kTwoPi;
    if (d > M_PI) d -= kTwoPi;
    return d;
}

inline double sqr(double x) { return x * x; }

}  // namespace kuramoto
