#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace steklov {

using Complex = std::complex<double>;

/// Poincare disk model of the hyperbolic plane, metric rho(z)^2 |dz|^2 with
/// rho(z) = 2 / (1 - |z|^2), so the curvature is -1 (the k=1, n=2 space).

inline double conformal_factor(Complex z) {
    double n2 = std::norm(z);
    if (n2 >= 1.0) throw std::invalid_argument("conformal_factor: point outside the unit disk");
    return 2.0 / (1.0 - n2);
}

/// Disk automorphism carrying 0 to p (a hyperbolic translation).
inline Complex mobius_translate(Complex z, Complex p) {
    return (z + p) / (1.0 + std::conj(p) * z);
}

/// Inverse translation, carrying p to 0.
inline Complex mobius_to_origin(Complex z, Complex p) {
    return (z - p) / (1.0 - std::conj(p) * z);
}

inline double hyperbolic_distance(Complex z1, Complex z2) {
    return 2.0 * std::atanh(std::abs(mobius_to_origin(z1, z2)));
}

/// Geodesic polar coordinates (r, theta) about `base` to a disk point.
/// The translation carrying 0 to base has positive real derivative at 0,
/// so tangent directions at the base keep their angle.
inline Complex polar_to_disk(double r, double theta, Complex base = 0.0) {
    Complex w = std::tanh(0.5 * r) * std::polar(1.0, theta);
    return mobius_translate(w, base);
}

struct PolarCoords {
    double r;
    double theta;
};

inline PolarCoords disk_to_polar(Complex z, Complex base = 0.0) {
    Complex w = mobius_to_origin(z, base);
    return PolarCoords{2.0 * std::atanh(std::abs(w)), std::arg(w)};
}

}  // namespace steklov
