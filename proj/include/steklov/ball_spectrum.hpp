#pragma once

#include <cmath>
#include <stdexcept>

#include "steklov/quadrature.hpp"
#include "steklov/symmetric_space.hpp"

namespace steklov {

/// Radial profile of the first Steklov eigenfunctions of a geodesic ball:
///   g(r) = (1/phi(r)) * integral_0^r phi(t) dt,
/// the solution of g'' + TrA(r) g' - lambda_1(S(r)) g = 0 with g(0) = 0.
inline double radial_g(const Space& space, double r) {
    detail::require_nonnegative_radius(r, "radial_g");
    if (r == 0.0) return 0.0;
    double integral = integrate([&](double t) { return density(space, t); }, 0.0, r, 1e-13,
                                "radial profile g");
    return integral / density(space, r);
}

/// g'(r), via the closed identity g' = 1 - TrA(r) g(r).
inline double radial_g_prime(const Space& space, double r) {
    detail::require_positive_radius(r, "radial_g_prime");
    return 1.0 - mean_curvature_trace(space, r) * radial_g(space, r);
}

/// First nonzero Steklov eigenvalue of the geodesic ball B(R) through the
/// boundary condition g'(R) = mu_1 g(R). Multiplicity kn. Canonical form.
inline double mu1_ball_boundary(const Space& space, double R) {
    detail::require_positive_radius(R, "mu1_ball_boundary");
    // g'/g = 1/g - TrA; this form avoids one quadrature.
    return 1.0 / radial_g(space, R) - mean_curvature_trace(space, R);
}

/// The same eigenvalue through the Rayleigh-quotient integral
///   mu_1(B(R)) = int_B [g^2 lambda_1(S(r)) + g'^2] dV / (g(R)^2 vol(S(R))).
/// Exists to cross-check the boundary form; they agree by parts.
inline double mu1_ball_quotient(const Space& space, double R) {
    detail::require_positive_radius(R, "mu1_ball_quotient");
    auto integrand = [&](double t) {
        double g = radial_g(space, t);
        double gp = 1.0 - mean_curvature_trace(space, t) * g;
        return (g * g * sphere_lambda1(space, t) + gp * gp) * density(space, t);
    };
    double numerator = integrate(integrand, 0.0, R, 1e-11, "ball Rayleigh numerator");
    double gR = radial_g(space, R);
    return numerator / (gR * gR * density(space, R));
}

/// Energy density h(r) = g'(r)^2 + g(r)^2 lambda_1(S(r)); decreasing on (0, inf).
inline double radial_energy(const Space& space, double r) {
    detail::require_positive_radius(r, "radial_energy");
    double g = radial_g(space, r);
    double gp = 1.0 - mean_curvature_trace(space, r) * g;
    return gp * gp + g * g * sphere_lambda1(space, r);
}

/// Number of reciprocal eigenvalues the main inequality sums:
///   l = k - 1 when n = 1, l = k(n-1) when n > 1. Always l <= kn.
inline int theorem_l(const Space& space) {
    return space.n() == 1 ? space.k() - 1 : space.k() * (space.n() - 1);
}

/// sum_{i=1}^{l} 1/mu_i(B(R)) = l / mu_1(B(R)), valid for 0 <= l <= kn
/// because the first kn nonzero ball eigenvalues coincide.
inline double harmonic_sum_ball(const Space& space, double R, int l) {
    if (l < 0 || l > space.dim())
        throw std::invalid_argument(
            "harmonic_sum_ball: l must lie in [0, kn]; beyond kn the ball eigenvalues "
            "no longer coincide with mu_1");
    if (l == 0) return 0.0;
    return l / mu1_ball_boundary(space, R);
}

/// Exact spectral data of a geodesic ball.
struct BallSpectrum {
    Space space;
    double radius;
    double mu1;
    double g_at_R;
    double g_prime_at_R;
    double volume;
    double boundary_area;
};

inline BallSpectrum ball_spectrum(const Space& space, double R) {
    detail::require_positive_radius(R, "ball_spectrum");
    double g = radial_g(space, R);
    double gp = 1.0 - mean_curvature_trace(space, R) * g;
    return BallSpectrum{space, R, gp / g, g, gp, ball_volume(space, R), sphere_area(space, R)};
}

/// Outcome of the boundary inequality
///   int_{dOmega} g^2 dA >= vol(S(R)) g(R)^2,
/// with equality exactly when dOmega is the geodesic sphere S(R) about the
/// center. The caller supplies the domain-side boundary integral.
struct Lemma53Verdict {
    double boundary_integral;  // int_{dOmega} g^2 dA
    double sphere_value;       // vol(S(R)) g(R)^2
    double slack_abs;          // boundary_integral - sphere_value
    double slack_rel;          // slack_abs / sphere_value
    bool holds;
};

inline Lemma53Verdict lemma53_check(double boundary_integral_g2, const Space& space, double R) {
    detail::require_positive_radius(R, "lemma53_check");
    double g = radial_g(space, R);
    double sphere_value = sphere_area(space, R) * g * g;
    double slack = boundary_integral_g2 - sphere_value;
    return Lemma53Verdict{boundary_integral_g2, sphere_value, slack, slack / sphere_value,
                          slack >= -1e-9 * sphere_value};
}

}  // namespace steklov
