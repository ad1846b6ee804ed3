#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "steklov/quadrature.hpp"

namespace steklov {

/// A noncompact rank-1 symmetric space KH^n, identified by k = dim_R(K)
/// with K one of R, C, H, Ca (k = 1, 2, 4, 8) and the projective dimension n.
/// The manifold dimension is kn. Curvature is normalized to -4 <= K <= -1,
/// which pins every radial formula below; there is no curvature parameter.
class Space {
   public:
    Space(int k, int n) : k_(k), n_(n) {
        if (k != 1 && k != 2 && k != 4 && k != 8)
            throw std::invalid_argument("Space: k must be one of 1, 2, 4, 8");
        if (n < 1) throw std::invalid_argument("Space: n must be a positive integer");
        if (k == 8 && n != 2)
            throw std::invalid_argument("Space: the octonionic plane requires n = 2");
    }

    int k() const { return k_; }
    int n() const { return n_; }
    int dim() const { return k_ * n_; }

    std::string name() const {
        return "(k=" + std::to_string(k_) + ",n=" + std::to_string(n_) + ")";
    }

    friend bool operator==(const Space& a, const Space& b) {
        return a.k_ == b.k_ && a.n_ == b.n_;
    }

   private:
    int k_;
    int n_;
};

/// One tabulated value of a radial function.
struct RadialSample {
    double r = 0.0;
    double value = 0.0;
};

/// Tabulate a radial function on a grid of nonnegative radii.
template <class F>
std::vector<RadialSample> tabulate_radial(F&& fn, const std::vector<double>& radii) {
    std::vector<RadialSample> table;
    table.reserve(radii.size());
    for (double r : radii) {
        if (!(r >= 0.0))
            throw std::invalid_argument("tabulate_radial: radii must be nonnegative");
        table.push_back(RadialSample{r, fn(r)});
    }
    return table;
}

namespace detail {
inline void require_positive_radius(double r, const char* op) {
    if (!(r > 0.0)) throw std::invalid_argument(std::string(op) + ": requires r > 0");
}
inline void require_nonnegative_radius(double r, const char* op) {
    if (!(r >= 0.0)) throw std::invalid_argument(std::string(op) + ": requires r >= 0");
}
}  // namespace detail

/// Volume density of the geodesic sphere S(r):
///   phi(r) = sinh^{kn-1}(r) cosh^{k-1}(r).
/// The area of S(r) is unit_sphere_area(kn) * phi(r).
inline double density(const Space& space, double r) {
    detail::require_nonnegative_radius(r, "density");
    const int kn = space.dim();
    double phi = std::pow(std::sinh(r), kn - 1);
    if (space.k() > 1) phi *= std::pow(std::cosh(r), space.k() - 1);
    return phi;
}

/// Mean curvature trace of S(r): Tr A(r) = phi'(r)/phi(r)
///   = (kn-1) coth(r) + (k-1) tanh(r).
/// Has a pole at r = 0.
inline double mean_curvature_trace(const Space& space, double r) {
    detail::require_positive_radius(r, "mean_curvature_trace");
    const double t = std::tanh(r);
    return (space.dim() - 1) / t + (space.k() - 1) * t;
}

/// First nonzero Laplace eigenvalue of the geodesic sphere S(r), of
/// multiplicity kn:
///   lambda_1(S(r)) = (kn-1)/sinh^2(r) - (k-1)/cosh^2(r)
///                  = (kn-k)/sinh^2(r) + (k-1)/(sinh^2(r) cosh^2(r)).
inline double sphere_lambda1(const Space& space, double r) {
    detail::require_positive_radius(r, "sphere_lambda1");
    const double sh = std::sinh(r);
    const double ch = std::cosh(r);
    return (space.dim() - 1) / (sh * sh) - (space.k() - 1) / (ch * ch);
}

/// Area of the unit sphere S^{d-1} in R^d: 2 pi^{d/2} / Gamma(d/2).
inline double unit_sphere_area(int d) {
    if (d < 1) throw std::invalid_argument("unit_sphere_area: requires d >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Area of the geodesic sphere of radius r.
inline double sphere_area(const Space& space, double r) {
    detail::require_positive_radius(r, "sphere_area");
    return unit_sphere_area(space.dim()) * density(space, r);
}

/// Volume of the geodesic ball of radius r (radial integral of the
/// sphere area). Strictly increasing in r.
inline double ball_volume(const Space& space, double r) {
    detail::require_positive_radius(r, "ball_volume");
    double integral = integrate([&](double t) { return density(space, t); }, 0.0, r, 1e-13,
                                "ball volume density");
    return unit_sphere_area(space.dim()) * integral;
}

/// Inverts ball_volume: returns R with ball_volume(space, R) = V to 1e-12
/// relative, by bracketing plus safeguarded Newton (derivative = sphere_area).
inline double radius_for_volume(const Space& space, double volume) {
    if (!(volume > 0.0))
        throw std::invalid_argument("radius_for_volume: requires a positive volume");
    // Growth rate of phi is kn+k-2; keep exp arguments clear of overflow.
    const double r_max = 690.0 / (space.dim() + space.k() - 2);
    double hi = 1.0;
    while (ball_volume(space, hi) < volume) {
        hi *= 2.0;
        if (hi > r_max)
            throw std::invalid_argument("radius_for_volume: volume too large to represent");
    }
    double lo = 0.0;
    double x = 0.75 * hi;
    double f = ball_volume(space, x) - volume;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(f) <= 1e-13 * volume) break;
        if (f > 0.0) hi = x; else lo = x;
        double step = -f / sphere_area(space, x);
        double next = x + step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
        x = next;
        f = ball_volume(space, x) - volume;
    }
    return x;
}

}  // namespace steklov
