#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steklov/ball_spectrum.hpp"
#include "steklov/disk_model.hpp"
#include "steklov/fourier.hpp"
#include "steklov/quadrature.hpp"
#include "steklov/symmetric_space.hpp"

namespace steklov {

inline const Space& hyperbolic_plane() {
    static const Space h2(1, 2);
    return h2;
}

/// Bounded domain in the hyperbolic plane, star-shaped about a base point,
/// with boundary given in geodesic polar coordinates about the base:
///   r(theta) = c0 + sum_m (a_m cos m theta + b_m sin m theta).
/// Construction validates |base| < 1 and r > 0 on a dense grid. Immutable.
class StarDomain {
   public:
    StarDomain(Complex base_point, FourierSeries radius)
        : base_(base_point), radius_(std::move(radius)) {
        if (std::abs(base_) >= 1.0)
            throw std::invalid_argument("StarDomain: base point must lie inside the unit disk");
        const int grid = std::max(4096, 64 * radius_.max_harmonic());
        double rmin = radius_.eval(0.0);
        for (int j = 1; j < grid; ++j)
            rmin = std::min(rmin, radius_.eval(2.0 * M_PI * j / grid));
        if (!(rmin > 0.0))
            throw std::invalid_argument(
                "StarDomain: boundary radius must be positive for every angle (min " +
                std::to_string(rmin) + ")");
    }

    Complex base_point() const { return base_; }
    const FourierSeries& radius() const { return radius_; }
    int max_harmonic() const { return radius_.max_harmonic(); }

    double boundary_radius(double theta) const { return radius_.eval(theta); }

   private:
    Complex base_;
    FourierSeries radius_;
};

inline StarDomain ball_domain(double R, Complex base = 0.0) {
    detail::require_positive_radius(R, "ball_domain");
    FourierSeries series;
    series.c0 = R;
    return StarDomain(base, series);
}

/// Hyperbolic area, int_0^{2pi} (cosh r(theta) - 1) dtheta.
inline double area(const StarDomain& domain) {
    int start = std::max(64, 8 * domain.max_harmonic());
    QuadratureResult res = integrate_periodic(
        [&](double t) { return std::cosh(domain.boundary_radius(t)) - 1.0; }, 1e-13, start);
    return res.value;
}

/// Hyperbolic boundary length, ds = sqrt(r'(theta)^2 + sinh^2 r(theta)) dtheta.
inline double perimeter(const StarDomain& domain) {
    int start = std::max(64, 8 * domain.max_harmonic());
    QuadratureResult res = integrate_periodic(
        [&](double t) {
            double r = domain.boundary_radius(t);
            double rp = domain.radius().eval_derivative(t);
            double sh = std::sinh(r);
            return std::sqrt(rp * rp + sh * sh);
        },
        1e-13, start);
    return res.value;
}

/// Boundary point in the Poincare disk at polar angle theta about the base.
inline Complex boundary_disk_point(const StarDomain& domain, double theta) {
    return polar_to_disk(domain.boundary_radius(theta), theta, domain.base_point());
}

/// Sampled disk-model boundary curve at uniform theta.
inline std::vector<Complex> to_disk_model(const StarDomain& domain, int count = 256) {
    std::vector<Complex> curve(count);
    for (int j = 0; j < count; ++j)
        curve[j] = boundary_disk_point(domain, 2.0 * M_PI * j / count);
    return curve;
}

/// One boundary quadrature node: the polar data about the base point, the
/// disk-model position, the hyperbolic arclength weight, and the values of
/// g and of the coordinate functions x_i/r there.
struct BoundaryNode {
    double theta;
    double r;
    Complex disk_point;
    double weight;      // dA contribution (hyperbolic arclength)
    double g;           // radial profile g(r)
    Complex direction;  // (x_1/r, x_2/r) = (cos theta, sin theta) about the base
};

struct BoundaryQuadrature {
    std::vector<BoundaryNode> nodes;
    double perimeter = 0.0;  // sum of weights
};

/// Uniform-theta periodic-trapezoid quadrature of the boundary.
inline BoundaryQuadrature boundary_quadrature(const StarDomain& domain, int count) {
    if (count < 16 || count % 2 != 0)
        throw std::invalid_argument("boundary_quadrature: node count must be even and >= 16");
    BoundaryQuadrature q;
    q.nodes.resize(count);
    const double h = 2.0 * M_PI / count;
    for (int j = 0; j < count; ++j) {
        double theta = h * j;
        double r = domain.boundary_radius(theta);
        double rp = domain.radius().eval_derivative(theta);
        double sh = std::sinh(r);
        BoundaryNode& node = q.nodes[j];
        node.theta = theta;
        node.r = r;
        node.disk_point = boundary_disk_point(domain, theta);
        node.weight = std::sqrt(rp * rp + sh * sh) * h;
        node.g = radial_g(hyperbolic_plane(), r);
        node.direction = std::polar(1.0, theta);
        q.perimeter += node.weight;
    }
    return q;
}

/// Geodesic curvature of the boundary at angle theta, computed in the disk
/// model through the conformal relation between Euclidean and hyperbolic
/// curvature. Positive for convex arcs; a circle of radius R gives coth R.
inline double geodesic_curvature(const StarDomain& domain, double theta) {
    const Complex b = domain.base_point();
    const double r = domain.boundary_radius(theta);
    const double rp = domain.radius().eval_derivative(theta);
    const double rpp = domain.radius().eval_second_derivative(theta);

    // Curve about the origin: w = u(theta) e^{i theta}, u = tanh(r/2).
    const double u = std::tanh(0.5 * r);
    const double sech2 = 1.0 - u * u;  // sech^2(r/2)
    const double up = 0.5 * rp * sech2;
    const double upp = 0.5 * rpp * sech2 - 0.5 * rp * rp * sech2 * u;
    const Complex phase = std::polar(1.0, theta);
    const Complex w = u * phase;
    const Complex wp = (Complex(up, u)) * phase;
    const Complex wpp = (Complex(upp - u, 2.0 * up)) * phase;

    // Mobius translation to the true position and its chain rule.
    const Complex denom = 1.0 + std::conj(b) * w;
    const double bfac = 1.0 - std::norm(b);
    const Complex t1 = bfac / (denom * denom);
    const Complex t2 = -2.0 * std::conj(b) * bfac / (denom * denom * denom);
    const Complex z = (w + b) / denom;
    const Complex zp = t1 * wp;
    const Complex zpp = t2 * wp * wp + t1 * wpp;

    const double speed = std::abs(zp);
    const double kappa_e = (std::conj(zp) * zpp).imag() / (speed * speed * speed);
    // grad log rho = 2 z / (1 - |z|^2); outward normal is -i zp / |zp|.
    const Complex normal = Complex(0.0, -1.0) * zp / speed;
    const double dn_logrho =
        2.0 * (std::conj(z) * normal).real() / (1.0 - std::norm(z));
    return (kappa_e + dn_logrho) * (1.0 - std::norm(z)) / 2.0;
}

struct ConvexityVerdict {
    bool convex;
    double min_curvature;
    double argmin_theta;
};

/// Convexity via the sign of the geodesic curvature on a dense grid.
/// The -1e-10 floor tolerates roundoff at the equality case (balls).
inline ConvexityVerdict is_convex(const StarDomain& domain, int grid = 2048) {
    ConvexityVerdict verdict{true, std::numeric_limits<double>::infinity(), 0.0};
    for (int j = 0; j < grid; ++j) {
        double theta = 2.0 * M_PI * j / grid;
        double kappa = geodesic_curvature(domain, theta);
        if (kappa < verdict.min_curvature) {
            verdict.min_curvature = kappa;
            verdict.argmin_theta = theta;
        }
    }
    verdict.convex = verdict.min_curvature >= -1e-10;
    return verdict;
}

/// Membership test in the closed region (strict interior when margin > 0).
inline bool contains(const StarDomain& domain, Complex z, double margin = 0.0) {
    if (std::abs(z) >= 1.0) return false;
    PolarCoords pc = disk_to_polar(z, domain.base_point());
    return pc.r < domain.boundary_radius(pc.theta) - margin;
}

/// Re-expresses the same region star-shaped about a new interior point p:
/// the boundary is resampled densely, its polar graph about p recovered by
/// monotone inversion of the angle map, and refit by Fourier projection.
/// The recentred radius is not a finite Fourier series, so the harmonic
/// count starts at double the original and keeps doubling (cap 512) until
/// the sup-norm residual on the sample grid is below 1e-11 of the radius
/// scale; the achieved residual is written to fit_residual when given.
inline StarDomain recenter(const StarDomain& domain, Complex p,
                           double* fit_residual = nullptr) {
    if (!contains(domain, p))
        throw std::invalid_argument("recenter: point must lie strictly inside the domain");

    const int dense = std::max(8192, 64 * domain.max_harmonic());

    // Unwrapped angle about p as a function of the original parameter.
    auto angle_raw = [&](double theta) {
        Complex w = mobius_to_origin(boundary_disk_point(domain, theta), p);
        return std::arg(w);
    };
    std::vector<double> theta_grid(dense + 1), psi(dense + 1);
    double offset = 0.0;
    double prev = angle_raw(0.0);
    theta_grid[0] = 0.0;
    psi[0] = prev;
    for (int j = 1; j <= dense; ++j) {
        double theta = 2.0 * M_PI * j / dense;
        double a = angle_raw(theta);
        if (a < prev - M_PI) offset += 2.0 * M_PI;
        if (a > prev + M_PI) offset -= 2.0 * M_PI;
        theta_grid[j] = theta;
        double unwrapped = a + offset;
        if (unwrapped <= psi[j - 1])
            throw std::runtime_error(
                "recenter: boundary is not star-shaped about the requested point");
        psi[j] = unwrapped;
        prev = a;
    }

    // Invert psi(theta) = target by bisection inside a bracketing cell.
    auto invert = [&](double target) {
        // bring target into [psi_0, psi_0 + 2 pi)
        while (target < psi.front()) target += 2.0 * M_PI;
        while (target >= psi.front() + 2.0 * M_PI) target -= 2.0 * M_PI;
        auto it = std::upper_bound(psi.begin(), psi.end(), target);
        int hi_idx = std::clamp(static_cast<int>(it - psi.begin()), 1, dense);
        double lo = theta_grid[hi_idx - 1], hi = theta_grid[hi_idx];
        double psi_lo = psi[hi_idx - 1];
        for (int iter = 0; iter < 60; ++iter) {
            double mid = 0.5 * (lo + hi);
            double a = angle_raw(mid);
            // continuous value near psi_lo
            double k = std::round((psi_lo - a) / (2.0 * M_PI));
            double val = a + 2.0 * M_PI * k;
            if (val < target) { lo = mid; psi_lo = val; } else { hi = mid; }
        }
        double theta = 0.5 * (lo + hi);
        Complex w = mobius_to_origin(boundary_disk_point(domain, theta), p);
        return 2.0 * std::atanh(std::abs(w));
    };

    const int samples = 8192;
    const int cap = 512;
    std::vector<double> radii(samples);
    double scale = 0.0;
    for (int j = 0; j < samples; ++j) {
        radii[j] = invert(2.0 * M_PI * j / samples);
        scale = std::max(scale, radii[j]);
    }

    auto residual_of = [&](const FourierSeries& t) {
        double worst = 0.0;
        for (int j = 0; j < samples; ++j)
            worst = std::max(worst,
                             std::abs(t.eval(2.0 * M_PI * j / samples) - radii[j]));
        return worst;
    };

    // Projection coefficients do not depend on the truncation order, so the
    // doubling loop just recomputes the prefix at the next size.
    int harmonics = std::min(std::max(2 * domain.max_harmonic(), 8), cap);
    FourierSeries fitted = fit_fourier(radii, harmonics);
    double worst = residual_of(fitted);
    while (worst > 1e-11 * scale && harmonics < cap) {
        harmonics = std::min(2 * harmonics, cap);
        fitted = fit_fourier(radii, harmonics);
        worst = residual_of(fitted);
    }
    if (fit_residual) *fit_residual = worst;
    return StarDomain(p, std::move(fitted));
}

// ---------------------------------------------------------------------------
// JSON domain spec: {"base_point":[x,y], "c0":R, "cos":[a1,...], "sin":[b1,...]}

inline StarDomain domain_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("domain spec: expected a JSON object");
    if (!j.contains("c0")) throw std::invalid_argument("domain spec: missing field 'c0'");
    FourierSeries series;
    series.c0 = j.at("c0").get<double>();
    if (j.contains("cos")) series.cos_coeffs = j.at("cos").get<std::vector<double>>();
    if (j.contains("sin")) series.sin_coeffs = j.at("sin").get<std::vector<double>>();
    Complex base = 0.0;
    if (j.contains("base_point")) {
        auto b = j.at("base_point").get<std::vector<double>>();
        if (b.size() != 2)
            throw std::invalid_argument("domain spec: base_point must be a pair [x, y]");
        base = Complex(b[0], b[1]);
    }
    return StarDomain(base, std::move(series));
}

inline nlohmann::json domain_to_json(const StarDomain& domain) {
    nlohmann::json j;
    j["base_point"] = {domain.base_point().real(), domain.base_point().imag()};
    j["c0"] = domain.radius().c0;
    j["cos"] = domain.radius().cos_coeffs;
    j["sin"] = domain.radius().sin_coeffs;
    return j;
}

inline StarDomain load_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open domain file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return domain_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& err) {
        // Translate the byte offset into a line for the error message.
        size_t line = 1;
        for (size_t i = 0; i < std::min(err.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw std::runtime_error("malformed JSON in " + path + " near line " +
                                 std::to_string(line) + ": " + err.what());
    }
}

}  // namespace steklov
