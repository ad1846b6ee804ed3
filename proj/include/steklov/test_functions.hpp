#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steklov/ball_spectrum.hpp"
#include "steklov/hyperbolic_domain.hpp"
#include "steklov/steklov_solver.hpp"
#include "steklov/symmetric_space.hpp"

namespace steklov {

// ---------------------------------------------------------------------------
// Frames at a point of a geodesic sphere

/// Two orthonormal bases of the tangent space at a sphere point: the rows of
/// `basis` are the coordinate directions X_i, the rows of `eta` the adapted
/// frame whose first row is the radial direction w(q), whose next k-1 rows
/// span the complex-structure images of w, and whose remaining kn-k rows
/// complete the frame. Only the block sizes enter the gradient formula.
struct Frame {
    Space space;
    double r;
    Eigen::MatrixXd basis;
    Eigen::MatrixXd eta;
};

inline Frame make_frame(const Space& space, double r, Eigen::MatrixXd basis,
                        Eigen::MatrixXd eta) {
    detail::require_positive_radius(r, "make_frame");
    const int kn = space.dim();
    if (basis.rows() != kn || basis.cols() != kn || eta.rows() != kn || eta.cols() != kn)
        throw std::invalid_argument("make_frame: matrices must be kn x kn");
    auto check_orthogonal = [kn](const Eigen::MatrixXd& m, const char* which) {
        double dev = (m * m.transpose() - Eigen::MatrixXd::Identity(kn, kn))
                         .cwiseAbs()
                         .maxCoeff();
        if (dev > 1e-12)
            throw std::invalid_argument(std::string("make_frame: ") + which +
                                        " is not orthogonal (deviation " +
                                        std::to_string(dev) + ")");
    };
    check_orthogonal(basis, "basis");
    check_orthogonal(eta, "eta");
    return Frame{space, r, std::move(basis), std::move(eta)};
}

/// Haar-random orthogonal matrix via QR of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

inline Frame random_frame(const Space& space, double r, std::mt19937_64& rng) {
    const int kn = space.dim();
    return make_frame(space, r, random_orthogonal(kn, rng).transpose(),
                      random_orthogonal(kn, rng).transpose());
}

/// Squared sphere-gradient norms of the coordinate functions f_i = x_i/r:
///   |grad f_i|^2 = sum_{j=2..k} <X_i,eta_j>^2 / (sinh^2 r cosh^2 r)
///               + sum_{j=k+1..kn} <X_i,eta_j>^2 / sinh^2 r.
/// Their sum over i is lambda_1(S(r)).
inline Eigen::VectorXd frame_gradient_norms(const Frame& frame) {
    const int kn = frame.space.dim();
    const int k = frame.space.k();
    const double sh2 = std::pow(std::sinh(frame.r), 2);
    const double ch2 = std::pow(std::cosh(frame.r), 2);
    Eigen::MatrixXd overlap = frame.basis * frame.eta.transpose();  // <X_i, eta_j>
    Eigen::VectorXd norms = Eigen::VectorXd::Zero(kn);
    for (int i = 0; i < kn; ++i) {
        double complex_block = 0.0, generic_block = 0.0;
        for (int j = 1; j < k; ++j) complex_block += overlap(i, j) * overlap(i, j);
        for (int j = k; j < kn; ++j) generic_block += overlap(i, j) * overlap(i, j);
        norms[i] = complex_block / (sh2 * ch2) + generic_block / sh2;
    }
    return norms;
}

// ---------------------------------------------------------------------------
// The eigenvalue-weighted gradient bound

struct Lemma52Result {
    double lhs;    // sum_i |grad f_i|^2 / mu_i over all kn indices
    double rhs;    // (1/l) sum_{i<=l} lambda_1 / mu_i
    double slack;  // rhs - lhs, nonnegative up to roundoff
    bool holds;
};

/// Checks sum_{i=1}^{kn} |grad f_i|^2/mu_i <= (1/l) sum_{i=1}^{l} lambda_1/mu_i
/// for an ascending eigenvalue list of length >= l+1. Lists shorter than kn
/// are extended with their last entry, which only enlarges the left side.
inline Lemma52Result lemma52_bound(const std::vector<double>& mu,
                                   const Eigen::VectorXd& grad_norms, const Space& space,
                                   double r, int l) {
    const int kn = space.dim();
    if (l < 1 || l > kn) throw std::invalid_argument("lemma52_bound: l must lie in [1, kn]");
    if (static_cast<int>(mu.size()) < l + 1)
        throw std::invalid_argument("lemma52_bound: need at least l+1 eigenvalues");
    if (grad_norms.size() != kn)
        throw std::invalid_argument("lemma52_bound: gradient norms must have kn entries");
    for (size_t i = 0; i < mu.size(); ++i) {
        if (!(mu[i] > 0.0))
            throw std::invalid_argument("lemma52_bound: eigenvalues must be positive");
        if (i > 0 && mu[i] < mu[i - 1])
            throw std::invalid_argument("lemma52_bound: eigenvalues must be ascending");
    }
    const double lambda1 = sphere_lambda1(space, r);
    double lhs = 0.0;
    for (int i = 0; i < kn; ++i) {
        double mui = mu[std::min<size_t>(i, mu.size() - 1)];
        lhs += grad_norms[i] / mui;
    }
    double rhs = 0.0;
    for (int i = 0; i < l; ++i) rhs += lambda1 / mu[i];
    rhs /= l;
    double slack = rhs - lhs;
    return Lemma52Result{lhs, rhs, slack, slack >= -1e-12 * std::max(1.0, rhs)};
}

// ---------------------------------------------------------------------------
// Center of mass (the g-weighted boundary moment zero)

struct CenterOfMass {
    Complex point;
    double residual;   // |moment(point)|
    double scale;      // perimeter * max g, the residual reference
    int iterations;
    bool converged;
};

/// Finds p with int_{dOmega} g(d(p,q)) w_{p->q} dA = 0 by damped Newton with
/// a finite-difference Jacobian, starting from the disk-model centroid of
/// the boundary nodes. The moment map is evaluated in the tangent chart at
/// p obtained by translating p to the disk origin.
inline CenterOfMass center_of_mass(const StarDomain& domain, int node_count = 0) {
    if (node_count == 0) node_count = std::max(1024, 16 * domain.max_harmonic());
    if (node_count % 2 != 0) ++node_count;
    BoundaryQuadrature quad = boundary_quadrature(domain, node_count);

    double g_max = 0.0;
    for (const BoundaryNode& node : quad.nodes) g_max = std::max(g_max, node.g);
    const double scale = quad.perimeter * g_max;
    const double tol = 1e-10 * scale;

    auto moment = [&](Complex p) {
        Complex sum = 0.0;
        for (const BoundaryNode& node : quad.nodes) {
            Complex w = mobius_to_origin(node.disk_point, p);
            double dist = 2.0 * std::atanh(std::abs(w));
            sum += radial_g(hyperbolic_plane(), dist) * (w / std::abs(w)) * node.weight;
        }
        return sum;
    };

    // initial guess: Euclidean centroid of the boundary nodes in the disk
    Complex p = 0.0;
    for (const BoundaryNode& node : quad.nodes) p += node.disk_point * node.weight;
    p /= quad.perimeter;
    if (!contains(domain, p)) p = domain.base_point();

    Complex f = moment(p);
    double best = std::abs(f);
    int iter = 0;
    for (; iter < 100 && best > tol; ++iter) {
        const double h = 1e-6;
        Complex fx = (moment(p + h) - moment(p - h)) / (2.0 * h);
        Complex fy = (moment(p + Complex(0, h)) - moment(p - Complex(0, h))) / (2.0 * h);
        // solve J dp = -f for dp = (dx, dy)
        double det = fx.real() * fy.imag() - fy.real() * fx.imag();
        if (!(std::abs(det) > 1e-300)) break;
        double dx = (-f.real() * fy.imag() + fy.real() * f.imag()) / det;
        double dy = (-fx.real() * f.imag() + f.real() * fx.imag()) / det;
        Complex step(dx, dy);

        double damping = 1.0;
        bool improved = false;
        for (int backtrack = 0; backtrack < 40; ++backtrack) {
            Complex trial = p + damping * step;
            if (std::abs(trial) < 1.0) {
                Complex ft = moment(trial);
                if (std::abs(ft) < best) {
                    p = trial;
                    f = ft;
                    best = std::abs(ft);
                    improved = true;
                    break;
                }
            }
            damping *= 0.5;  // halve on residual increase
        }
        if (!improved) break;
    }
    return CenterOfMass{p, best, scale, iter, best <= 1e-8 * scale};
}

// ---------------------------------------------------------------------------
// QR-orthogonalized coordinate test functions

struct OrthogonalizedBasis {
    Eigen::MatrixXd coupling;    // A_ij = int g (x_i/r) u_j dA, coordinates at p
    Eigen::MatrixXd rotation;    // orthogonal U with U A upper triangular
    Eigen::MatrixXd triangular;  // T = U A
    bool rank_deficient;
};

/// Rotates the coordinate functions about p so that the new x'_i/r are
/// boundary-orthogonal to the eigenfunctions u_j for j < i (QR of the
/// coupling matrix). Uses the first kn nonconstant eigenfunctions.
inline OrthogonalizedBasis orthogonalized_basis(const StarDomain& domain,
                                                const SteklovSpectrum& spectrum, Complex p) {
    const int kn = hyperbolic_plane().dim();  // 2
    if (spectrum.count() < kn + 1)
        throw std::invalid_argument(
            "orthogonalized_basis: spectrum must hold at least kn nonconstant modes");
    if (!contains(domain, p))
        throw std::invalid_argument("orthogonalized_basis: p must lie inside the domain");

    const int nodes = static_cast<int>(spectrum.node_points.size());
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(kn, kn);
    for (int q = 0; q < nodes; ++q) {
        Complex w = mobius_to_origin(spectrum.node_points[q], p);
        double dist = 2.0 * std::atanh(std::abs(w));
        Complex dir = w / std::abs(w);
        double gv = radial_g(hyperbolic_plane(), dist) * spectrum.node_weights[q];
        for (int j = 0; j < kn; ++j) {
            double u = spectrum.boundary_traces(1 + j, q);
            coupling(0, j) += gv * dir.real() * u;
            coupling(1, j) += gv * dir.imag() * u;
        }
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(coupling);
    Eigen::MatrixXd rotation = Eigen::MatrixXd(qr.householderQ()).transpose();
    Eigen::MatrixXd triangular = rotation * coupling;
    double norm = coupling.norm();
    bool deficient = std::abs(triangular(kn - 1, kn - 1)) <= 1e-10 * std::max(norm, 1e-300);
    return OrthogonalizedBasis{coupling, rotation, triangular, deficient};
}

// ---------------------------------------------------------------------------
// Theorem verification

struct ChainStep {
    std::string name;
    double lhs;
    double rhs;
    double slack;  // lhs - rhs
    double scale;
    bool ok;
};

struct TheoremReport {
    std::string domain_id;
    int degree = 0;
    unsigned seed = 0;
    int l = 0;
    double area = 0.0;
    double ball_radius = 0.0;
    double mu1_domain = 0.0;
    double mu2_domain = 0.0;
    double mu1_ball = 0.0;
    double lhs = 0.0;  // sum_{i<=l} 1/mu_i(Omega)
    double rhs = 0.0;  // sum_{i<=l} 1/mu_i(B(R))
    double gap = 0.0;  // lhs - rhs
    Complex center;
    double moment_residual = 0.0;
    int com_iterations = 0;
    double recenter_fit_residual = 0.0;
    bool convex = false;
    double min_geodesic_curvature = 0.0;
    double orthogonality_residual = 0.0;  // max |int g (x'_i/r) u_j dA| / |A|, j < i
    std::vector<double> rayleigh_bounds;  // per-i upper bounds N_i / D_i
    std::vector<double> lemma512_deviation;  // per-i int g'^2 x_i^2/r^2 - (1/kn) int g'^2
    double lemma512_sum_residual = 0.0;
    double lemma52_min_slack = 0.0;
    double boundary_g2 = 0.0;  // int_{dOmega} g^2 dA
    double sphere_g2 = 0.0;    // vol(S(R)) g(R)^2
    std::vector<ChainStep> chain;
    bool pass = false;
    std::string failure_reason;
};

struct VerifyOptions {
    int radial_nodes = 64;
    int angular_nodes = 256;
    unsigned seed = 12345;
    double tolerance = 1e-6;  // relative slack tolerance of the chain
    std::string domain_id = "domain";
};

/// Evaluates every intermediate quantity of the reciprocal-sum comparison on
/// a hyperbolic-plane domain: per-mode Rayleigh bounds with the rotated
/// coordinate test functions, the summed energy bound, the boundary
/// inequality against the equal-volume ball, and the final comparison.
/// All interior integrals run in geodesic polar coordinates about the
/// center of mass (area element sinh r dr dbeta).
inline TheoremReport verify_theorem(const StarDomain& domain, int degree,
                                    const VerifyOptions& opts = {}) {
    const Space& h2 = hyperbolic_plane();
    const int kn = h2.dim();
    const int l = theorem_l(h2);  // 1

    TheoremReport report;
    report.domain_id = opts.domain_id;
    report.degree = degree;
    report.seed = opts.seed;
    report.l = l;

    ConvexityVerdict convexity = is_convex(domain);
    report.convex = convexity.convex;
    report.min_geodesic_curvature = convexity.min_curvature;

    report.area = area(domain);
    report.ball_radius = radius_for_volume(h2, report.area);
    BallSpectrum ball = ball_spectrum(h2, report.ball_radius);
    report.mu1_ball = ball.mu1;

    SteklovSpectrum spectrum = solve_spectrum(domain, MetricMode::hyperbolic, degree);
    report.mu1_domain = spectrum.mu(1);
    report.mu2_domain = spectrum.mu(2);

    CenterOfMass com = center_of_mass(domain);
    report.center = com.point;
    report.moment_residual = com.residual;
    report.com_iterations = com.iterations;
    if (!com.converged) {
        report.pass = false;
        report.failure_reason = "center_of_mass did not converge (residual " +
                                std::to_string(com.residual) + ")";
        return report;
    }

    OrthogonalizedBasis basis = orthogonalized_basis(domain, spectrum, com.point);
    const Eigen::MatrixXd& rot = basis.rotation;

    // Boundary integrals at the solver nodes (same grid as the traces).
    const int nodes = static_cast<int>(spectrum.node_points.size());
    std::vector<double> boundary_g2_fi(kn, 0.0);
    double boundary_g2 = 0.0;
    double orth_worst = 0.0;
    for (int q = 0; q < nodes; ++q) {
        Complex w = mobius_to_origin(spectrum.node_points[q], com.point);
        double dist = 2.0 * std::atanh(std::abs(w));
        Complex dir = w / std::abs(w);
        double gv = radial_g(h2, dist);
        double wq = spectrum.node_weights[q];
        boundary_g2 += gv * gv * wq;
        for (int i = 0; i < kn; ++i) {
            double fi = rot(i, 0) * dir.real() + rot(i, 1) * dir.imag();
            boundary_g2_fi[i] += gv * gv * fi * fi * wq;
        }
    }
    // recomputed post-rotation couplings (j < i should vanish)
    {
        Eigen::MatrixXd rotated = rot * basis.coupling;
        double scale = std::max(basis.coupling.norm(), 1e-300);
        for (int i = 0; i < kn; ++i)
            for (int j = 0; j < i; ++j)
                orth_worst = std::max(orth_worst, std::abs(rotated(i, j)) / scale);
    }
    report.orthogonality_residual = orth_worst;
    report.boundary_g2 = boundary_g2;
    report.sphere_g2 = sphere_area(h2, report.ball_radius) * ball.g_at_R * ball.g_at_R;

    // Interior integrals in geodesic polar coordinates about the center.
    double fit_residual = 0.0;
    StarDomain recentred = recenter(domain, com.point, &fit_residual);
    report.recenter_fit_residual = fit_residual;

    const GaussLegendreRule& radial = gauss_legendre(opts.radial_nodes);
    const int n_ang = opts.angular_nodes;
    double int_gp2 = 0.0, int_g2lam = 0.0;
    std::vector<double> int_gp2_fi(kn, 0.0), int_sphere_grad(kn, 0.0);
    for (int a = 0; a < n_ang; ++a) {
        double beta = 2.0 * M_PI * a / n_ang;
        double rmax = recentred.boundary_radius(beta);
        double cosb = std::cos(beta), sinb = std::sin(beta);
        std::array<double, 2> fi = {rot(0, 0) * cosb + rot(0, 1) * sinb,
                                    rot(1, 0) * cosb + rot(1, 1) * sinb};
        for (int s = 0; s < opts.radial_nodes; ++s) {
            double r = 0.5 * (radial.nodes[s] + 1.0) * rmax;
            double wr = 0.5 * radial.weights[s] * rmax;
            double sh = std::sinh(r);
            double dv = sh * wr * (2.0 * M_PI / n_ang);
            double g = radial_g(h2, r);
            double gp = 1.0 - mean_curvature_trace(h2, r) * g;
            int_gp2 += gp * gp * dv;
            int_g2lam += g * g / (sh * sh) * dv;
            for (int i = 0; i < kn; ++i) {
                int_gp2_fi[i] += gp * gp * fi[i] * fi[i] * dv;
                int_sphere_grad[i] += g * g * (1.0 - fi[i] * fi[i]) / (sh * sh) * dv;
            }
        }
    }
    const double energy_domain = int_gp2 + int_g2lam;

    // Ball-side quantities by radial quadrature (Gauss nodes are interior,
    // so the r > 0 precondition of radial_energy is never violated).
    double energy_ball =
        unit_sphere_area(kn) *
        integrate([&](double t) { return radial_energy(h2, t) * density(h2, t); }, 0.0,
                  report.ball_radius, 1e-11, "ball energy");

    // Per-index deviations from the averaged identity (recorded, not asserted).
    report.lemma512_deviation.resize(kn);
    double sum_fi = 0.0;
    for (int i = 0; i < kn; ++i) {
        report.lemma512_deviation[i] = int_gp2_fi[i] - int_gp2 / kn;
        sum_fi += int_gp2_fi[i];
    }
    report.lemma512_sum_residual = sum_fi - int_gp2;

    // Randomized spot check of the gradient bound with the computed spectrum.
    {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> radius_draw(0.05 * report.ball_radius,
                                                           report.ball_radius);
        std::vector<double> mu = {spectrum.mu(1), spectrum.mu(2)};
        double min_slack = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 32; ++trial) {
            double r = radius_draw(rng);
            Frame frame = random_frame(h2, r, rng);
            Lemma52Result res = lemma52_bound(mu, frame_gradient_norms(frame), h2, r, l);
            min_slack = std::min(min_slack, res.slack / std::max(1.0, res.rhs));
        }
        report.lemma52_min_slack = min_slack;
    }

    // The inequality chain.
    auto add_step = [&](const std::string& name, double lhs, double rhs) {
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        ChainStep step{name, lhs, rhs, lhs - rhs, scale,
                       lhs - rhs >= -opts.tolerance * scale};
        report.chain.push_back(step);
    };

    report.rayleigh_bounds.resize(kn);
    double weighted_sum = 0.0;  // sum_i N_i / mu_i
    for (int i = 0; i < kn; ++i) {
        double numerator = int_gp2_fi[i] + int_sphere_grad[i];
        double mu_i = spectrum.mu(1 + i);
        report.rayleigh_bounds[i] = numerator / boundary_g2_fi[i];
        weighted_sum += numerator / mu_i;
        add_step("rayleigh_bound_" + std::to_string(i + 1), numerator,
                 mu_i * boundary_g2_fi[i]);
    }
    add_step("test_function_sum", weighted_sum, boundary_g2);

    double harmonic_energy = 0.0;  // (1/l) sum_{i<=l} E / mu_i
    for (int i = 0; i < l; ++i) harmonic_energy += energy_domain / spectrum.mu(1 + i);
    harmonic_energy /= l;
    add_step("gradient_bound", harmonic_energy, weighted_sum);
    add_step("summed_bound", harmonic_energy, boundary_g2);
    add_step("lemma53_boundary", boundary_g2, report.sphere_g2);
    add_step("energy_rearrangement", energy_ball, energy_domain);

    report.lhs = 0.0;
    for (int i = 0; i < l; ++i) report.lhs += 1.0 / spectrum.mu(1 + i);
    report.rhs = harmonic_sum_ball(h2, report.ball_radius, l);
    report.gap = report.lhs - report.rhs;
    add_step("final_comparison", report.lhs, report.rhs);

    report.pass = true;
    for (const ChainStep& step : report.chain) {
        if (!step.ok) {
            report.pass = false;
            report.failure_reason = "chain step '" + step.name + "' violated (slack " +
                                    std::to_string(step.slack) + ")";
            break;
        }
    }
    return report;
}

/// Euclidean-mode cross-check of the reciprocal-sum bound on plane domains:
/// 1/mu_1 + 1/mu_2 >= 2 R with R the same-area disk radius.
struct BrockCheck {
    double mu1;
    double mu2;
    double reciprocal_sum;
    double ball_radius;
    double rhs;
    double slack;
    bool holds;
};

inline BrockCheck brock_check_euclidean(const StarDomain& domain, int degree) {
    SteklovSpectrum spectrum = solve_spectrum(domain, MetricMode::euclidean, degree);
    double R = std::sqrt(euclidean_area(domain) / M_PI);
    BrockCheck check;
    check.mu1 = spectrum.mu(1);
    check.mu2 = spectrum.mu(2);
    check.reciprocal_sum = 1.0 / check.mu1 + 1.0 / check.mu2;
    check.ball_radius = R;
    check.rhs = 2.0 * R;
    check.slack = check.reciprocal_sum - check.rhs;
    check.holds = check.slack >= -1e-6 * check.rhs;
    return check;
}

// ---------------------------------------------------------------------------
// Report serialization

inline nlohmann::json to_json(const ChainStep& step) {
    return nlohmann::json{{"name", step.name}, {"lhs", step.lhs},     {"rhs", step.rhs},
                          {"slack", step.slack}, {"scale", step.scale}, {"ok", step.ok}};
}

inline nlohmann::json to_json(const TheoremReport& report) {
    nlohmann::json j;
    j["domain_id"] = report.domain_id;
    j["degree"] = report.degree;
    j["seed"] = report.seed;
    j["l"] = report.l;
    j["area"] = report.area;
    j["ball_radius"] = report.ball_radius;
    j["mu1_domain"] = report.mu1_domain;
    j["mu2_domain"] = report.mu2_domain;
    j["mu1_ball"] = report.mu1_ball;
    j["lhs"] = report.lhs;
    j["rhs"] = report.rhs;
    j["gap"] = report.gap;
    j["center"] = {report.center.real(), report.center.imag()};
    j["moment_residual"] = report.moment_residual;
    j["com_iterations"] = report.com_iterations;
    j["recenter_fit_residual"] = report.recenter_fit_residual;
    j["convex"] = report.convex;
    j["min_geodesic_curvature"] = report.min_geodesic_curvature;
    j["orthogonality_residual"] = report.orthogonality_residual;
    j["rayleigh_bounds"] = report.rayleigh_bounds;
    j["lemma512_deviation"] = report.lemma512_deviation;
    j["lemma512_sum_residual"] = report.lemma512_sum_residual;
    j["lemma52_min_slack"] = report.lemma52_min_slack;
    j["boundary_g2"] = report.boundary_g2;
    j["sphere_g2"] = report.sphere_g2;
    j["chain"] = nlohmann::json::array();
    for (const ChainStep& step : report.chain) j["chain"].push_back(to_json(step));
    j["pass"] = report.pass;
    j["failure_reason"] = report.failure_reason;
    return j;
}

}  // namespace steklov
