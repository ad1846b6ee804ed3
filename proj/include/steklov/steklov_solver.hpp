#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "steklov/disk_model.hpp"
#include "steklov/hyperbolic_domain.hpp"

namespace steklov {

/// Which metric the Steklov problem lives in. Euclidean mode reads the
/// domain's radius function as a plane polar graph; hyperbolic mode reads
/// it as a geodesic polar graph in the Poincare disk. Both reduce to the
/// same Euclidean Galerkin system because the 2-D Dirichlet energy is
/// conformally invariant: the metric enters only through the boundary
/// density rho in the mass matrix (rho = 1, resp. 2/(1-|z|^2)).
enum class MetricMode { euclidean, hyperbolic };

inline const char* to_string(MetricMode mode) {
    return mode == MetricMode::euclidean ? "euclidean" : "hyperbolic";
}

/// Plane-geometry readings of the Fourier radius, used by the Euclidean mode.
inline double euclidean_area(const StarDomain& domain) {
    int start = std::max(64, 8 * domain.max_harmonic());
    return integrate_periodic(
               [&](double t) {
                   double r = domain.boundary_radius(t);
                   return 0.5 * r * r;
               },
               1e-13, start)
        .value;
}

inline double euclidean_perimeter(const StarDomain& domain) {
    int start = std::max(64, 8 * domain.max_harmonic());
    return integrate_periodic(
               [&](double t) {
                   double r = domain.boundary_radius(t);
                   double rp = domain.radius().eval_derivative(t);
                   return std::sqrt(rp * rp + r * r);
               },
               1e-13, start)
        .value;
}

/// Galerkin discretization of the Steklov problem over the harmonic basis
/// {1, Re z^m, Im z^m : m <= degree} centered at the disk-model origin
/// (the domain is taken with its base point moved to 0, an isometry).
/// K_ab = boundary integral of u_a du_b/dn (Dirichlet energy by Green),
/// M_ab = boundary integral of u_a u_b rho ds.
struct GalerkinSystem {
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd mass;
    Eigen::MatrixXd basis_values;  // (n_basis x n_nodes)
    std::vector<double> node_theta;
    std::vector<Complex> node_points;   // curve in true coordinates
    std::vector<double> node_weights;   // rho ds, the boundary measure dA
    double basis_scale = 1.0;
    double mass_condition = 0.0;
    double asymmetry = 0.0;  // ||K - K^T|| / ||K|| before symmetrization
};

namespace detail {

struct CurvePoint {
    Complex position;   // curve point in the assembly frame (base at 0)
    Complex tangent;    // d/dtheta of the position
    double rho;         // boundary density of the mode
};

inline CurvePoint curve_point(const StarDomain& domain, MetricMode mode, double theta) {
    const double r = domain.boundary_radius(theta);
    const double rp = domain.radius().eval_derivative(theta);
    const Complex phase = std::polar(1.0, theta);
    if (mode == MetricMode::euclidean) {
        return CurvePoint{r * phase, Complex(rp, r) * phase, 1.0};
    }
    const double u = std::tanh(0.5 * r);
    const double up = 0.5 * rp * (1.0 - u * u);
    Complex z = u * phase;
    return CurvePoint{z, Complex(up, u) * phase, 2.0 / (1.0 - std::norm(z))};
}

}  // namespace detail

inline GalerkinSystem assemble(const StarDomain& domain, MetricMode mode, int degree,
                               int node_count = 0) {
    if (degree < 4) throw std::invalid_argument("assemble: degree must be >= 4");
    if (node_count == 0) node_count = std::max(8 * degree, 256);
    if (node_count < 8 * degree || node_count % 2 != 0)
        throw std::invalid_argument("assemble: node count must be even and >= 8*degree");

    const int n_basis = 2 * degree + 1;
    const double dtheta = 2.0 * M_PI / node_count;

    GalerkinSystem sys;
    sys.node_theta.resize(node_count);
    sys.node_points.resize(node_count);
    sys.node_weights.resize(node_count);

    std::vector<detail::CurvePoint> curve(node_count);
    double radius_scale = 0.0;
    for (int j = 0; j < node_count; ++j) {
        double theta = dtheta * j;
        curve[j] = detail::curve_point(domain, mode, theta);
        sys.node_theta[j] = theta;
        sys.node_points[j] = mode == MetricMode::hyperbolic
                                 ? mobius_translate(curve[j].position, domain.base_point())
                                 : curve[j].position + domain.base_point();
        sys.node_weights[j] = curve[j].rho * std::abs(curve[j].tangent) * dtheta;
        radius_scale = std::max(radius_scale, std::abs(curve[j].position));
    }
    sys.basis_scale = radius_scale;

    // Basis values and scaled powers zeta^m = (z/scale)^m at every node.
    sys.basis_values.resize(n_basis, node_count);
    Eigen::MatrixXd normal_derivs(n_basis, node_count);  // du/dn * |z'|
    for (int j = 0; j < node_count; ++j) {
        const Complex z = curve[j].position / radius_scale;
        const Complex nu = Complex(0, -1) * curve[j].tangent;  // outward normal * |z'|
        sys.basis_values(0, j) = 1.0;
        normal_derivs(0, j) = 0.0;
        Complex zm = 1.0;  // z^{m-1}
        for (int m = 1; m <= degree; ++m) {
            const Complex grad_re = std::conj(double(m) * zm) / radius_scale;
            const Complex grad_im = Complex(0, 1) * grad_re;
            zm *= z;
            sys.basis_values(2 * m - 1, j) = zm.real();
            sys.basis_values(2 * m, j) = zm.imag();
            normal_derivs(2 * m - 1, j) = (std::conj(grad_re) * nu).real();
            normal_derivs(2 * m, j) = (std::conj(grad_im) * nu).real();
        }
    }

    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(sys.node_weights.data(), node_count);
    Eigen::VectorXd dt = Eigen::VectorXd::Constant(node_count, dtheta);

    Eigen::MatrixXd K = sys.basis_values * dt.asDiagonal() * normal_derivs.transpose();
    sys.asymmetry = (K - K.transpose()).norm() / std::max(K.norm(), 1e-300);
    sys.stiffness = 0.5 * (K + K.transpose());
    sys.mass = sys.basis_values * w.asDiagonal() * sys.basis_values.transpose();
    sys.mass = 0.5 * (sys.mass + sys.mass.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> mass_eigs(sys.mass,
                                                             Eigen::EigenvaluesOnly);
    double lo = mass_eigs.eigenvalues().minCoeff();
    double hi = mass_eigs.eigenvalues().maxCoeff();
    sys.mass_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(lo > 0.0) || sys.mass_condition > 1e12)
        throw std::runtime_error(
            "assemble: boundary mass matrix is ill-conditioned (estimate " +
            std::to_string(sys.mass_condition) +
            "); lower the basis degree for this domain");
    return sys;
}

/// Steklov spectrum of a domain: ascending eigenvalues (mu_0 ~ 0 first) with
/// boundary traces orthonormalized in the weighted boundary inner product.
struct SteklovSpectrum {
    MetricMode mode = MetricMode::hyperbolic;
    int degree = 0;
    std::vector<double> eigenvalues;
    Eigen::MatrixXd boundary_traces;  // (n_eigs x n_nodes), int u_i u_j dA = delta_ij
    Eigen::MatrixXd coefficients;     // (n_basis x n_eigs) in the scaled harmonic basis
    std::vector<double> node_theta;
    std::vector<Complex> node_points;
    std::vector<double> node_weights;
    double residual_estimate = 0.0;
    double mass_condition = 0.0;

    int count() const { return static_cast<int>(eigenvalues.size()); }
    double mu(int i) const {
        if (i < 0 || i >= count())
            throw std::out_of_range("SteklovSpectrum::mu: index " + std::to_string(i) +
                                    " out of range");
        return eigenvalues[i];
    }
};

/// Solve K c = mu M c by Cholesky reduction of M plus a symmetric
/// eigensolver; eigenvectors come out M-orthonormal, which makes the node
/// traces orthonormal for the boundary measure.
inline SteklovSpectrum solve_spectrum(const StarDomain& domain, MetricMode mode, int degree,
                                      int node_count = 0) {
    GalerkinSystem sys = assemble(domain, mode, degree, node_count);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        sys.stiffness, sys.mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("solve_spectrum: generalized eigensolver failed");

    SteklovSpectrum spectrum;
    spectrum.mode = mode;
    spectrum.degree = degree;
    spectrum.node_theta = sys.node_theta;
    spectrum.node_points = sys.node_points;
    spectrum.node_weights = sys.node_weights;
    spectrum.mass_condition = sys.mass_condition;

    const Eigen::VectorXd& vals = solver.eigenvalues();
    const Eigen::MatrixXd& vecs = solver.eigenvectors();
    spectrum.eigenvalues.resize(vals.size());
    for (int i = 0; i < vals.size(); ++i)
        spectrum.eigenvalues[i] = std::max(vals[i], 0.0);  // clamp -0-level roundoff
    spectrum.coefficients = vecs;
    spectrum.boundary_traces = vecs.transpose() * sys.basis_values;

    double residual = 0.0;
    double kscale = std::max(sys.stiffness.norm(), 1e-300);
    for (int i = 0; i < vals.size(); ++i) {
        Eigen::VectorXd r = sys.stiffness * vecs.col(i) - vals[i] * (sys.mass * vecs.col(i));
        residual = std::max(residual, r.norm() / (kscale * vecs.col(i).norm()));
    }
    spectrum.residual_estimate = residual;
    return spectrum;
}

/// Rayleigh quotient of a test function given by harmonic-basis coefficients
/// (size 2N+1 fixes the degree). Equals the eigenvalue on an eigenvector.
inline double rayleigh_quotient(const StarDomain& domain, MetricMode mode,
                                const Eigen::VectorXd& coeffs) {
    if (coeffs.size() < 9 || coeffs.size() % 2 == 0)
        throw std::invalid_argument(
            "rayleigh_quotient: coefficient vector must have odd size 2*degree+1, degree >= 4");
    int degree = (static_cast<int>(coeffs.size()) - 1) / 2;
    GalerkinSystem sys = assemble(domain, mode, degree);
    double denom = coeffs.dot(sys.mass * coeffs);
    double scale = coeffs.squaredNorm() * sys.mass.norm();
    if (denom <= 1e-14 * scale)
        throw std::invalid_argument("rayleigh_quotient: test function has zero boundary norm");
    return coeffs.dot(sys.stiffness * coeffs) / denom;
}

struct ConvergenceRow {
    int degree;
    std::array<double, 4> mu;       // mu_1 .. mu_4
    double max_rel_change;          // against the previous row
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    bool converged = false;  // last successive change <= 1e-6
};

/// Cauchy-difference table of mu_1..mu_4 over ascending degrees.
inline ConvergenceStudy convergence_study(const StarDomain& domain, MetricMode mode,
                                          const std::vector<int>& degrees) {
    if (degrees.empty()) throw std::invalid_argument("convergence_study: empty degree list");
    for (size_t i = 1; i < degrees.size(); ++i)
        if (degrees[i] <= degrees[i - 1])
            throw std::invalid_argument("convergence_study: degrees must be ascending");
    ConvergenceStudy study;
    for (int degree : degrees) {
        SteklovSpectrum spectrum = solve_spectrum(domain, mode, degree);
        ConvergenceRow row{degree, {0, 0, 0, 0}, 0.0};
        for (int i = 1; i <= 4 && i < spectrum.count(); ++i) row.mu[i - 1] = spectrum.mu(i);
        if (!study.rows.empty()) {
            const ConvergenceRow& prev = study.rows.back();
            for (int i = 0; i < 4; ++i) {
                double denom = std::max(std::abs(row.mu[i]), 1e-300);
                row.max_rel_change =
                    std::max(row.max_rel_change, std::abs(row.mu[i] - prev.mu[i]) / denom);
            }
        }
        study.rows.push_back(row);
    }
    study.converged = study.rows.size() < 2 || study.rows.back().max_rel_change <= 1e-6;
    return study;
}

}  // namespace steklov
