#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace steklov {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Build an n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussLegendreRule make_gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess for the i-th positive root.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Recurrence for P_n(x) and derivative.
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Cached rule lookup; safe under concurrent callers.
inline const GaussLegendreRule& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, int order) {
    const GaussLegendreRule& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + hw * rule.nodes[i]);
    return hw * sum;
}

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // |I_{2n} - I_n| of the last doubling
    int points = 0;
    bool converged = false;
};

/// Adaptive Gauss-Legendre: the node count doubles until two successive
/// rules agree to rel_tol. Intended for smooth (analytic) integrands.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                                    int max_order = 16384) {
    QuadratureResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    double prev = integrate_gl(f, a, b, 16);
    res.points = 16;
    for (int n = 32; n <= max_order; n *= 2) {
        double cur = integrate_gl(f, a, b, n);
        res.points += n;
        res.error_estimate = std::abs(cur - prev);
        res.value = cur;
        if (res.error_estimate <= rel_tol * std::max(std::abs(cur), 1e-300)) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    res.value = prev;
    return res;
}

/// Convergence-checked integral; throws on failure with the achieved estimate.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                 const char* what = "integrand") {
    QuadratureResult res = integrate_adaptive(std::forward<F>(f), a, b, rel_tol);
    if (!res.converged) {
        throw std::runtime_error(std::string("quadrature did not converge for ") + what +
                                 ": achieved error estimate " +
                                 std::to_string(res.error_estimate) + " after " +
                                 std::to_string(res.points) + " points");
    }
    return res.value;
}

/// Periodic trapezoid rule over [0, 2pi); spectrally accurate for smooth
/// periodic integrands. Node count doubles until successive values agree.
template <class F>
QuadratureResult integrate_periodic(F&& f, double rel_tol = 1e-13, int min_nodes = 64,
                                    int max_nodes = 1 << 17) {
    auto eval = [&](int n) {
        double sum = 0.0;
        const double h = 2.0 * M_PI / n;
        for (int j = 0; j < n; ++j) sum += f(h * j);
        return sum * h;
    };
    QuadratureResult res;
    double prev = eval(min_nodes);
    res.points = min_nodes;
    for (int n = 2 * min_nodes; n <= max_nodes; n *= 2) {
        double cur = eval(n);
        res.points = n;
        res.error_estimate = std::abs(cur - prev);
        res.value = cur;
        if (res.error_estimate <= rel_tol * std::max(std::abs(cur), 1e-300)) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    res.value = prev;
    return res;
}

}  // namespace steklov
