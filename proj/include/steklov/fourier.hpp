#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace steklov {

/// Real truncated Fourier series c0 + sum_m (a_m cos m t + b_m sin m t).
struct FourierSeries {
    double c0 = 0.0;
    std::vector<double> cos_coeffs;  // a_1 .. a_M
    std::vector<double> sin_coeffs;  // b_1 .. b_M

    int max_harmonic() const {
        return static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
    }

    double eval(double t) const {
        double v = c0;
        for (size_t m = 0; m < cos_coeffs.size(); ++m) v += cos_coeffs[m] * std::cos((m + 1) * t);
        for (size_t m = 0; m < sin_coeffs.size(); ++m) v += sin_coeffs[m] * std::sin((m + 1) * t);
        return v;
    }

    double eval_derivative(double t) const {
        double v = 0.0;
        for (size_t m = 0; m < cos_coeffs.size(); ++m)
            v -= (m + 1) * cos_coeffs[m] * std::sin((m + 1) * t);
        for (size_t m = 0; m < sin_coeffs.size(); ++m)
            v += (m + 1) * sin_coeffs[m] * std::cos((m + 1) * t);
        return v;
    }

    double eval_second_derivative(double t) const {
        double v = 0.0;
        for (size_t m = 0; m < cos_coeffs.size(); ++m)
            v -= (m + 1.0) * (m + 1.0) * cos_coeffs[m] * std::cos((m + 1) * t);
        for (size_t m = 0; m < sin_coeffs.size(); ++m)
            v -= (m + 1.0) * (m + 1.0) * sin_coeffs[m] * std::sin((m + 1) * t);
        return v;
    }
};

/// Project uniform periodic samples v_j = v(2 pi j / N) onto harmonics
/// 1..max_harmonic by the trapezoid rule (exact for trigonometric
/// polynomials of degree < N - max_harmonic).
inline FourierSeries fit_fourier(const std::vector<double>& samples, int max_harmonic) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 * max_harmonic + 1)
        throw std::invalid_argument("fit_fourier: need more than 2*max_harmonic samples");
    FourierSeries series;
    series.cos_coeffs.assign(max_harmonic, 0.0);
    series.sin_coeffs.assign(max_harmonic, 0.0);
    double mean = 0.0;
    for (double v : samples) mean += v;
    series.c0 = mean / n;
    for (int m = 1; m <= max_harmonic; ++m) {
        double ca = 0.0, sa = 0.0;
        for (int j = 0; j < n; ++j) {
            double t = 2.0 * M_PI * j * m / n;
            ca += samples[j] * std::cos(t);
            sa += samples[j] * std::sin(t);
        }
        series.cos_coeffs[m - 1] = 2.0 * ca / n;
        series.sin_coeffs[m - 1] = 2.0 * sa / n;
    }
    return series;
}

/// Trigonometric interpolant of uniform periodic samples (even or odd count),
/// exact at the nodes. The Nyquist cosine mode of an even grid carries
/// weight 1/N instead of 2/N.
class TrigInterpolant {
   public:
    explicit TrigInterpolant(std::vector<double> samples) : n_(samples.size()) {
        if (n_ < 2) throw std::invalid_argument("TrigInterpolant: need at least 2 samples");
        const int half = static_cast<int>(n_) / 2;
        const bool even = n_ % 2 == 0;
        const int top = even ? half - 1 : half;
        series_.cos_coeffs.assign(even ? half : top, 0.0);
        series_.sin_coeffs.assign(top, 0.0);
        double mean = 0.0;
        for (double v : samples) mean += v;
        series_.c0 = mean / n_;
        for (int m = 1; m <= top; ++m) {
            double ca = 0.0, sa = 0.0;
            for (size_t j = 0; j < n_; ++j) {
                double t = 2.0 * M_PI * j * m / n_;
                ca += samples[j] * std::cos(t);
                sa += samples[j] * std::sin(t);
            }
            series_.cos_coeffs[m - 1] = 2.0 * ca / n_;
            series_.sin_coeffs[m - 1] = 2.0 * sa / n_;
        }
        if (even) {
            double ca = 0.0;
            for (size_t j = 0; j < n_; ++j)
                ca += samples[j] * (j % 2 == 0 ? 1.0 : -1.0);
            series_.cos_coeffs[half - 1] = ca / n_;
        }
    }

    double operator()(double t) const { return series_.eval(t); }
    const FourierSeries& series() const { return series_; }

   private:
    size_t n_;
    FourierSeries series_;
};

}  // namespace steklov
