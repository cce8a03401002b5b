#pragma once

// Ordinary least squares polynomial fit via normal equations (degree <= 3,
// solved with partial-pivoting Gaussian elimination).

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ddi {

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PolyFit {
    std::vector<double> coefficients;  // c0 + c1 x + c2 x^2 + ...
    double r_squared = 0.0;

    double predict(double x) const {
        double y = 0, p = 1;
        for (double c : coefficients) {
            y += c * p;
            p *= x;
        }
        return y;
    }
};

inline PolyFit fit_polynomial_trend(const std::vector<std::pair<double, double>>& points,
                                    int degree) {
    if (degree < 1 || degree > 3) throw std::invalid_argument("degree must be 1..3");
    const size_t n = points.size();
    const size_t m = static_cast<size_t>(degree) + 1;
    if (n < m + 1) throw RankDeficient("fit_polynomial_trend: too few points");

    // normal equations A c = b with A[r][k] = sum x^(r+k), b[r] = sum y x^r
    std::vector<double> moments(2 * m - 1, 0.0);
    std::vector<double> b(m, 0.0);
    for (const auto& [x, y] : points) {
        double p = 1;
        for (size_t k = 0; k < 2 * m - 1; ++k) {
            moments[k] += p;
            if (k < m) b[k] += y * p;
            p *= x;
        }
    }
    std::vector<std::vector<double>> a(m, std::vector<double>(m));
    for (size_t r = 0; r < m; ++r)
        for (size_t k = 0; k < m; ++k) a[r][k] = moments[r + k];

    // scale-aware pivot threshold
    double max_entry = 0;
    for (const auto& row : a)
        for (double v : row) max_entry = std::max(max_entry, std::fabs(v));

    for (size_t col = 0; col < m; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < m; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-12 * std::max(1.0, max_entry))
            throw RankDeficient("fit_polynomial_trend: degenerate input");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (size_t k = col; k < m; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    PolyFit fit;
    fit.coefficients.resize(m);
    for (size_t k = 0; k < m; ++k) fit.coefficients[k] = b[k] / a[k][k];

    double mean = 0;
    for (const auto& [x, y] : points) mean += y;
    mean /= static_cast<double>(n);
    double rss = 0, tss = 0;
    for (const auto& [x, y] : points) {
        double e = y - fit.predict(x);
        rss += e * e;
        tss += (y - mean) * (y - mean);
    }
    fit.r_squared = tss > 0 ? 1.0 - rss / tss : 1.0;
    return fit;
}

}  // namespace ddi
