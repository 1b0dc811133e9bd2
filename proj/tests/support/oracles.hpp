#pragma once

// Shared independent oracles for the test suites.

#include <cmath>
#include <vector>

namespace qhl_test {

// Brute-force Mittag-Leffler partial sums in extended precision, summed until
// the term drops below 1e-30. Valid while cancellation stays below the extra
// precision, i.e. for arguments with modest peak terms.
inline double ml_series_brute(double alpha, double beta, double s) {
    long double sum = 0.0L;
    long double power = 1.0L;
    for (int n = 0; n < 40000; ++n) {
        long double term =
            power * expl(-lgammal(static_cast<long double>(alpha) * n + beta));
        sum += term;
        power *= s;
        if (n > 8 && fabsl(term) < 1e-30L) break;
    }
    return static_cast<double>(sum);
}

// One-sample Kolmogorov-Smirnov statistic against the Exp(rate) distribution.
inline double ks_exponential(std::vector<double> samples, double rate) {
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = 1.0 - std::exp(-rate * samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Critical value of the one-sample KS test (Stephens' approximation).
inline double ks_critical(std::size_t n, double alpha_level) {
    double c = std::sqrt(-0.5 * std::log(alpha_level / 2.0));
    double sn = std::sqrt(static_cast<double>(n));
    return c / (sn + 0.12 + 0.11 / sn);
}

}  // namespace qhl_test
