#pragma once

// Exact fractional Brownian motion generator (Cholesky of the fBm covariance)
// used as the calibration oracle for the Hurst estimator.

#include <cmath>
#include <cstdint>
#include <vector>

#include "qhl/errors.hpp"
#include "qhl/grid_series.hpp"
#include "qhl/rng.hpp"

namespace qhl_test {

class FbmGenerator {
  public:
    FbmGenerator(double hurst, std::size_t points, double dt = 1.0)
        : h_(hurst), n_(points), dt_(dt) {
        // covariance of fBm at the grid times (excluding t=0)
        std::vector<double> cov(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                double s = dt_ * static_cast<double>(i + 1);
                double t = dt_ * static_cast<double>(j + 1);
                cov[i * n_ + j] = 0.5 * (std::pow(s, 2 * h_) + std::pow(t, 2 * h_) -
                                         std::pow(std::abs(t - s), 2 * h_));
            }
        chol_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double acc = cov[i * n_ + j];
                for (std::size_t k = 0; k < j; ++k)
                    acc -= chol_[i * n_ + k] * chol_[j * n_ + k];
                if (i == j) {
                    if (acc <= 0.0) throw qhl::EstimationError("fbm: covariance not SPD");
                    chol_[i * n_ + i] = std::sqrt(acc);
                } else {
                    chol_[i * n_ + j] = acc / chol_[j * n_ + j];
                }
            }
        }
    }

    qhl::GridSeries path(std::uint64_t seed) const {
        qhl::Rng rng(seed);
        std::vector<double> z(n_);
        for (auto& v : z) v = rng.normal();
        std::vector<double> out(n_ + 1, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= i; ++k) acc += chol_[i * n_ + k] * z[k];
            out[i + 1] = acc;
        }
        return qhl::GridSeries(0.0, dt_, std::move(out));
    }

  private:
    double h_;
    std::size_t n_;
    double dt_;
    std::vector<double> chol_;
};

}  // namespace qhl_test
