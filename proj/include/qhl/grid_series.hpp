#pragma once

#include <cstddef>
#include <vector>

#include "qhl/errors.hpp"

namespace qhl {

// Values on a uniform time grid t0, t0+dt, ..., t0+n*dt. The workhorse type
// for everything sampled on a grid (intensities, limit paths, resolvents).
class GridSeries {
  public:
    GridSeries() = default;

    GridSeries(double t0, double dt, std::vector<double> values)
        : t0_(t0), dt_(dt), values_(std::move(values)) {
        if (dt_ <= 0.0) throw ParameterError("GridSeries: dt must be positive");
        if (values_.size() < 2) throw ParameterError("GridSeries: need at least 2 points");
    }

    // Grid covering [t0, t0+span] with `points` samples (span/(points-1) step).
    static GridSeries zeros(double t0, double span, std::size_t points) {
        if (points < 2) throw ParameterError("GridSeries: need at least 2 points");
        return GridSeries(t0, span / static_cast<double>(points - 1),
                          std::vector<double>(points, 0.0));
    }

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    std::size_t size() const { return values_.size(); }
    double time(std::size_t i) const { return t0_ + dt_ * static_cast<double>(i); }
    double span() const { return dt_ * static_cast<double>(values_.size() - 1); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool same_grid(const GridSeries& o) const {
        return values_.size() == o.values_.size() &&
               std::abs(t0_ - o.t0_) <= 1e-12 * (1.0 + std::abs(t0_)) &&
               std::abs(dt_ - o.dt_) <= 1e-12 * dt_;
    }

    GridSeries& operator+=(const GridSeries& o) {
        check_grid(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    GridSeries& operator-=(const GridSeries& o) {
        check_grid(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    GridSeries& operator*=(double c) {
        for (auto& v : values_) v *= c;
        return *this;
    }

    friend GridSeries operator+(GridSeries a, const GridSeries& b) { return a += b; }
    friend GridSeries operator-(GridSeries a, const GridSeries& b) { return a -= b; }
    friend GridSeries operator*(double c, GridSeries a) { return a *= c; }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    double sup_gap(const GridSeries& o) const {
        check_grid(o);
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            m = std::max(m, std::abs(values_[i] - o.values_[i]));
        return m;
    }

    // Running trapezoid integral, same grid, starts at 0.
    GridSeries cumulative_integral() const {
        std::vector<double> out(values_.size(), 0.0);
        for (std::size_t i = 1; i < values_.size(); ++i)
            out[i] = out[i - 1] + 0.5 * dt_ * (values_[i] + values_[i - 1]);
        return GridSeries(t0_, dt_, std::move(out));
    }

    // Series of one-step differences; index i holds v[i+1]-v[i], last repeated 0.
    std::vector<double> increments() const {
        std::vector<double> d(values_.size() - 1);
        for (std::size_t i = 0; i + 1 < values_.size(); ++i) d[i] = values_[i + 1] - values_[i];
        return d;
    }

  private:
    void check_grid(const GridSeries& o) const {
        if (!same_grid(o)) throw ParameterError("GridSeries: grid mismatch");
    }

    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> values_;
};

}  // namespace qhl
