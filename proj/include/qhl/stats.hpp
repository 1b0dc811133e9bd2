#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qhl/grid_series.hpp"

namespace qhl {

struct HurstEstimate {
    double H = 0.0;
    double r_squared = 0.0;
    bool smooth_warning = false;  // estimate >= 0.95, input looks differentiable
};

// Variogram (q = 2) Hurst estimator: regress log E|x_{t+tau} - x_t|^2 on
// log tau over dyadic lags and take half the slope. Needs >= 256 samples;
// EstimationError on constant input.
HurstEstimate hurst_estimate(const GridSeries& series,
                             std::vector<std::size_t> lags = {});

struct TraCurve {
    std::vector<std::size_t> lags;
    std::vector<double> forward_corr;   // corr(R^2_t, vol_{t+tau})
    std::vector<double> backward_corr;  // corr(R^2_t, vol_{t-tau})
    double asymmetry_index = 0.0;       // sum over lags of forward - backward
};

// Time-reversal asymmetry diagnostic. R_t is the centred window sum of
// returns (squared coarse return) and vol_t the centred rolling realized
// variance; both use the same odd window so the statistic is exactly
// antisymmetric under time reversal of the input. The squared *aggregated*
// return in the past leg is what carries the momentum-to-volatility effect;
// the pointwise r_t^2 variant is blind to it (its cross-correlations reduce
// to the even autocovariance of r^2).
TraCurve tra_statistic(const std::vector<double>& returns, std::size_t vol_window,
                       std::vector<std::size_t> lags = {});

// iid bootstrap standard error of the asymmetry index (null: exchangeable
// returns). Serial dependence calls for path-level resampling instead.
double tra_bootstrap_stderr(const std::vector<double>& returns, std::size_t vol_window,
                            const std::vector<std::size_t>& lags, std::size_t reps,
                            std::uint64_t seed);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct CovariationInput {
    GridSeries Mstar, Mbarstar, X, Xbar;
};

struct CovariationReport {
    bool skipped = false;
    std::string note;
    std::size_t paths = 0;
    // relative errors of Monte Carlo means at the final grid node
    double rel_err_qv = 0.0;     // [M*] vs Xbar
    double rel_err_qv_bar = 0.0; // [Mbar*] vs Xbar
    double rel_err_cross = 0.0;  // [M*, Mbar*] vs X
    double mean_xbar = 0.0, mean_x = 0.0;
    // mean over paths of the sup-norm trajectory gaps
    double traj_gap_qv = 0.0, traj_gap_qv_bar = 0.0, traj_gap_cross = 0.0;
};

// Discrete quadratic (co)variation identities: [M*] and [Mbar*] against Xbar,
// [M*, Mbar*] against X. Report-only; never throws on bad statistics.
CovariationReport covariation_check(const std::vector<CovariationInput>& paths);

struct McSummary {
    GridSeries mean;
    GridSeries stderr_of_mean;
    std::size_t paths = 0;
};

// Deterministic Monte Carlo aggregation: contributions are keyed by path
// index and folded in index order at finalize time, so merges commute
// bit-for-bit and results do not depend on worker scheduling.
class McAccumulator {
  public:
    void add(std::size_t path_index, GridSeries series);
    void merge(McAccumulator other);
    McSummary finalize() const;
    std::size_t size() const { return entries_.size(); }

  private:
    mutable std::vector<std::pair<std::size_t, GridSeries>> entries_;
};

// P(Binomial(n, 1/2) >= k); one-sided sign-test p-value.
double binomial_sf_half(std::size_t n, std::size_t k);

}  // namespace qhl
