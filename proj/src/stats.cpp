#include "qhl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qhl/errors.hpp"
#include "qhl/rng.hpp"

namespace qhl {
namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t n = a.size();
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

TraCurve tra_core(const std::vector<double>& r, std::size_t w,
                  const std::vector<std::size_t>& lags) {
    const std::size_t n = r.size();
    const std::size_t c = (w - 1) / 2;
    const std::size_t tmax = *std::max_element(lags.begin(), lags.end());
    if (n < 2 * (c + tmax) + 2) throw RangeError("tra_statistic: window/lags exceed series");

    // centred coarse return and realized variance on the common support
    std::vector<double> coarse2(n, 0.0), vol(n, 0.0);
    for (std::size_t t = c; t + c < n; ++t) {
        double sr = 0.0, sq = 0.0;
        for (std::size_t j = t - c; j <= t + c; ++j) {
            sr += r[j];
            sq += r[j] * r[j];
        }
        coarse2[t] = sr * sr;
        vol[t] = sq / static_cast<double>(w);
    }

    const std::size_t lo = c + tmax;
    const std::size_t hi = n - 1 - c - tmax;  // inclusive
    TraCurve out;
    out.lags = lags;
    for (std::size_t tau : lags) {
        std::vector<double> p, vf, vb;
        p.reserve(hi - lo + 1);
        for (std::size_t t = lo; t <= hi; ++t) {
            p.push_back(coarse2[t]);
            vf.push_back(vol[t + tau]);
            vb.push_back(vol[t - tau]);
        }
        double f = pearson(p, vf);
        double b = pearson(p, vb);
        out.forward_corr.push_back(f);
        out.backward_corr.push_back(b);
        out.asymmetry_index += f - b;
    }
    return out;
}

}  // namespace

HurstEstimate hurst_estimate(const GridSeries& series, std::vector<std::size_t> lags) {
    const std::size_t n = series.size();
    if (n < 256) throw ParameterError("hurst_estimate: need at least 256 samples");
    if (lags.empty())
        for (std::size_t l = 1; l <= n / 8; l *= 2) lags.push_back(l);
    std::vector<double> lx, ly;
    for (std::size_t tau : lags) {
        if (tau == 0 || tau > n / 2) throw ParameterError("hurst_estimate: bad lag");
        double acc = 0.0;
        std::size_t cnt = 0;
        for (std::size_t t = 0; t + tau < n; ++t) {
            double d = series[t + tau] - series[t];
            acc += d * d;
            ++cnt;
        }
        double m = acc / static_cast<double>(cnt);
        if (m <= 0.0) throw EstimationError("hurst_estimate: degenerate (constant) series");
        lx.push_back(std::log(static_cast<double>(tau)));
        ly.push_back(std::log(m));
    }
    const std::size_t k = lx.size();
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    HurstEstimate est;
    est.H = 0.5 * sxy / sxx;
    est.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    est.smooth_warning = est.H >= 0.95;
    return est;
}

TraCurve tra_statistic(const std::vector<double>& returns, std::size_t vol_window,
                       std::vector<std::size_t> lags) {
    if (vol_window < 3 || vol_window % 2 == 0)
        throw ParameterError("tra_statistic: window must be odd and >= 3");
    if (lags.empty()) lags = {1, 2, 4, 8, 16, 32};
    return tra_core(returns, vol_window, lags);
}

double tra_bootstrap_stderr(const std::vector<double>& returns, std::size_t vol_window,
                            const std::vector<std::size_t>& lags, std::size_t reps,
                            std::uint64_t seed) {
    if (reps < 2) throw ParameterError("tra_bootstrap_stderr: need >= 2 replicates");
    Rng rng(seed);
    std::vector<double> idx(reps, 0.0);
    std::vector<double> resampled(returns.size());
    for (std::size_t b = 0; b < reps; ++b) {
        for (auto& v : resampled) {
            auto j = static_cast<std::size_t>(rng.uniform() * returns.size());
            v = returns[std::min(j, returns.size() - 1)];
        }
        idx[b] = tra_statistic(resampled, vol_window,
                               std::vector<std::size_t>(lags))
                     .asymmetry_index;
    }
    double m = std::accumulate(idx.begin(), idx.end(), 0.0) / reps;
    double s2 = 0.0;
    for (double v : idx) s2 += (v - m) * (v - m);
    return std::sqrt(s2 / (reps - 1));
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ParameterError("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

CovariationReport covariation_check(const std::vector<CovariationInput>& paths) {
    CovariationReport rep;
    rep.paths = paths.size();
    if (paths.empty()) {
        rep.skipped = true;
        rep.note = "no paths";
        return rep;
    }
    for (const auto& p : paths)
        if (!p.Mstar.same_grid(p.Xbar) || !p.Mbarstar.same_grid(p.Xbar) ||
            !p.X.same_grid(p.Xbar))
            throw ParameterError("covariation_check: paths must share one grid");

    bool any_noise = false;
    for (const auto& p : paths)
        if (p.Mstar.sup_norm() > 0.0 || p.Mbarstar.sup_norm() > 0.0) any_noise = true;
    if (!any_noise) {
        rep.skipped = true;
        rep.note = "martingale parts vanish (noise off); brackets are identically zero";
        return rep;
    }

    const std::size_t n = paths.front().Xbar.size();
    double qv_end = 0.0, qvb_end = 0.0, cross_end = 0.0, x_end = 0.0, xb_end = 0.0;
    for (const auto& p : paths) {
        double qv = 0.0, qvb = 0.0, cr = 0.0;
        double g1 = 0.0, g2 = 0.0, g3 = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double dm = p.Mstar[i + 1] - p.Mstar[i];
            double dmb = p.Mbarstar[i + 1] - p.Mbarstar[i];
            qv += dm * dm;
            qvb += dmb * dmb;
            cr += dm * dmb;
            g1 = std::max(g1, std::abs(qv - p.Xbar[i + 1]));
            g2 = std::max(g2, std::abs(qvb - p.Xbar[i + 1]));
            g3 = std::max(g3, std::abs(cr - p.X[i + 1]));
        }
        qv_end += qv;
        qvb_end += qvb;
        cross_end += cr;
        x_end += p.X[n - 1];
        xb_end += p.Xbar[n - 1];
        rep.traj_gap_qv += g1;
        rep.traj_gap_qv_bar += g2;
        rep.traj_gap_cross += g3;
    }
    const double np = static_cast<double>(paths.size());
    qv_end /= np;
    qvb_end /= np;
    cross_end /= np;
    x_end /= np;
    xb_end /= np;
    rep.traj_gap_qv /= np;
    rep.traj_gap_qv_bar /= np;
    rep.traj_gap_cross /= np;
    rep.mean_x = x_end;
    rep.mean_xbar = xb_end;
    rep.rel_err_qv = std::abs(qv_end - xb_end) / std::max(1e-300, std::abs(xb_end));
    rep.rel_err_qv_bar = std::abs(qvb_end - xb_end) / std::max(1e-300, std::abs(xb_end));
    rep.rel_err_cross = std::abs(cross_end - x_end) / std::max(1e-300, std::abs(x_end));
    return rep;
}

void McAccumulator::add(std::size_t path_index, GridSeries series) {
    entries_.emplace_back(path_index, std::move(series));
}

void McAccumulator::merge(McAccumulator other) {
    entries_.insert(entries_.end(), std::make_move_iterator(other.entries_.begin()),
                    std::make_move_iterator(other.entries_.end()));
}

McSummary McAccumulator::finalize() const {
    if (entries_.size() < 2) throw ParameterError("McAccumulator: need >= 2 paths");
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].first == entries_[i - 1].first)
            throw ParameterError("McAccumulator: duplicate path index");
        if (!entries_[i].second.same_grid(entries_.front().second))
            throw ParameterError("McAccumulator: grid mismatch between paths");
    }
    const std::size_t n = entries_.size();
    const std::size_t m = entries_.front().second.size();
    const GridSeries& proto = entries_.front().second;
    McSummary out;
    out.paths = n;
    out.mean = GridSeries::zeros(proto.t0(), proto.span(), m);
    out.stderr_of_mean = out.mean;
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0, comp = 0.0;
        for (const auto& [idx, s] : entries_) {
            double y = s[j] - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        double mean = sum / static_cast<double>(n);
        double s2 = 0.0, c2 = 0.0;
        for (const auto& [idx, s] : entries_) {
            double d = (s[j] - mean) * (s[j] - mean);
            double y = d - c2;
            double t = s2 + y;
            c2 = (t - s2) - y;
            s2 = t;
        }
        out.mean[j] = mean;
        out.stderr_of_mean[j] =
            std::sqrt(s2 / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
    return out;
}

double binomial_sf_half(std::size_t n, std::size_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    double acc = 0.0;
    const double ln2 = std::log(2.0);
    for (std::size_t j = k; j <= n; ++j) {
        double lg = std::lgamma(static_cast<double>(n + 1)) -
                    std::lgamma(static_cast<double>(j + 1)) -
                    std::lgamma(static_cast<double>(n - j + 1)) -
                    static_cast<double>(n) * ln2;
        acc += std::exp(lg);
    }
    return std::min(1.0, acc);
}

}  // namespace qhl
