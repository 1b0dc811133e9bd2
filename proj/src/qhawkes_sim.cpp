#include "qhl/qhawkes_sim.hpp"

#include <algorithm>
#include <cmath>

#include "qhl/rng.hpp"

namespace qhl {
namespace {

constexpr double kHistoryEps = 1e-10;  // drop events once the kernel falls below this

bool exp_variant(const KernelSpec& k) { return k.variant() == KernelVariant::exponential; }

// Running sum of kern(t - t_i) over a stream of event times.
class ExcitationSum {
  public:
    explicit ExcitationSum(const KernelSpec& k)
        : kern_(k),
          fast_(exp_variant(k)),
          rate_(fast_ ? k.param1() / k.time_scale() : 0.0),
          jump_(fast_ ? k.value(0.0) : 0.0),
          cut_age_(k.support_bound(kHistoryEps)) {}

    void advance(double dt) {
        if (fast_) sum_ *= std::exp(-rate_ * dt);
    }

    void add_event(double t) {
        if (fast_)
            sum_ += jump_;
        else
            events_.push_back(t);
    }

    double value(double now) {
        if (fast_) return sum_;
        while (start_ < events_.size() && now - events_[start_] > cut_age_) ++start_;
        double s = 0.0;
        for (std::size_t i = start_; i < events_.size(); ++i)
            s += kern_.value(now - events_[i]);
        return s;
    }

  private:
    KernelSpec kern_;
    bool fast_;
    double rate_, jump_;
    double cut_age_;
    double sum_ = 0.0;
    std::vector<double> events_;
    std::size_t start_ = 0;
};

// C(t) = int_0^t k(t-s) lam(s) ds, advanced on the caller's micro-grid.
class CompensatorConv {
  public:
    explicit CompensatorConv(const KernelSpec& k)
        : kern_(k), fast_(exp_variant(k)), rate_(fast_ ? k.param1() / k.time_scale() : 0.0),
          k0_(fast_ ? k.value(0.0) : 0.0) {}

    double value() const { return value_; }

    // Left-rectangle extension to new_t, used as the predictor.
    double predict(double dt, double lam_prev, double new_t) const {
        if (fast_) return std::exp(-rate_ * dt) * value_ + dt * kern_.value(dt) * lam_prev;
        double acc = history_integral(new_t);
        return acc + dt * kern_.value(dt) * lam_prev;
    }

    // Trapezoid step with the corrected endpoint intensity.
    void commit(double dt, double lam_prev, double lam_new, double new_t) {
        if (fast_) {
            value_ = std::exp(-rate_ * dt) * value_ +
                     0.5 * dt * (kern_.value(dt) * lam_prev + k0_ * lam_new);
        } else {
            times_.push_back(new_t);
            lams_.push_back(lam_new);
            value_ = history_integral(new_t);
        }
    }

    void seed_sample(double t, double lam) {
        if (!fast_) {
            times_.push_back(t);
            lams_.push_back(lam);
        }
    }

  private:
    double history_integral(double now) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
            double a = now - times_[i], b = now - times_[i + 1];
            acc += 0.5 * (times_[i + 1] - times_[i]) *
                   (kern_.value(a) * lams_[i] + kern_.value(b) * lams_[i + 1]);
        }
        return acc;
    }

    KernelSpec kern_;
    bool fast_;
    double rate_, k0_;
    double value_ = 0.0;
    std::vector<double> times_, lams_;  // general-kernel sample history
};

}  // namespace

struct QHawkesState::Impl {
    MicroParams p;
    double t = 0.0;
    bool quad = false;
    double ck1 = 0.0, ck2 = 0.0;
    ExcitationSum phi1_buys, phi2_buys, phi1_sells, phi2_sells;
    ExcitationSum k_jumps1, k_jumps2;
    CompensatorConv comp1, comp2;
    double lam1 = 0.0, lam2 = 0.0;
    double Lam1 = 0.0, Lam2 = 0.0;

    explicit Impl(const MicroParams& params)
        : p(params),
          phi1_buys(params.phi1),
          phi2_buys(params.phi2),
          phi1_sells(params.phi1),
          phi2_sells(params.phi2),
          k_jumps1(params.k),
          k_jumps2(params.k),
          comp1(params.k),
          comp2(params.k) {
        quad = params.quad_active();
        ck1 = params.k1_coef();
        ck2 = params.k2_coef();
        lam1 = params.mu1;
        lam2 = params.mu2;
        comp1.seed_sample(0.0, lam1);
        comp2.seed_sample(0.0, lam2);
    }

    void squares(double c1v, double c2v, double now, double& q1, double& q2) {
        if (!quad) {
            q1 = q2 = 0.0;
            return;
        }
        double j1 = k_jumps1.value(now) - c1v;
        double j2 = k_jumps2.value(now) - c2v;
        double r1 = ck1 * j1 - ck2 * j2;
        double r2 = ck2 * j1 - ck1 * j2;
        q1 = r1 * r1;
        q2 = r2 * r2;
    }

    void advance(double dt) {
        if (!(dt >= 0.0)) throw StateError("QHawkesState: cannot move backwards");
        if (dt == 0.0) return;
        double now = t + dt;
        phi1_buys.advance(dt);
        phi2_buys.advance(dt);
        phi1_sells.advance(dt);
        phi2_sells.advance(dt);
        double lin1 = p.mu1 + phi1_buys.value(now) + phi2_sells.value(now);
        double lin2 = p.mu2 + phi2_buys.value(now) + phi1_sells.value(now);
        double new1 = lin1, new2 = lin2;
        if (quad) {
            k_jumps1.advance(dt);
            k_jumps2.advance(dt);
            // predictor with left-rectangle compensators, then one correction
            double c1p = comp1.predict(dt, lam1, now);
            double c2p = comp2.predict(dt, lam2, now);
            double q1, q2;
            squares(c1p, c2p, now, q1, q2);
            comp1.commit(dt, lam1, lin1 + q1, now);
            comp2.commit(dt, lam2, lin2 + q2, now);
            squares(comp1.value(), comp2.value(), now, q1, q2);
            new1 = lin1 + q1;
            new2 = lin2 + q2;
        }
        Lam1 += 0.5 * dt * (lam1 + new1);
        Lam2 += 0.5 * dt * (lam2 + new2);
        lam1 = new1;
        lam2 = new2;
        t = now;
    }

    void apply_event(int mark) {
        if (mark != 1 && mark != -1) throw ParameterError("apply_event: mark must be +-1");
        if (mark == 1) {
            phi1_buys.add_event(t);
            phi2_buys.add_event(t);
            if (quad) k_jumps1.add_event(t);
        } else {
            phi1_sells.add_event(t);
            phi2_sells.add_event(t);
            if (quad) k_jumps2.add_event(t);
        }
        double lin1 = p.mu1 + phi1_buys.value(t) + phi2_sells.value(t);
        double lin2 = p.mu2 + phi2_buys.value(t) + phi1_sells.value(t);
        double q1 = 0.0, q2 = 0.0;
        if (quad) squares(comp1.value(), comp2.value(), t, q1, q2);
        lam1 = lin1 + q1;
        lam2 = lin2 + q2;
    }
};

QHawkesState::QHawkesState(const MicroParams& params, double /*horizon*/)
    : impl_(std::make_unique<Impl>(params)) {
    params.validate();
    if (params.phi1.variant() == KernelVariant::ml_density ||
        params.phi2.variant() == KernelVariant::ml_density ||
        (params.quad_active() && params.k.variant() == KernelVariant::ml_density))
        throw ParameterError("QHawkesState: ml_density kernels are singular at age 0");
}

QHawkesState::~QHawkesState() = default;
QHawkesState::QHawkesState(QHawkesState&&) noexcept = default;

double QHawkesState::time() const { return impl_->t; }
double QHawkesState::lambda1() const { return impl_->lam1; }
double QHawkesState::lambda2() const { return impl_->lam2; }
double QHawkesState::Lambda1() const { return impl_->Lam1; }
double QHawkesState::Lambda2() const { return impl_->Lam2; }
void QHawkesState::advance(double dt) { impl_->advance(dt); }
void QHawkesState::apply_event(int mark) { impl_->apply_event(mark); }

SimResult simulate(const MicroParams& params, double horizon, std::uint64_t seed,
                   const SimConfig& cfg) {
    params.validate();
    if (!(horizon > 0.0)) throw ParameterError("simulate: horizon must be positive");

    double margin = 1.0 - params.stability_functional();
    if (margin <= 0.0 && !cfg.allow_unstable)
        throw PreconditionError("simulate: stability bound fails; set allow_unstable to force");

    const double h = cfg.micro_step > 0.0 ? cfg.micro_step : horizon / 1e5;
    const std::size_t pts = std::max<std::size_t>(cfg.sample_points, 2);
    const double gs = horizon / static_cast<double>(pts - 1);

    SimResult res;
    res.path.horizon = horizon;
    res.lambda1 = GridSeries::zeros(0.0, horizon, pts);
    res.lambda2 = GridSeries::zeros(0.0, horizon, pts);
    res.Lambda1 = GridSeries::zeros(0.0, horizon, pts);
    res.Lambda2 = GridSeries::zeros(0.0, horizon, pts);

    QHawkesState state(params, horizon);
    Rng rng(seed);

    auto record = [&](std::size_t idx) {
        res.lambda1[idx] = state.lambda1();
        res.lambda2[idx] = state.lambda2();
        res.Lambda1[idx] = state.Lambda1();
        res.Lambda2[idx] = state.Lambda2();
    };
    record(0);

    double t = 0.0;
    std::size_t sample_idx = 1;
    double next_refresh = h;
    double bound = cfg.safety * (state.lambda1() + state.lambda2());
    ++res.path.diag.bound_refreshes;

    while (t < horizon) {
        double next_sample = sample_idx < pts ? gs * static_cast<double>(sample_idx) : horizon;
        double next_stop = std::min({next_refresh, next_sample, horizon});

        double cand = bound > 0.0 ? t + rng.exponential(bound) : horizon + 1.0;
        if (cand >= next_stop) {
            state.advance(next_stop - t);
            t = next_stop;
            if (sample_idx < pts && next_stop == next_sample) {
                record(sample_idx);
                ++sample_idx;
            }
            if (next_stop == next_refresh || t >= horizon) {
                bound = cfg.safety * (state.lambda1() + state.lambda2());
                next_refresh = t + h;
                ++res.path.diag.bound_refreshes;
            }
            continue;
        }

        state.advance(cand - t);
        t = cand;
        ++res.path.diag.candidates;
        double l1 = state.lambda1();
        double l2 = state.lambda2();
        double total = l1 + l2;
        if (total > bound) {
            ++res.path.diag.bound_violations;
            bound = cfg.safety * total;
            next_refresh = t + h;
            ++res.path.diag.bound_refreshes;
        }
        double u = rng.uniform();
        if (u * bound <= total) {
            int mark = rng.uniform() * total < l1 ? 1 : -1;
            state.apply_event(mark);
            res.path.times.push_back(t);
            res.path.marks.push_back(mark);
            ++res.path.diag.accepted;
            if (res.path.diag.accepted > cfg.max_events)
                throw ExplosionError("simulate: event budget exceeded (runaway intensity)");
            bound = cfg.safety * (state.lambda1() + state.lambda2());
            next_refresh = t + h;
            ++res.path.diag.bound_refreshes;
            if (!(bound < 1e14))
                throw ExplosionError("simulate: dominating bound ran away");
        } else {
            ++res.path.diag.rejected;
        }
    }
    return res;
}

std::pair<GridSeries, GridSeries> compensator_path(const SimResult& res, double span,
                                                   std::size_t points) {
    if (span > res.path.horizon * (1.0 + 1e-12))
        throw RangeError("compensator_path: grid exceeds the simulated horizon");
    GridSeries L = GridSeries::zeros(0.0, span, points);
    GridSeries Lb = GridSeries::zeros(0.0, span, points);
    auto interp = [](const GridSeries& s, double tau) {
        auto idx = static_cast<std::size_t>(tau / s.dt());
        idx = std::min(idx, s.size() - 2);
        double w = (tau - s.time(idx)) / s.dt();
        return s[idx] + w * (s[idx + 1] - s[idx]);
    };
    for (std::size_t j = 0; j < points; ++j) {
        double tau = L.time(j);
        double a = interp(res.Lambda1, tau);
        double b = interp(res.Lambda2, tau);
        L[j] = a - b;
        Lb[j] = a + b;
    }
    return {std::move(L), std::move(Lb)};
}

ScaledPaths scaled_processes(const SimResult& res, const RescaledParams& scaling,
                             const KernelSpec& k_shape, std::size_t unit_points) {
    const double T = scaling.T;
    if (!(T > 0.0)) throw ParameterError("scaled_processes: scale T missing");
    if (T > res.path.horizon * (1.0 + 1e-12))
        throw ParameterError("scaled_processes: path horizon shorter than T");

    const double cs = scaling.count_scale();
    const double ms = scaling.martingale_scale();

    ScaledPaths out;
    out.X = GridSeries::zeros(0.0, 1.0, unit_points);
    out.Xbar = out.X;
    out.Mstar = out.X;
    out.Mbarstar = out.X;
    out.Zstar = out.X;
    out.Lambda = out.X;
    out.LambdaBar = out.X;

    auto interp = [](const GridSeries& s, double tau) {
        auto idx = static_cast<std::size_t>(tau / s.dt());
        idx = std::min(idx, s.size() - 2);
        double w = (tau - s.time(idx)) / s.dt();
        return s[idx] + w * (s[idx + 1] - s[idx]);
    };

    std::size_t ev = 0;
    long long n1 = 0, n2 = 0;
    for (std::size_t j = 0; j < unit_points; ++j) {
        double tau = out.X.time(j) * T;
        while (ev < res.path.times.size() && res.path.times[ev] <= tau) {
            (res.path.marks[ev] == 1 ? n1 : n2) += 1;
            ++ev;
        }
        double L1 = interp(res.Lambda1, tau);
        double L2 = interp(res.Lambda2, tau);
        double p = static_cast<double>(n1 - n2);
        double pb = static_cast<double>(n1 + n2);
        out.X[j] = cs * p;
        out.Xbar[j] = cs * pb;
        out.Mstar[j] = ms * (p - (L1 - L2));
        out.Mbarstar[j] = ms * (pb - (L1 + L2));
        out.Lambda[j] = cs * (L1 - L2);
        out.LambdaBar[j] = cs * (L1 + L2);
    }

    // Z* = k(0) M* + int k'(t-s) M* ds, trapezoid on the unit grid.
    double k0 = k_shape.value(0.0);
    double du = out.X.dt();
    for (std::size_t j = 0; j < unit_points; ++j) {
        double acc = k0 * out.Mstar[j];
        double tj = out.X.time(j);
        for (std::size_t i = 0; i < j; ++i) {
            double da = k_shape.derivative(tj - out.X.time(i)) * out.Mstar[i];
            double db = k_shape.derivative(tj - out.X.time(i + 1)) * out.Mstar[i + 1];
            acc += 0.5 * du * (da + db);
        }
        out.Zstar[j] = acc;
    }
    return out;
}

Rescaled rescale_params(const ShapeParams& shapes, const LimitParams& limit, double T) {
    limit.validate();
    if (!(T > 0.0)) throw ParameterError("rescale_params: T must be positive");

    Rescaled out;
    out.meta.T = T;
    out.meta.regime = limit.regime;
    out.micro.alpha1 = limit.alpha1;
    out.micro.alpha2 = limit.alpha2;

    double phi_l1 = shapes.phi.l1_norm();
    double k_l2 = shapes.k.is_zero() ? 0.0 : shapes.k.l2_norm_sq();

    if (limit.regime == Regime::stable) {
        double a = limit.beta_bar * phi_l1 + 0.5 * (limit.alpha1 + limit.alpha2) * k_l2;
        if (!(a > 0.0 && a < 1.0))
            throw ParameterError("rescale_params: stable-regime bound violated");
        out.meta.a_T = a;
        out.meta.beta_T = limit.beta;
        out.meta.beta_bar_T = limit.beta_bar;
        out.meta.mu_T = limit.mu;
        out.meta.mu_bar_T = limit.mu_bar;
        out.meta.k_amplitude = 1.0 / std::sqrt(T);
        out.micro.mu1 = 0.5 * (limit.mu_bar + limit.mu);
        out.micro.mu2 = 0.5 * (limit.mu_bar - limit.mu);
        out.micro.phi1 = shapes.phi.scaled(T, 0.5 * (limit.beta_bar + limit.beta) / T);
        out.micro.phi2 = shapes.phi.scaled(T, 0.5 * (limit.beta_bar - limit.beta) / T);
        out.micro.k = shapes.k.scaled(T, out.meta.k_amplitude);
        return out;
    }

    double K = tail_constant(shapes.phi, limit.alpha_tilde);
    double delta = K * std::tgamma(1.0 - limit.alpha_tilde) / limit.alpha_tilde;
    double one_minus_a = limit.sigma * delta * std::pow(T, -limit.alpha_tilde);
    if (!(one_minus_a > 0.0 && one_minus_a < 1.0))
        throw ParameterError("rescale_params: a^T outside (0,1); T too small for the regime");

    out.meta.tail_K = K;
    out.meta.delta = delta;
    out.meta.a_T = 1.0 - one_minus_a;
    out.meta.beta_T = 1.0 / (1.0 + limit.c1 * one_minus_a);
    out.meta.beta_bar_T = 1.0 / (1.0 + limit.c2 * one_minus_a);
    out.meta.mu_T = limit.mu_star / (delta * std::pow(T, 1.0 - limit.alpha_tilde));
    out.meta.mu_bar_T = limit.mu_bar_star / (delta * std::pow(T, 1.0 - limit.alpha_tilde));
    out.meta.k_amplitude = std::sqrt(one_minus_a / T);
    out.meta.a_T_residual =
        std::abs(out.meta.a_T - (out.meta.beta_bar_T * phi_l1 +
                                 0.5 * (limit.alpha1 + limit.alpha2) * one_minus_a * k_l2));

    out.micro.mu1 = 0.5 * (out.meta.mu_bar_T + out.meta.mu_T);
    out.micro.mu2 = 0.5 * (out.meta.mu_bar_T - out.meta.mu_T);
    // The linear kernel keeps its own time scale here: the heavy tail of phi
    // interacting with the growing horizon is what produces the fractional
    // limit kernel. Stretching phi with T (as in the stable regime) would
    // push its whole mass past the horizon for cutoff-type shapes and the
    // scaled system would degenerate to its baseline.
    out.micro.phi1 = shapes.phi.scaled(1.0, 0.5 * (out.meta.beta_bar_T + out.meta.beta_T));
    out.micro.phi2 = shapes.phi.scaled(1.0, 0.5 * (out.meta.beta_bar_T - out.meta.beta_T));
    out.micro.k = shapes.k.scaled(T, out.meta.k_amplitude);
    return out;
}

}  // namespace qhl
