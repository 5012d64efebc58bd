#include "cellcast/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellcast {

namespace {

constexpr double kMinObsNoise = 1e-12; // keeps the filter defined on noiseless data
constexpr double kLogTwoPi = 1.8378770664093454836;

int count_observed(const Series& series) {
    int n = 0;
    for (const auto& y : series) n += y.has_value();
    return n;
}

} // namespace

void StateSpaceModel::validate() const {
    if (!(std::isfinite(a) && std::isfinite(q) && std::isfinite(r) && std::isfinite(mu0) &&
          std::isfinite(v0)))
        throw std::runtime_error("non-finite state-space parameter");
    if (q < 0.0 || r < 0.0 || v0 < 0.0) throw std::runtime_error("negative variance parameter");
    if (q == 0.0 && r == 0.0) throw std::runtime_error("state and observation noise both zero");
}

FilterResult kfilter(const Series& series, const StateSpaceModel& model) {
    model.validate();
    const std::size_t n = series.size();
    if (n == 0) throw std::runtime_error("empty series");

    FilterResult f;
    f.pred_mean.resize(n);
    f.pred_var.resize(n);
    f.filt_mean.resize(n);
    f.filt_var.resize(n);
    f.gain.assign(n, 0.0);

    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) {
            f.pred_mean[k] = model.mu0;
            f.pred_var[k] = model.v0;
        } else {
            f.pred_mean[k] = model.a * f.filt_mean[k - 1];
            f.pred_var[k] = model.a * model.a * f.filt_var[k - 1] + model.q;
        }

        if (series[k]) {
            const double y = *series[k];
            if (!std::isfinite(y)) throw std::runtime_error("non-finite observation");
            const double s = f.pred_var[k] + model.r;
            const double gain = s > 0.0 ? f.pred_var[k] / s : 0.0;
            f.gain[k] = gain;
            f.filt_mean[k] = f.pred_mean[k] + gain * (y - f.pred_mean[k]);
            f.filt_var[k] = (1.0 - gain) * f.pred_var[k];
            if (s > 0.0) {
                const double innov = y - f.pred_mean[k];
                f.loglik += -0.5 * (kLogTwoPi + std::log(s) + innov * innov / s);
            }
        } else {
            f.filt_mean[k] = f.pred_mean[k];
            f.filt_var[k] = f.pred_var[k];
        }
    }
    return f;
}

SmoothResult ksmooth(const Series& series, const StateSpaceModel& model) {
    const auto f = kfilter(series, model);
    const std::size_t n = series.size();

    SmoothResult s;
    s.loglik = f.loglik;
    s.mean = f.filt_mean;
    s.var = f.filt_var;
    s.lag1.assign(n, 0.0);
    if (n == 1) return s;

    // backward gains J_k = P_{k|k} a / P_{k+1|k}
    std::vector<double> J(n - 1, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k)
        J[k] = f.pred_var[k + 1] > 0.0 ? f.filt_var[k] * model.a / f.pred_var[k + 1] : 0.0;

    for (std::size_t k = n - 1; k-- > 0;) {
        s.mean[k] = f.filt_mean[k] + J[k] * (s.mean[k + 1] - f.pred_mean[k + 1]);
        s.var[k] = f.filt_var[k] + J[k] * J[k] * (s.var[k + 1] - f.pred_var[k + 1]);
    }

    // lag-one covariances for EM (Shumway-Stoffer form, gain 0 at gaps)
    s.lag1[n - 1] = (1.0 - f.gain[n - 1]) * model.a * f.filt_var[n - 2];
    for (std::size_t j = n - 2; j >= 1; --j)
        s.lag1[j] = f.filt_var[j] * J[j - 1] +
                    J[j] * (s.lag1[j + 1] - model.a * f.filt_var[j]) * J[j - 1];
    return s;
}

StateSpaceModel em_init(const Series& series) {
    StateSpaceModel m;
    m.a = 1.0;
    double first = 0.0;
    bool has_first = false;
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (const auto& y : series) {
        if (!y) continue;
        if (!has_first) {
            first = *y;
            has_first = true;
        }
        sum += *y;
        sum2 += *y * *y;
        ++n;
    }
    m.mu0 = first;
    double var = 1.0;
    if (n >= 2) {
        const double mean = sum / n;
        var = (sum2 - n * mean * mean) / (n - 1);
        if (!(var > 0.0)) var = 1.0;
    }
    m.v0 = m.q = m.r = var;
    return m;
}

StateSpaceModel em_fit(const Series& series, int iterations,
                       std::optional<StateSpaceModel> init, std::vector<double>* loglik_trace) {
    if (iterations < 0) throw std::runtime_error("negative iteration count");
    if (count_observed(series) < 2) throw std::runtime_error("insufficient observations");

    StateSpaceModel model = init ? *init : em_init(series);
    model.validate();
    if (loglik_trace) loglik_trace->clear();

    const std::size_t n = series.size();
    for (int iter = 0; iter < iterations; ++iter) {
        const auto sm = ksmooth(series, model);
        if (loglik_trace) loglik_trace->push_back(sm.loglik);

        double s11 = 0.0, s10 = 0.0, s00 = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            s11 += sm.var[k] + sm.mean[k] * sm.mean[k];
            s10 += sm.lag1[k] + sm.mean[k] * sm.mean[k - 1];
            s00 += sm.var[k - 1] + sm.mean[k - 1] * sm.mean[k - 1];
        }

        StateSpaceModel next = model;
        if (s00 > 0.0) next.a = s10 / s00;
        next.q = std::max(0.0, (s11 - 2.0 * next.a * s10 + next.a * next.a * s00) /
                                   static_cast<double>(n - 1));

        double rsum = 0.0;
        int robs = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!series[k]) continue;
            const double resid = *series[k] - sm.mean[k];
            rsum += resid * resid + sm.var[k];
            ++robs;
        }
        next.r = std::max(kMinObsNoise, rsum / static_cast<double>(robs));
        next.mu0 = sm.mean[0];
        next.v0 = std::max(0.0, sm.var[0]);
        model = next;
    }
    if (loglik_trace) loglik_trace->push_back(kfilter(series, model).loglik);
    return model;
}

namespace {

Series station_series(const SeriesGrid& grid, int station) {
    Series s(static_cast<std::size_t>(grid.horizon()));
    for (int t = 1; t <= grid.horizon(); ++t)
        s[static_cast<std::size_t>(t - 1)] = grid.value(station, t);
    return s;
}

State cast_state(double mean, const QuantizerSpec& quant) {
    return quantize(std::max(0.0, mean), 1, quant);
}

} // namespace

BaselineResult kalman_fill(const SeriesGrid& grid, const QuantizerSpec& quant, int iterations) {
    BaselineResult result{StateGrid(grid.station_count(), grid.horizon()), {}};
    for (int i = 0; i < grid.station_count(); ++i) {
        const auto series = station_series(grid, i);
        const bool usable = count_observed(series) >= 2;
        std::optional<SmoothResult> sm;
        if (usable) sm = ksmooth(series, em_fit(series, iterations));

        for (int t = 1; t <= grid.horizon(); ++t) {
            const auto& v = grid.value(i, t);
            if (v) {
                result.states.set(i, t, quantize(*v, 1, quant));
                continue;
            }
            if (sm) {
                const State s = cast_state(sm->mean[static_cast<std::size_t>(t - 1)], quant);
                result.states.set(i, t, s);
                result.report.push_back({i, t, "filled", s, "kalman"});
            } else {
                result.report.push_back({i, t, "skipped", -1, "insufficient data"});
            }
        }
    }
    return result;
}

BaselineResult kalman_predict(const SeriesGrid& grid, const QuantizerSpec& quant,
                              int iterations) {
    BaselineResult result{StateGrid(grid.station_count(), grid.horizon()), {}};
    for (int i = 0; i < grid.station_count(); ++i) {
        const auto series = station_series(grid, i);
        const bool usable = count_observed(series) >= 2;
        std::optional<FilterResult> f;
        if (usable) f = kfilter(series, em_fit(series, iterations));

        for (int t = 2; t <= grid.horizon(); ++t) {
            if (f) {
                const State s = cast_state(f->pred_mean[static_cast<std::size_t>(t - 1)], quant);
                result.states.set(i, t, s);
                result.report.push_back({i, t, "predicted", s, "kalman"});
            } else {
                result.report.push_back({i, t, "skipped", -1, "insufficient data"});
            }
        }
    }
    return result;
}

} // namespace cellcast
