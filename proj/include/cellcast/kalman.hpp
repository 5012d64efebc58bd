#pragma once

#include <optional>
#include <vector>

#include "cellcast/output.hpp"

namespace cellcast {

// Scalar linear-Gaussian state space with identity observation:
//   x_t = a x_{t-1} + w_t,  w ~ N(0, q)
//   y_t = x_t + v_t,        v ~ N(0, r)
//   x_1 ~ N(mu0, v0)
struct StateSpaceModel {
    double a = 1.0;
    double q = 1.0;
    double r = 1.0;
    double mu0 = 0.0;
    double v0 = 1.0;

    void validate() const;
};

// One per-station series, 0-based: series[k] is the instant t = k+1.
using Series = std::vector<std::optional<double>>;

struct FilterResult {
    std::vector<double> pred_mean, pred_var; // one-step-ahead, index t: given y_1..y_{t-1}
    std::vector<double> filt_mean, filt_var; // given y_1..y_t
    std::vector<double> gain;                // 0 at gaps
    double loglik = 0.0;                     // over non-gap instants only
};

// Standard predict/update recursions; at a gap the update is skipped.
FilterResult kfilter(const Series& series, const StateSpaceModel& model);

struct SmoothResult {
    std::vector<double> mean, var;
    std::vector<double> lag1; // lag1[k] = Cov(x_k, x_{k-1} | all data), k >= 1; lag1[0] = 0
    double loglik = 0.0;      // of the filter pass at the same parameters
};

// Fixed-interval (RTS) smoother over the filter outputs.
SmoothResult ksmooth(const Series& series, const StateSpaceModel& model);

StateSpaceModel em_init(const Series& series);

// Exactly `iterations` EM steps (smoother E-step with lag-one covariances,
// closed-form M-step). The per-iteration log-likelihoods, evaluated at the
// entering parameters, can be captured via loglik_trace.
StateSpaceModel em_fit(const Series& series, int iterations = 10,
                       std::optional<StateSpaceModel> init = std::nullopt,
                       std::vector<double>* loglik_trace = nullptr);

struct BaselineResult {
    StateGrid states;
    std::vector<ReportRow> report;
};

// Per-station EM fit, then smoothed means at gap positions (fill) or
// one-step-ahead predictive means at every t >= 2 (predict), clamped to be
// nonnegative and cast into states. Stations with fewer than two non-gap
// observations are reported skipped.
BaselineResult kalman_fill(const SeriesGrid& grid, const QuantizerSpec& quant,
                           int iterations = 10);
BaselineResult kalman_predict(const SeriesGrid& grid, const QuantizerSpec& quant,
                              int iterations = 10);

} // namespace cellcast
