#pragma once

// Exact joint-Gaussian oracle for the scalar state-space model: builds the
// joint distribution of the states x_1..x_T explicitly and conditions on
// the observed y's by plain matrix algebra. Test-only; shares no code path
// with the recursive filter/smoother it checks.

#include <cmath>
#include <cstddef>
#include <vector>

#include "cellcast/kalman.hpp"

namespace cellcast::testing {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Mat oracle_mat(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

// Gauss-Jordan with partial pivoting; solves A X = B.
inline Mat oracle_solve(Mat a, Mat b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = 0; c < n; ++c) a[r][c] -= f * a[col][c];
            for (std::size_t c = 0; c < b[0].size(); ++c) b[r][c] -= f * b[col][c];
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < b[0].size(); ++c) b[r][c] /= a[r][r];
    return b;
}

struct OraclePosterior {
    Vec mean;
    Mat cov;
};

// Posterior of (x_1..x_T) given the observed entries among y_1..y_upto.
inline OraclePosterior oracle_condition(const Series& series, const StateSpaceModel& m,
                                        std::size_t upto) {
    const std::size_t n = series.size();

    Vec prior_mean(n);
    prior_mean[0] = m.mu0;
    for (std::size_t t = 1; t < n; ++t) prior_mean[t] = m.a * prior_mean[t - 1];
    Mat cov = oracle_mat(n, n);
    cov[0][0] = m.v0;
    for (std::size_t t = 1; t < n; ++t) cov[t][t] = m.a * m.a * cov[t - 1][t - 1] + m.q;
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t u = t + 1; u < n; ++u)
            cov[t][u] = cov[u][t] = std::pow(m.a, static_cast<double>(u - t)) * cov[t][t];

    std::vector<std::size_t> obs;
    for (std::size_t t = 0; t < upto; ++t)
        if (series[t]) obs.push_back(t);
    if (obs.empty()) return {prior_mean, cov};

    const std::size_t k = obs.size();
    Mat s = oracle_mat(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            s[i][j] = cov[obs[i]][obs[j]] + (i == j ? m.r : 0.0);
    Mat rhs = oracle_mat(k, n + 1);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t t = 0; t < n; ++t) rhs[i][t] = cov[obs[i]][t];
        rhs[i][n] = *series[obs[i]] - prior_mean[obs[i]];
    }
    const Mat sol = oracle_solve(s, rhs);

    OraclePosterior post{prior_mean, cov};
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t i = 0; i < k; ++i)
            post.mean[t] += cov[obs[i]][t] * sol[i][n];
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t i = 0; i < k; ++i)
                post.cov[t][u] -= cov[obs[i]][t] * sol[i][u];
    return post;
}

inline StateSpaceModel oracle_random_model(Rng& rng) {
    StateSpaceModel m;
    m.a = -1.2 + 2.4 * rng.uniform();
    m.q = 0.1 + rng.uniform() * 2.0;
    m.r = 0.1 + rng.uniform() * 2.0;
    m.mu0 = -2.0 + 4.0 * rng.uniform();
    m.v0 = 0.1 + rng.uniform() * 2.0;
    return m;
}

inline Series oracle_random_series(Rng& rng, const StateSpaceModel& m, int n, double gap_rate) {
    Series out;
    double x = m.mu0 + std::sqrt(m.v0) * rng.normal();
    for (int t = 0; t < n; ++t) {
        if (t) x = m.a * x + std::sqrt(m.q) * rng.normal();
        if (rng.bernoulli(gap_rate))
            out.push_back(std::nullopt);
        else
            out.push_back(x + std::sqrt(m.r) * rng.normal());
    }
    return out;
}

} // namespace cellcast::testing
