#include "cellcast/quantizer.hpp"

#include <cmath>

#include "cellcast/series.hpp"

namespace cellcast {

QuantizerSpec fit_range(const SeriesGrid& grid, int num_states, bool zero_special) {
    double max_value = 0.0;
    bool any = false;
    for (int i = 0; i < grid.station_count(); ++i) {
        for (int t = 1; t <= grid.horizon(); ++t) {
            const auto& v = grid.value(i, t);
            if (!v) continue;
            if (*v < 0.0) throw std::runtime_error("negative measurement");
            any = true;
            if (*v > max_value) max_value = *v;
        }
    }
    if (!any) throw std::runtime_error("empty corpus");
    if (max_value <= 0.0) max_value = 1.0; // all-zero corpus: keep the spec well defined
    return QuantizerSpec(num_states, max_value, zero_special);
}

State quantize(double v, int z, const QuantizerSpec& spec) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite value");
    if (v < 0.0) throw std::runtime_error("negative measurement");
    if (z < 1) throw std::invalid_argument("sum size must be at least 1");
    if (v == 0.0) return 0;

    const int top = spec.num_states - 1;
    if (spec.zero_special) {
        // nonzero states cover (0, z*R] with width z*R/(s-1), left-open
        const double scaled = v * static_cast<double>(top) / (static_cast<double>(z) * spec.base_range);
        long k = static_cast<long>(std::ceil(scaled));
        if (k < 1) k = 1;
        if (k > top) k = top;
        return static_cast<State>(k);
    }
    // all s states cover [0, z*R] with width z*R/s
    const double scaled = v * static_cast<double>(spec.num_states) /
                          (static_cast<double>(z) * spec.base_range);
    long k = static_cast<long>(std::ceil(scaled)) - 1;
    if (k < 0) k = 0;
    if (k > top) k = top;
    return static_cast<State>(k);
}

double representative(State k, int z, const QuantizerSpec& spec) {
    if (k < 0 || k >= spec.num_states) throw std::runtime_error("state out of range");
    if (z < 1) throw std::invalid_argument("sum size must be at least 1");
    if (spec.zero_special) {
        if (k == 0) return 0.0;
        return (static_cast<double>(k) - 0.5) * static_cast<double>(z) * spec.base_range /
               static_cast<double>(spec.num_states - 1);
    }
    return (static_cast<double>(k) + 0.5) * static_cast<double>(z) * spec.base_range /
           static_cast<double>(spec.num_states);
}

} // namespace cellcast
