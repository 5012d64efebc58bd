#pragma once

#include <stdexcept>

namespace cellcast {

class SeriesGrid;

// Discrete cell state. States are the integers 0..num_states-1; -1 is used
// by grids of results to mean "no state" (gap left unfilled, no prediction).
using State = int;

// Uniform discretization of nonnegative measurements into num_states
// intervals. With zero_special (the default), state 0 is reserved for an
// exact zero and the remaining states cover (0, R] with equal widths; a sum
// of z values is discretized over (0, z*R] instead. Values above the range
// clamp to the top state.
struct QuantizerSpec {
    int num_states = 10;
    double base_range = 1.0; // R
    bool zero_special = true;

    QuantizerSpec() = default;
    QuantizerSpec(int s, double range, bool zero_is_special = true)
        : num_states(s), base_range(range), zero_special(zero_is_special) {
        if (s < 2) throw std::invalid_argument("quantizer needs at least 2 states");
        if (!(range > 0.0)) throw std::invalid_argument("quantizer range must be positive");
    }
};

// Range fitted from the data: R = maximum non-gap value in the grid
// (1.0 when the grid is all zeros, so the spec stays well defined).
QuantizerSpec fit_range(const SeriesGrid& grid, int num_states = 10, bool zero_special = true);

// v -> state, where v is a sum of z individual values (z=1 for a single
// measurement). Nonzero intervals are left-open/right-closed.
State quantize(double v, int z, const QuantizerSpec& spec);

// state -> representative real at scale z: 0 for the zero state, the
// interval midpoint otherwise.
double representative(State k, int z, const QuantizerSpec& spec);

} // namespace cellcast
