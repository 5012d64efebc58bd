#pragma once

#include <vector>

#include "cellcast/output.hpp"
#include "cellcast/rule_table.hpp"

namespace cellcast {

struct ScoredSpec {
    NeighborhoodSpec spec;
    double fitness = 0.0;
};

// The up-to-5 fittest neighborhoods learned for one cell, best first.
struct CellModel {
    int center = 0;
    std::vector<ScoredSpec> specs;
};

struct FillStats {
    long examples_initial = 0; // recorded when the tables were first built
    long examples_final = 0;   // after all revisions; never smaller
};

struct FillResult {
    StateGrid states;             // observed entries quantized, gaps filled or -1
    std::vector<ReportRow> report; // one row per gap position, (station, t) order
    FillStats stats;
};

// Gap filling: builds the per-cell tables from the gap-bearing corpus,
// sweeps t upward filling gaps whose input at t-1 is defined, revising
// tables after every fill, then runs the fallback ladder (lower-ranked
// specs, then neighborhoods diminished one cell at a time) over whatever
// remains until no further gap can be filled. t=1 gaps always remain
// unfilled.
FillResult fill_gaps(const SeriesGrid& grid, const std::vector<CellModel>& models,
                     const QuantizerSpec& quant);

struct PredictResult {
    StateGrid predictions;         // states for t >= 2; t=1 has none
    std::vector<ReportRow> report; // one row per (station, t >= 2)
};

// One-step prediction: tables grow incrementally as t advances, with stored
// predictions standing in for gapped measurements; every cell receives a
// prediction at every t >= 2 (state 0 when no table row exists anywhere).
// Requires a complete first instant.
PredictResult predict(const SeriesGrid& grid, const std::vector<CellModel>& models,
                      const QuantizerSpec& quant);

// Removes the single cell whose removal keeps the unweighted score of the
// rebuilt table greatest (ties: smallest station index). Exposed for tests.
NeighborhoodSpec diminish_once(const NeighborhoodSpec& spec, const SeriesGrid& corpus,
                               const QuantizerSpec& quant, int t_max = -1);

} // namespace cellcast
