#pragma once

#include <string>

#include "cellcast/evaluate.hpp"
#include "cellcast/evolution.hpp"
#include "cellcast/planted.hpp"

namespace cellcast {

// End-to-end experiment: data (planted or loaded) -> artificial test gaps
// -> per-cell training -> gap filling and prediction by the learned rules
// and by the per-series Kalman baseline -> paired evaluation reports.
// Every artifact written under out_dir is byte-reproducible given the seed.
struct PipelineConfig {
    std::string stations_path; // both set -> load real data
    std::string series_path;
    PlantedConfig planted;     // otherwise generate

    double gap_fraction = 0.05;
    int num_states = 10;       // quantizer states for loaded data
    GAParams ga;               // per-cell seeds derive from the master seed
    int kalman_iterations = 10;
    std::uint64_t seed = 42;
    int jobs = 0;              // training concurrency; 0 = hardware
    std::string out_dir = "out";
    bool quiet = false;
};

struct PipelineResult {
    EvalReport ca_fill;
    EvalReport kalman_fill;
    EvalReport ca_predict;
    EvalReport kalman_predict;
    std::string report_text;
};

PipelineResult run_pipeline(const PipelineConfig& config);

// Trains every cell, up to `jobs` concurrently; deterministic regardless of
// scheduling because each cell's seed derives from the master seed alone.
std::vector<GAResult> train_cells(const SeriesGrid& grid, const GAParams& base,
                                  const QuantizerSpec& quant, std::uint64_t master_seed,
                                  int jobs, bool quiet);

} // namespace cellcast
