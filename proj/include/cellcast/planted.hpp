#pragma once

#include <cstdint>
#include <map>

#include "cellcast/genome.hpp"
#include "cellcast/series.hpp"

namespace cellcast {

// Synthetic ground truth: a lattice of stations with known neighborhoods
// and deterministic table-form rules, used to generate corpora on which
// recovery can be verified exactly.
struct PlantedConfig {
    int stations = 6;
    int horizon = 500;
    int num_states = 10;
    double base_range = 90.0;
    int candidate_size = 6;    // m: true neighbors drawn from the m nearest
    int neighborhood_size = 4; // n: true specs use n-1 neighbors
    int max_groups = 3;        // u: group labels drawn from 1..u
    double epsilon = 0.0;      // per-entry chance the observed state is randomized
    double zero_bias = 0.5;    // extra probability mass on state 0
    double coord_range = 100.0;

    void validate() const;
};

struct PlantedModel {
    std::vector<Station> stations;
    QuantizerSpec quant;
    std::vector<Genome> genomes;              // true genome per cell
    std::vector<std::vector<int>> candidates; // candidate order per cell
    std::vector<NeighborhoodSpec> specs;      // decoded true spec per cell
    std::vector<std::map<InputKey, State>> rules; // reachable inputs only
    std::vector<State> initial;               // states at t=1
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

struct PlantedData {
    SeriesGrid grid;   // observed reals (representatives, possibly noised)
    PlantedModel model;
    std::vector<std::vector<State>> clean_states; // [station][t-1], noise-free
};

// Random layout, specs and rules; the trajectory evolves from a random
// gap-free first instant, states become reals via their representatives,
// and with probability epsilon an emitted state is replaced by a uniform
// random one first. Rules are extended lazily as new inputs are reached.
// Deterministic given seed.
PlantedData gen_planted(const PlantedConfig& config, std::uint64_t seed);

// Replays the stored rules from the stored first instant; equals
// clean_states for the horizon the model was generated with.
std::vector<std::vector<State>> resimulate(const PlantedModel& model, int horizon);

} // namespace cellcast
