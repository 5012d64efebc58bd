#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cellcast/genome.hpp"
#include "cellcast/rng.hpp"

namespace cellcast {

struct GAParams {
    int population = 1000;      // K
    int generations = 100;      // G
    double elite_rate = 0.02;
    double p_crossover = 0.5;   // probability of crossover vs mutation
    double phi = 40.0;          // selection pressure
    double weight_ratio = 5.0;  // W in the fitness weights
    int neighborhood_size = 20; // n: at most n-1 nonzero labels
    int candidate_size = 30;    // m: genome length m-1
    int max_groups = 15;        // u: labels range over 0..u
    std::uint64_t seed = 1;

    void validate() const;
};

// Linearly normalized selection weight for the k-th fittest of K, k = 1..K:
// phi down to 1. Selection probability is the weight over the rank sum.
double selection_weight(int rank, int population, double phi);

// Rank-proportional sampler over ranks 0..K-1 (0 = fittest).
class SelectionSampler {
public:
    SelectionSampler(int population, double phi);
    int draw(Rng& rng) const;

private:
    std::vector<double> cumulative_;
};

// Binary-mask crossover: child1 takes mask-0 positions from a and mask-1
// positions from b, child2 the complement. A child over the nonzero cap is
// repaired by zeroing randomly chosen nonzero labels.
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b,
                                    const std::vector<int>& mask,
                                    int neighborhood_size, Rng& rng);

// Replaces one uniformly chosen label by a uniform draw from 0..max_groups,
// then repairs the cap if needed.
Genome mutate(const Genome& genome, int max_groups, int neighborhood_size, Rng& rng);

struct ScoredGenome {
    Genome genome;
    double fitness = 0.0;
};

// One generational step; `ranked` must be sorted fittest-first (ties by
// genome order). Copies the elite, then fills the rest from selected
// parents via crossover or mutation.
std::vector<Genome> next_generation(const std::vector<ScoredGenome>& ranked,
                                    const GAParams& params, Rng& rng);

struct GAResult {
    int center = 0;
    std::vector<int> candidate_order;      // station indices behind genome positions
    std::vector<ScoredGenome> best;        // fittest distinct genomes ever seen, <= 5
    std::vector<double> best_history;      // best-ever fitness after each generation
};

GAResult run_ga(const SeriesGrid& grid, int center, const GAParams& params,
                const QuantizerSpec& quant);

} // namespace cellcast
