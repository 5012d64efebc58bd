#include "cellcast/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cellcast {

void GAParams::validate() const {
    if (population < 2) throw std::runtime_error("population must be at least 2");
    if (generations < 1) throw std::runtime_error("generations must be at least 1");
    if (elite_rate < 0.0 || elite_rate >= 1.0) throw std::runtime_error("elite rate must lie in [0,1)");
    if (p_crossover < 0.0 || p_crossover > 1.0)
        throw std::runtime_error("crossover probability must lie in [0,1]");
    if (phi < 1.0) throw std::runtime_error("selection pressure must be at least 1");
    if (weight_ratio < 1.0) throw std::runtime_error("weight ratio must be at least 1");
    if (neighborhood_size < 1 || neighborhood_size > candidate_size)
        throw std::runtime_error("neighborhood size must lie in [1, candidate size]");
    if (max_groups < 1) throw std::runtime_error("group bound must be at least 1");
}

double selection_weight(int rank, int population, double phi) {
    if (population < 2) throw std::runtime_error("population must be at least 2");
    if (rank < 1 || rank > population) throw std::runtime_error("rank out of range");
    return phi - (phi - 1.0) / static_cast<double>(population - 1) * static_cast<double>(rank - 1);
}

SelectionSampler::SelectionSampler(int population, double phi) {
    cumulative_.reserve(static_cast<std::size_t>(population));
    double total = 0.0;
    for (int k = 1; k <= population; ++k) {
        total += selection_weight(k, population, phi);
        cumulative_.push_back(total);
    }
}

int SelectionSampler::draw(Rng& rng) const {
    const double x = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<int>(std::min(idx, cumulative_.size() - 1));
}

namespace {

// Zeroes uniformly chosen nonzero labels until at most `cap` remain.
void repair_cap(Genome& g, int cap, Rng& rng) {
    std::vector<std::size_t> nonzero;
    for (std::size_t j = 0; j < g.labels.size(); ++j)
        if (g.labels[j] != 0) nonzero.push_back(j);
    while (static_cast<int>(nonzero.size()) > cap) {
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(nonzero.size()) - 1));
        g.labels[nonzero[pick]] = 0;
        nonzero.erase(nonzero.begin() + static_cast<std::ptrdiff_t>(pick));
    }
}

} // namespace

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b,
                                    const std::vector<int>& mask,
                                    int neighborhood_size, Rng& rng) {
    if (a.labels.size() != b.labels.size() || mask.size() != a.labels.size())
        throw std::runtime_error("crossover length mismatch");

    Genome c1 = a, c2 = b;
    for (std::size_t j = 0; j < mask.size(); ++j) {
        if (mask[j]) {
            c1.labels[j] = b.labels[j];
            c2.labels[j] = a.labels[j];
        }
    }
    repair_cap(c1, neighborhood_size - 1, rng);
    repair_cap(c2, neighborhood_size - 1, rng);
    return {std::move(c1), std::move(c2)};
}

Genome mutate(const Genome& genome, int max_groups, int neighborhood_size, Rng& rng) {
    Genome out = genome;
    if (out.labels.empty()) return out;
    const auto pos = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(out.labels.size()) - 1));
    out.labels[pos] = static_cast<int>(rng.uniform_int(0, max_groups));
    repair_cap(out, neighborhood_size - 1, rng);
    return out;
}

std::vector<Genome> next_generation(const std::vector<ScoredGenome>& ranked,
                                    const GAParams& params, Rng& rng) {
    const int population = static_cast<int>(ranked.size());
    if (population != params.population) throw std::runtime_error("population size mismatch");

    const int elite = static_cast<int>(
        std::ceil(params.elite_rate * static_cast<double>(population)));

    std::vector<Genome> next;
    next.reserve(static_cast<std::size_t>(population));
    for (int k = 0; k < elite && k < population; ++k)
        next.push_back(ranked[static_cast<std::size_t>(k)].genome);

    SelectionSampler sampler(population, params.phi);
    const auto parent = [&](int rank) -> const Genome& {
        return ranked[static_cast<std::size_t>(rank)].genome;
    };

    while (static_cast<int>(next.size()) < population) {
        if (rng.uniform() < params.p_crossover) {
            const Genome& pa = parent(sampler.draw(rng));
            const Genome& pb = parent(sampler.draw(rng));
            std::vector<int> mask(pa.labels.size());
            for (auto& bit : mask) bit = static_cast<int>(rng.uniform_int(0, 1));
            auto [c1, c2] = crossover(pa, pb, mask, params.neighborhood_size, rng);
            next.push_back(std::move(c1));
            if (static_cast<int>(next.size()) < population) next.push_back(std::move(c2));
            // a second child with no slot left is discarded
        } else {
            next.push_back(mutate(parent(sampler.draw(rng)), params.max_groups,
                                  params.neighborhood_size, rng));
        }
    }
    return next;
}

namespace {

void rank_population(std::vector<ScoredGenome>& scored) {
    std::sort(scored.begin(), scored.end(), [](const ScoredGenome& a, const ScoredGenome& b) {
        if (a.fitness != b.fitness) return a.fitness > b.fitness;
        return a.genome < b.genome;
    });
}

// Bounded best-ever set: fittest distinct genomes, ties by genome order.
void offer_best(std::vector<ScoredGenome>& best, const ScoredGenome& candidate,
                std::size_t limit) {
    for (const auto& kept : best)
        if (kept.genome == candidate.genome) return;
    auto pos = std::find_if(best.begin(), best.end(), [&](const ScoredGenome& kept) {
        if (kept.fitness != candidate.fitness) return kept.fitness < candidate.fitness;
        return candidate.genome < kept.genome;
    });
    best.insert(pos, candidate);
    if (best.size() > limit) best.pop_back();
}

} // namespace

GAResult run_ga(const SeriesGrid& grid, int center, const GAParams& params,
                const QuantizerSpec& quant) {
    params.validate();
    const auto candidates = nearest_candidates(grid, center, params.candidate_size);

    GAResult result;
    result.center = center;
    result.candidate_order.assign(candidates.begin() + 1, candidates.end());

    const auto length = static_cast<std::size_t>(params.candidate_size - 1);
    const int nonzero = params.neighborhood_size - 1;

    Rng rng(params.seed);
    std::vector<Genome> population;
    population.reserve(static_cast<std::size_t>(params.population));
    for (int k = 0; k < params.population; ++k) {
        Genome g;
        g.labels.assign(length, 0);
        const auto positions = rng.sample_indices(static_cast<int>(length), nonzero);
        for (const int pos : positions)
            g.labels[static_cast<std::size_t>(pos)] =
                static_cast<int>(rng.uniform_int(1, params.max_groups));
        population.push_back(std::move(g));
    }

    // fitness is a pure function of the genome; memoize across generations
    std::map<std::vector<int>, double> cache;
    const auto evaluate = [&](const Genome& g) {
        const auto it = cache.find(g.labels);
        if (it != cache.end()) return it->second;
        const double f =
            fitness(g, grid, result.candidate_order, center, quant, params.weight_ratio);
        cache.emplace(g.labels, f);
        return f;
    };

    for (int gen = 1; gen <= params.generations; ++gen) {
        std::vector<ScoredGenome> scored;
        scored.reserve(population.size());
        for (auto& g : population) scored.push_back({std::move(g), 0.0});
        for (auto& s : scored) s.fitness = evaluate(s.genome);

        rank_population(scored);
        for (const auto& s : scored) offer_best(result.best, s, 5);
        result.best_history.push_back(result.best.front().fitness);

        if (gen < params.generations) population = next_generation(scored, params, rng);
    }
    return result;
}

} // namespace cellcast
