#include "cellcast/genome.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cellcast {

int Genome::nonzero_count() const {
    return static_cast<int>(labels.size() -
                            static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 0)));
}

NeighborhoodSpec decode(const Genome& genome, const std::vector<int>& candidate_order, int center) {
    if (genome.labels.size() != candidate_order.size())
        throw std::runtime_error("genome length does not match candidate order");

    std::map<int, std::vector<int>> groups; // label -> stations, ascending label
    for (std::size_t j = 0; j < genome.labels.size(); ++j) {
        const int label = genome.labels[j];
        if (label < 0) throw std::runtime_error("negative genome label");
        if (label > 0) groups[label].push_back(candidate_order[j]);
    }

    NeighborhoodSpec spec;
    spec.center = center;
    for (auto& [label, stations] : groups) spec.partition.push_back(std::move(stations));
    return spec;
}

std::vector<double> rank_weights(const std::vector<long>& max_counts, double weight_ratio) {
    const std::size_t n = max_counts.size();
    if (n == 0) throw std::runtime_error("no counts to weight");
    if (weight_ratio < 1.0) throw std::runtime_error("weight ratio must be at least 1");

    std::vector<double> weights(n, weight_ratio);
    if (n == 1) return weights; // the singleton input gets the full weight

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return max_counts[a] < max_counts[b]; });

    // equal counts share the average of their tied ranks, so the score does
    // not depend on the order in which tied inputs happen to be listed
    const double step = (weight_ratio - 1.0) / static_cast<double>(n - 1);
    std::size_t rank = 0;
    while (rank < n) {
        std::size_t end = rank + 1;
        while (end < n && max_counts[order[end]] == max_counts[order[rank]]) ++end;
        const double mid = (static_cast<double>(rank) + static_cast<double>(end - 1)) / 2.0;
        for (std::size_t r = rank; r < end; ++r)
            weights[order[r]] = weight_ratio - step * mid;
        rank = end;
    }
    return weights;
}

double score_table(const RuleTable& table, double weight_ratio) {
    if (table.empty()) return 0.0;

    // (max count, total count) per distinct input, summed in a canonical
    // order so the score is bit-identical however the inputs are listed
    std::vector<std::pair<long, long>> rows;
    rows.reserve(table.inputs().size());
    for (const auto& [input, outputs] : table.inputs()) {
        long mx = 0, total = 0;
        for (const auto& [output, count] : outputs) {
            mx = std::max(mx, count);
            total += count;
        }
        rows.emplace_back(mx, total);
    }
    std::sort(rows.begin(), rows.end());

    std::vector<long> max_counts;
    for (const auto& [mx, total] : rows) max_counts.push_back(mx);
    const auto weights = rank_weights(max_counts, weight_ratio);

    double top = 0.0, z = 0.0;
    for (std::size_t l = 0; l < rows.size(); ++l) {
        top += weights[l] * static_cast<double>(rows[l].first);
        z += weights[l] * static_cast<double>(rows[l].second);
    }
    return top / z;
}

double fitness(const Genome& genome, const SeriesGrid& grid,
               const std::vector<int>& candidate_order, int center,
               const QuantizerSpec& quant, double weight_ratio) {
    const auto spec = decode(genome, candidate_order, center);
    return score_table(build_table(grid, spec, quant), weight_ratio);
}

} // namespace cellcast
