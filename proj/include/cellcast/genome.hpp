#pragma once

#include <compare>
#include <vector>

#include "cellcast/rule_table.hpp"

namespace cellcast {

// Fixed-length integer-label encoding of a neighborhood and its partition
// over a candidate set: position j refers to the j-th candidate, label 0
// means "not a neighbor", equal nonzero labels put candidates in the same
// group.
struct Genome {
    std::vector<int> labels;

    int nonzero_count() const;
    auto operator<=>(const Genome&) const = default;
};

// candidate_order lists the station indices the genome positions refer to
// (the candidate set minus the center, in its fixed order). Groups are
// emitted in ascending label order.
NeighborhoodSpec decode(const Genome& genome, const std::vector<int>& candidate_order, int center);

// Linear rank weights for the distinct-input max counts, aligned with the
// input list: the least count gets weight_ratio, the greatest gets 1,
// linear in between. Tied counts share the average of their tied ranks (so
// the score cannot depend on listing order); a single input gets
// weight_ratio.
std::vector<double> rank_weights(const std::vector<long>& max_counts, double weight_ratio);

// Consistency score in [0, 1]: the weighted sum of per-input max counts
// over the weighted sum of all counts. Empty table -> 0. Equals 1 exactly
// when every distinct input has a single output.
double score_table(const RuleTable& table, double weight_ratio);

double fitness(const Genome& genome, const SeriesGrid& grid,
               const std::vector<int>& candidate_order, int center,
               const QuantizerSpec& quant, double weight_ratio);

} // namespace cellcast
