#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cellcast/quantizer.hpp"
#include "cellcast/series.hpp"

namespace cellcast {

// Rule input: the cell's own state followed by one discretized sum per
// neighbor group. Lexicographic order of the vector is the deterministic
// input order used for tie-breaks throughout.
using InputKey = std::vector<State>;

// A cell's neighborhood given as the partition of its non-center members
// into disjoint groups; each group contributes one sum component to the
// rule input. An empty partition is the self-only neighborhood.
struct NeighborhoodSpec {
    int center = 0;
    std::vector<std::vector<int>> partition;

    int arity() const { return 1 + static_cast<int>(partition.size()); }
    bool self_only() const { return partition.empty(); }
    int neighbor_count() const;
    std::vector<int> members() const; // center first, then groups in order
    void validate(int station_count) const;

    bool operator==(const NeighborhoodSpec&) const = default;
};

// Succinct update-rule representation: rows (input, output, count), keyed
// exactly by the (input, output) pair.
class RuleTable {
public:
    explicit RuleTable(int arity) : arity_(arity) {}

    struct Row {
        InputKey input;
        State output = 0;
        long count = 0;
    };

    int arity() const { return arity_; }
    bool empty() const { return rows_.empty(); }
    long example_count() const { return examples_; }
    std::size_t row_count() const;

    void record(const InputKey& input, State output);

    // Nearest row by component-wise Hamming distance; ties resolved by
    // greatest count, then smallest output, then lexicographically smallest
    // input. Empty table -> nullopt.
    std::optional<Row> lookup(const InputKey& query) const;

    // Distinct inputs in lexicographic order with their output->count maps.
    const std::map<InputKey, std::map<State, long>>& inputs() const { return rows_; }
    std::vector<Row> all_rows() const;

    // Debug dump: one `a|b|c;output;count` line per row, lexicographic order.
    std::string dump() const;
    static RuleTable parse(const std::string& text, int arity);

private:
    int arity_;
    long examples_ = 0;
    std::map<InputKey, std::map<State, long>> rows_;
};

// Rule input for the given cell from the per-station values at one instant;
// nullopt when any member of the neighborhood is a gap there. Sums are
// taken over the raw reals and only then discretized, at scale z = group
// size.
std::optional<InputKey> compute_input(const SeriesGrid& values, int t,
                                      const NeighborhoodSpec& spec, const QuantizerSpec& quant);

// One examples pass over the corpus: every instant t in 2..t_max whose
// center value is present and whose input at t-1 is defined contributes one
// count. t_max < 0 means the full horizon.
RuleTable build_table(const SeriesGrid& grid, const NeighborhoodSpec& spec,
                      const QuantizerSpec& quant, int t_max = -1);

} // namespace cellcast
