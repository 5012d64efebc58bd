#include "cellcast/rule_table.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csv_util.hpp"

namespace cellcast {

int NeighborhoodSpec::neighbor_count() const {
    int n = 0;
    for (const auto& group : partition) n += static_cast<int>(group.size());
    return n;
}

std::vector<int> NeighborhoodSpec::members() const {
    std::vector<int> out{center};
    for (const auto& group : partition) out.insert(out.end(), group.begin(), group.end());
    return out;
}

void NeighborhoodSpec::validate(int station_count) const {
    if (center < 0 || center >= station_count)
        throw std::runtime_error("neighborhood center out of range");
    std::set<int> seen{center};
    for (const auto& group : partition) {
        if (group.empty()) throw std::runtime_error("empty partition group");
        for (const int j : group) {
            if (j < 0 || j >= station_count)
                throw std::runtime_error("neighborhood member out of range");
            if (!seen.insert(j).second)
                throw std::runtime_error("overlapping partition groups");
        }
    }
}

std::size_t RuleTable::row_count() const {
    std::size_t n = 0;
    for (const auto& [input, outputs] : rows_) n += outputs.size();
    return n;
}

void RuleTable::record(const InputKey& input, State output) {
    if (static_cast<int>(input.size()) != arity_) throw std::runtime_error("arity mismatch");
    ++rows_[input][output];
    ++examples_;
}

namespace {

int hamming(const InputKey& a, const InputKey& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

} // namespace

std::optional<RuleTable::Row> RuleTable::lookup(const InputKey& query) const {
    if (static_cast<int>(query.size()) != arity_) throw std::runtime_error("arity mismatch");
    if (rows_.empty()) return std::nullopt;

    const InputKey* best_input = nullptr;
    State best_output = 0;
    long best_count = 0;
    int best_dist = 0;
    for (const auto& [input, outputs] : rows_) {
        const int dist = hamming(query, input);
        for (const auto& [output, count] : outputs) {
            // order of preference: distance asc, count desc, output asc,
            // input lex asc (the map already yields inputs in lex order)
            bool better = false;
            if (!best_input) {
                better = true;
            } else if (dist != best_dist) {
                better = dist < best_dist;
            } else if (count != best_count) {
                better = count > best_count;
            } else if (output != best_output) {
                better = output < best_output;
            }
            if (better) {
                best_input = &input;
                best_output = output;
                best_count = count;
                best_dist = dist;
            }
        }
    }
    if (!best_input) return std::nullopt;
    return Row{*best_input, best_output, best_count};
}

std::vector<RuleTable::Row> RuleTable::all_rows() const {
    std::vector<Row> out;
    out.reserve(row_count());
    for (const auto& [input, outputs] : rows_)
        for (const auto& [output, count] : outputs) out.push_back({input, output, count});
    return out;
}

std::string RuleTable::dump() const {
    std::ostringstream out;
    for (const auto& row : all_rows()) {
        for (std::size_t i = 0; i < row.input.size(); ++i) {
            if (i) out << '|';
            out << row.input[i];
        }
        out << ';' << row.output << ';' << row.count << '\n';
    }
    return out.str();
}

RuleTable RuleTable::parse(const std::string& text, int arity) {
    RuleTable table(arity);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (csvu::trim(line).empty()) continue;
        const auto fields = csvu::split(line, ';');
        if (fields.size() != 3) throw std::runtime_error("bad table row: " + line);
        InputKey key;
        for (const auto& part : csvu::split(fields[0], '|'))
            key.push_back(static_cast<State>(csvu::parse_long(part, "state")));
        if (static_cast<int>(key.size()) != arity) throw std::runtime_error("arity mismatch");
        const State output = static_cast<State>(csvu::parse_long(fields[1], "state"));
        const long count = csvu::parse_long(fields[2], "count");
        if (count < 1) throw std::runtime_error("bad table count: " + fields[2]);
        table.rows_[key][output] += count;
        table.examples_ += count;
    }
    return table;
}

std::optional<InputKey> compute_input(const SeriesGrid& values, int t,
                                      const NeighborhoodSpec& spec, const QuantizerSpec& quant) {
    const auto& self = values.value(spec.center, t);
    if (!self) return std::nullopt;

    InputKey key;
    key.reserve(static_cast<std::size_t>(spec.arity()));
    key.push_back(quantize(*self, 1, quant));
    for (const auto& group : spec.partition) {
        double sum = 0.0;
        for (const int j : group) {
            const auto& v = values.value(j, t);
            if (!v) return std::nullopt;
            sum += *v;
        }
        key.push_back(quantize(sum, static_cast<int>(group.size()), quant));
    }
    return key;
}

RuleTable build_table(const SeriesGrid& grid, const NeighborhoodSpec& spec,
                      const QuantizerSpec& quant, int t_max) {
    const int last = t_max < 0 ? grid.horizon() : t_max;
    RuleTable table(spec.arity());
    for (int t = 2; t <= last; ++t) {
        const auto& out = grid.value(spec.center, t);
        if (!out) continue;
        const auto key = compute_input(grid, t - 1, spec, quant);
        if (!key) continue;
        table.record(*key, quantize(*out, 1, quant));
    }
    return table;
}

} // namespace cellcast
