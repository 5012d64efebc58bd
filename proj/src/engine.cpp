#include "cellcast/engine.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "cellcast/genome.hpp"

namespace cellcast {

namespace {

void validate_models(const SeriesGrid& grid, const std::vector<CellModel>& models) {
    if (static_cast<int>(models.size()) != grid.station_count())
        throw std::runtime_error("models must cover every cell");
    for (int i = 0; i < grid.station_count(); ++i) {
        const auto& m = models[static_cast<std::size_t>(i)];
        if (m.center != i) throw std::runtime_error("model order does not match stations");
        if (m.specs.empty()) throw std::runtime_error("cell model has no neighborhood");
        for (const auto& s : m.specs) s.spec.validate(grid.station_count());
    }
}

// Lookup under one spec against a table rebuilt from the current values.
std::optional<State> attempt(const SeriesGrid& work, const QuantizerSpec& quant,
                             const NeighborhoodSpec& spec, int t, int t_max) {
    const auto key = compute_input(work, t - 1, spec, quant);
    if (!key) return std::nullopt;
    const auto row = build_table(work, spec, quant, t_max).lookup(*key);
    if (!row) return std::nullopt;
    return row->output;
}

// The fallback ladder for one position: the lower-ranked specs first, then
// every spec with its neighborhood diminished one cell per level until all
// of them are down to the self-only neighborhood. The primary spec at its
// full size is the caller's job.
std::optional<std::pair<State, std::string>> run_ladder(const SeriesGrid& work,
                                                        const QuantizerSpec& quant,
                                                        const CellModel& model, int t,
                                                        int t_max) {
    struct Rung {
        NeighborhoodSpec spec;
        int removals = 0;
        bool done = false;
    };
    std::vector<Rung> rungs;
    for (const auto& s : model.specs) rungs.push_back({s.spec, 0, false});

    for (std::size_t k = 1; k < rungs.size(); ++k)
        if (const auto s = attempt(work, quant, rungs[k].spec, t, t_max))
            return std::make_pair(*s, "spec" + std::to_string(k + 1));

    while (true) {
        bool diminished_any = false;
        for (std::size_t k = 0; k < rungs.size(); ++k) {
            auto& rung = rungs[k];
            if (rung.done) continue;
            if (rung.spec.self_only()) { // tried at an earlier level already
                rung.done = true;
                continue;
            }
            rung.spec = diminish_once(rung.spec, work, quant, t_max);
            ++rung.removals;
            diminished_any = true;
            if (const auto s = attempt(work, quant, rung.spec, t, t_max))
                return std::make_pair(*s, "spec" + std::to_string(k + 1) + "-minus" +
                                              std::to_string(rung.removals));
            if (rung.spec.self_only()) rung.done = true;
        }
        if (!diminished_any) return std::nullopt;
    }
}

class FillSession {
public:
    FillSession(const SeriesGrid& grid, const std::vector<CellModel>& models,
                const QuantizerSpec& quant)
        : original_(grid), work_(grid), quant_(quant), models_(models),
          p_(grid.station_count()), horizon_(grid.horizon()), states_(p_, horizon_),
          influences_(static_cast<std::size_t>(p_)) {}

    FillResult run() {
        validate_models(original_, models_);
        for (int j = 0; j < p_; ++j)
            for (const int member : primary(j).members())
                influences_[static_cast<std::size_t>(member)].push_back(j);

        recorded_.assign(static_cast<std::size_t>(p_),
                         std::vector<char>(static_cast<std::size_t>(horizon_) + 1, 0));
        for (int j = 0; j < p_; ++j) tables_.emplace_back(primary(j).arity());
        for (int t = 2; t <= horizon_; ++t)
            for (int j = 0; j < p_; ++j) try_record(j, t);
        stats_.examples_initial = total_examples();

        for (int i = 0; i < p_; ++i)
            for (int t = 1; t <= horizon_; ++t) {
                if (!original_.is_gap(i, t)) continue;
                if (t == 1)
                    report_[{i, t}] = {i, t, "unfilled", -1, "no prior instant"};
                else
                    open_.insert({i, t});
            }

        // primary pass
        for (int t = 2; t <= horizon_; ++t)
            for (int i = 0; i < p_; ++i)
                if (open_.count({i, t})) try_primary(i, t);

        // fallback ladder, repeated while it makes progress (a late fill can
        // make an earlier-skipped gap fillable at a later instant)
        bool progress = true;
        while (progress && !open_.empty()) {
            progress = false;
            std::vector<std::pair<int, int>> sweep(open_.begin(), open_.end());
            std::sort(sweep.begin(), sweep.end(), [](const auto& a, const auto& b) {
                return std::tie(a.second, a.first) < std::tie(b.second, b.first);
            });
            for (const auto& [i, t] : sweep) {
                if (!open_.count({i, t})) continue;
                if (try_primary(i, t)) {
                    progress = true;
                    continue;
                }
                if (const auto hit =
                        run_ladder(work_, quant_, models_[static_cast<std::size_t>(i)], t, -1)) {
                    apply_fill(i, t, hit->first, hit->second);
                    progress = true;
                }
            }
        }

        for (const auto& [i, t] : open_)
            report_[{i, t}] = {i, t, "unfilled", -1, "no applicable rule"};

        for (int i = 0; i < p_; ++i)
            for (int t = 1; t <= horizon_; ++t)
                if (const auto& v = original_.value(i, t))
                    states_.set(i, t, quantize(*v, 1, quant_));

        stats_.examples_final = total_examples();

        FillResult result{std::move(states_), {}, stats_};
        result.report.reserve(report_.size());
        for (auto& [key, row] : report_) result.report.push_back(std::move(row));
        return result;
    }

private:
    const NeighborhoodSpec& primary(int j) const {
        return models_[static_cast<std::size_t>(j)].specs.front().spec;
    }

    long total_examples() const {
        long n = 0;
        for (const auto& t : tables_) n += t.example_count();
        return n;
    }

    // Records the example with output at (j, t), once, if it is computable.
    void try_record(int j, int t) {
        if (t < 2 || t > horizon_) return;
        auto& flag = recorded_[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
        if (flag) return;
        const auto& out = work_.value(j, t);
        if (!out) return;
        const auto key = compute_input(work_, t - 1, primary(j), quant_);
        if (!key) return;
        tables_[static_cast<std::size_t>(j)].record(*key, quantize(*out, 1, quant_));
        flag = 1;
    }

    void apply_fill(int i, int t, State s, std::string strategy) {
        states_.set(i, t, s);
        work_.set_value(i, t, representative(s, 1, quant_));
        report_[{i, t}] = {i, t, "filled", s, std::move(strategy)};
        open_.erase({i, t});
        // revision: the new value may complete this cell's own example and
        // the next-instant examples of every cell it feeds into
        try_record(i, t);
        for (const int j : influences_[static_cast<std::size_t>(i)]) try_record(j, t + 1);
    }

    bool try_primary(int i, int t) {
        const auto key = compute_input(work_, t - 1, primary(i), quant_);
        if (!key) return false;
        const auto row = tables_[static_cast<std::size_t>(i)].lookup(*key);
        if (!row) return false;
        apply_fill(i, t, row->output, "spec1");
        return true;
    }

    const SeriesGrid& original_;
    SeriesGrid work_;
    const QuantizerSpec& quant_;
    const std::vector<CellModel>& models_;
    int p_;
    int horizon_;
    StateGrid states_;
    std::vector<std::vector<int>> influences_;
    std::vector<RuleTable> tables_;
    std::vector<std::vector<char>> recorded_;
    std::set<std::pair<int, int>> open_;
    std::map<std::pair<int, int>, ReportRow> report_;
    FillStats stats_;
};

} // namespace

FillResult fill_gaps(const SeriesGrid& grid, const std::vector<CellModel>& models,
                     const QuantizerSpec& quant) {
    return FillSession(grid, models, quant).run();
}

NeighborhoodSpec diminish_once(const NeighborhoodSpec& spec, const SeriesGrid& corpus,
                               const QuantizerSpec& quant, int t_max) {
    if (spec.self_only()) throw std::runtime_error("cannot diminish a self-only neighborhood");

    NeighborhoodSpec best;
    double best_score = -1.0;
    int best_station = std::numeric_limits<int>::max();
    for (std::size_t g = 0; g < spec.partition.size(); ++g) {
        for (std::size_t m = 0; m < spec.partition[g].size(); ++m) {
            NeighborhoodSpec reduced = spec;
            auto& group = reduced.partition[g];
            const int removed = group[m];
            group.erase(group.begin() + static_cast<std::ptrdiff_t>(m));
            if (group.empty())
                reduced.partition.erase(reduced.partition.begin() + static_cast<std::ptrdiff_t>(g));

            const double score = score_table(build_table(corpus, reduced, quant, t_max), 1.0);
            if (score > best_score || (score == best_score && removed < best_station)) {
                best = std::move(reduced);
                best_score = score;
                best_station = removed;
            }
        }
    }
    return best;
}

PredictResult predict(const SeriesGrid& grid, const std::vector<CellModel>& models,
                      const QuantizerSpec& quant) {
    validate_models(grid, models);
    const int p = grid.station_count();
    const int horizon = grid.horizon();
    for (int i = 0; i < p; ++i)
        if (grid.is_gap(i, 1)) throw std::runtime_error("initial instant incomplete");

    SeriesGrid work = grid;
    PredictResult result{StateGrid(p, horizon), {}};

    std::vector<RuleTable> tables;
    tables.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j)
        tables.emplace_back(models[static_cast<std::size_t>(j)].specs.front().spec.arity());

    std::vector<std::vector<std::pair<State, std::string>>> outcomes(
        static_cast<std::size_t>(p));

    for (int t = 2; t <= horizon; ++t) {
        if (t >= 3) {
            // examples with output at t-1 (actual, or the stored prediction
            // standing in for a gap) and input at t-2
            for (int j = 0; j < p; ++j) {
                const auto& spec = models[static_cast<std::size_t>(j)].specs.front().spec;
                const auto key = compute_input(work, t - 2, spec, quant);
                if (!key) throw std::logic_error("incomplete working values in prediction");
                tables[static_cast<std::size_t>(j)].record(
                    *key, quantize(*work.value(j, t - 1), 1, quant));
            }
        }

        for (int i = 0; i < p; ++i) {
            const auto& model = models[static_cast<std::size_t>(i)];
            const auto key = compute_input(work, t - 1, model.specs.front().spec, quant);
            if (!key) throw std::logic_error("incomplete working values in prediction");
            std::pair<State, std::string> out{0, "default"};
            if (const auto row = tables[static_cast<std::size_t>(i)].lookup(*key)) {
                out = {row->output, "spec1"};
            } else if (const auto hit = run_ladder(work, quant, model, t, t - 1)) {
                out = *hit;
            }
            result.predictions.set(i, t, out.first);
            outcomes[static_cast<std::size_t>(i)].push_back(std::move(out));
        }

        // predictions stand in for whatever this instant failed to measure
        for (int i = 0; i < p; ++i)
            if (grid.is_gap(i, t))
                work.set_value(i, t, representative(result.predictions.at(i, t), 1, quant));
    }

    for (int i = 0; i < p; ++i)
        for (int t = 2; t <= horizon; ++t) {
            const auto& [state, strategy] = outcomes[static_cast<std::size_t>(i)]
                                                    [static_cast<std::size_t>(t - 2)];
            result.report.push_back({i, t, "predicted", state, strategy});
        }
    return result;
}

} // namespace cellcast
