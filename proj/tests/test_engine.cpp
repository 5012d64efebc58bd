#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "cellcast/engine.hpp"
#include "cellcast/planted.hpp"
#include "cellcast/rng.hpp"
#include "test_support.hpp"

using namespace cellcast;
using cellcast::testing::make_grid;

namespace {

std::vector<CellModel> true_models(const PlantedModel& model) {
    std::vector<CellModel> models;
    for (std::size_t i = 0; i < model.specs.size(); ++i)
        models.push_back({static_cast<int>(i), {{model.specs[i], 1.0}}});
    return models;
}

std::vector<CellModel> self_only_models(int stations) {
    std::vector<CellModel> models;
    for (int i = 0; i < stations; ++i) models.push_back({i, {{NeighborhoodSpec{i, {}}, 0.0}}});
    return models;
}

const ReportRow& row_at(const std::vector<ReportRow>& rows, int station, int t) {
    for (const auto& r : rows)
        if (r.station == station && r.t == t) return r;
    throw std::runtime_error("report row not found");
}

PlantedConfig small_config() {
    return PlantedConfig{.stations = 5, .horizon = 600, .num_states = 4, .base_range = 9.0,
                         .candidate_size = 5, .neighborhood_size = 3, .max_groups = 2,
                         .epsilon = 0.0, .zero_bias = 0.6};
}

} // namespace

TEST_CASE("fill recovers planted values whenever the primary input is defined") {
    const auto data = gen_planted(small_config(), 510);
    const auto degraded = insert_test_gaps(data.grid, 0.05, 77);
    const auto result = fill_gaps(degraded.grid, true_models(data.model), data.model.quant);

    int primary_fills = 0;
    for (const auto& r : result.report) {
        if (r.strategy != "spec1") continue;
        ++primary_fills;
        const State truth =
            data.clean_states[static_cast<std::size_t>(r.station)][static_cast<std::size_t>(r.t - 1)];
        CHECK(r.state == truth); // consistent tables reproduce the rule exactly
    }
    CHECK(primary_fills > 0);
}

TEST_CASE("fill never alters non-gap entries and reports exactly the gaps") {
    const auto data = gen_planted(small_config(), 502);
    const auto degraded = insert_test_gaps(data.grid, 0.08, 7);
    const auto result = fill_gaps(degraded.grid, true_models(data.model), data.model.quant);

    std::set<std::pair<int, int>> gaps;
    for (int i = 0; i < degraded.grid.station_count(); ++i)
        for (int t = 1; t <= degraded.grid.horizon(); ++t)
            if (degraded.grid.is_gap(i, t)) gaps.insert({i, t});

    std::set<std::pair<int, int>> reported;
    for (const auto& r : result.report) reported.insert({r.station, r.t});
    CHECK(reported == gaps);

    for (int i = 0; i < degraded.grid.station_count(); ++i)
        for (int t = 1; t <= degraded.grid.horizon(); ++t)
            if (!degraded.grid.is_gap(i, t))
                CHECK(result.states.at(i, t) ==
                      quantize(*degraded.grid.value(i, t), 1, data.model.quant));

    CHECK(result.stats.examples_final >= result.stats.examples_initial);
}

TEST_CASE("filling is deterministic given grid and models") {
    const auto data = gen_planted(small_config(), 504);
    const auto degraded = insert_test_gaps(data.grid, 0.1, 9);
    const auto a = fill_gaps(degraded.grid, true_models(data.model), data.model.quant);
    const auto b = fill_gaps(degraded.grid, true_models(data.model), data.model.quant);
    CHECK(a.states == b.states);
    REQUIRE(a.report.size() == b.report.size());
    for (std::size_t k = 0; k < a.report.size(); ++k) {
        CHECK(a.report[k].state == b.report[k].state);
        CHECK(a.report[k].strategy == b.report[k].strategy);
    }
}

TEST_CASE("gaps at the first instant stay unfilled") {
    auto grid = make_grid({{std::nullopt, 1.0, 2.0, 1.0}, {1.0, 1.0, 2.0, 1.0}});
    const QuantizerSpec quant(4, 3.0);
    const auto result = fill_gaps(grid, self_only_models(2), quant);
    const auto& row = row_at(result.report, 0, 1);
    CHECK(row.outcome == "unfilled");
    CHECK(row.strategy == "no prior instant");
}

TEST_CASE("a gap whose input matches a unique row takes that row's output") {
    // self-only rule on station 1: value 1 is always followed by 2
    auto grid = make_grid({{1.0, 2.0, 1.0, 2.0, 1.0, std::nullopt, 1.0, 2.0}});
    const QuantizerSpec quant(4, 3.0);
    const auto result = fill_gaps(grid, self_only_models(1), quant);
    const auto& row = row_at(result.report, 0, 6);
    CHECK(row.outcome == "filled");
    CHECK(row.state == 2);
    CHECK(row.strategy == "spec1");
}

TEST_CASE("fallback ladder: removing the gapped neighbor unblocks the fill") {
    // Stations A,B,C. A's rule is a function of B alone (A@t = B@t-1), but
    // its learned spec also includes C in a second group. C is observed only
    // at even instants, so C's own self-only table stays empty and its gaps
    // stay; A's gap at t=6 has an undefined primary input because C@5 is a
    // gap. Diminishing must drop C (the {{B}} table is perfectly consistent,
    // the {{C}} table is made contradictory) and then fill exactly.
    const QuantizerSpec quant(5, 4.0);
    std::vector<std::vector<std::optional<double>>> rows(3);
    rows[1] = {1.0, 2.0, 1.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0}; // B
    rows[0] = {1.0, 1.0, 2.0, 1.0, 3.0, std::nullopt, 2.0, 3.0, 1.0}; // A = B shifted
    // C at even t only; C@2 == C@4 makes the {{C}} examples contradictory
    rows[2] = {std::nullopt, 2.0, std::nullopt, 2.0, std::nullopt,
               1.0, std::nullopt, 3.0, std::nullopt};
    const auto grid = make_grid(rows);

    std::vector<CellModel> models{{0, {{NeighborhoodSpec{0, {{1}, {2}}}, 0.9}}},
                                  {1, {{NeighborhoodSpec{1, {}}, 0.5}}},
                                  {2, {{NeighborhoodSpec{2, {}}, 0.5}}}};

    // brute force over the two possible removals: dropping C keeps a
    // consistent table (unweighted score 1), dropping B does not
    const NeighborhoodSpec drop_c{0, {{1}}};
    const NeighborhoodSpec drop_b{0, {{2}}};
    CHECK(score_table(build_table(grid, drop_c, quant), 1.0) == 1.0);
    CHECK(score_table(build_table(grid, drop_b, quant), 1.0) < 1.0);
    CHECK(diminish_once(NeighborhoodSpec{0, {{1}, {2}}}, grid, quant) == drop_c);

    const auto result = fill_gaps(grid, models, quant);
    const auto& filled = row_at(result.report, 0, 6);
    CHECK(filled.outcome == "filled");
    CHECK(filled.state == 1); // B@5 = 1
    CHECK(filled.strategy == "spec1-minus1");

    // C's own gaps beyond t=1 are unfillable: self-only with an empty table
    for (int t : {3, 5, 7, 9}) {
        const auto& r = row_at(result.report, 2, t);
        CHECK(r.outcome == "unfilled");
        CHECK(r.strategy == "no applicable rule");
    }
}

TEST_CASE("a lower-ranked spec fills when the primary cannot") {
    // station 0 has two specs: the primary needs gapped station 2, the
    // second is self-only and works
    auto grid = make_grid({{1.0, 2.0, 1.0, 2.0, 1.0, std::nullopt, 1.0},
                           {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
                           {std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                            std::nullopt, std::nullopt, std::nullopt}});
    // station 2 is all gaps, which insert_test_gaps would reject but the
    // engine must handle
    const QuantizerSpec quant(4, 3.0);
    std::vector<CellModel> models{
        {0, {{NeighborhoodSpec{0, {{2}}}, 0.9}, {NeighborhoodSpec{0, {}}, 0.8}}},
        {1, {{NeighborhoodSpec{1, {}}, 0.5}}},
        {2, {{NeighborhoodSpec{2, {}}, 0.5}}}};
    const auto result = fill_gaps(grid, models, quant);
    const auto& filled = row_at(result.report, 0, 6);
    CHECK(filled.outcome == "filled");
    CHECK(filled.state == 2); // the self-only table says 1 -> 2
    CHECK(filled.strategy == "spec2");
}

TEST_CASE("the ladder cycles every spec at each diminishing level") {
    // A's two learned specs both touch stations that are gapped at t=5, so
    // level 0 fails for both. At level 1, spec1 ({C},{D}) stays blocked
    // whichever cell it drops, while spec2 ({B},{C}) must drop C (the {{B}}
    // table is consistent, the {{C}} one is contradictory) and then fills.
    const QuantizerSpec quant(5, 4.0);
    std::vector<std::vector<std::optional<double>>> rows(4);
    rows[1] = {1.0, 2.0, 1.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0};              // B complete
    rows[0] = {1.0, 1.0, 2.0, 1.0, 3.0, std::nullopt, 2.0, 3.0, 1.0};     // A = B shifted
    rows[2] = {std::nullopt, 2.0, std::nullopt, 2.0, std::nullopt,
               1.0, std::nullopt, 3.0, std::nullopt};                     // C: even t only
    rows[3] = {std::nullopt, 1.0, std::nullopt, 3.0, std::nullopt,
               2.0, std::nullopt, 1.0, std::nullopt};                     // D: even t only
    const auto grid = make_grid(rows);

    std::vector<CellModel> models{{0,
                                   {{NeighborhoodSpec{0, {{2}, {3}}}, 0.9},
                                    {NeighborhoodSpec{0, {{1}, {2}}}, 0.8}}},
                                  {1, {{NeighborhoodSpec{1, {}}, 0.5}}},
                                  {2, {{NeighborhoodSpec{2, {}}, 0.5}}},
                                  {3, {{NeighborhoodSpec{3, {}}, 0.5}}}};

    const auto result = fill_gaps(grid, models, quant);
    const auto& filled = row_at(result.report, 0, 6);
    CHECK(filled.outcome == "filled");
    CHECK(filled.state == 1); // B@5 = 1
    CHECK(filled.strategy == "spec2-minus1");
}

TEST_CASE("a fill unlocks examples that make a later gap fillable") {
    // A's only potential example is (input at t=4 -> output at t=5), but
    // B@4 starts out as a gap, so A's table is empty at build time. B@4 is
    // filled from B's own history during the primary pass; the revision must
    // record A's example right then, which is the only way the gap at A@7
    // can be filled by the primary spec.
    const QuantizerSpec quant(5, 4.0);
    std::vector<std::vector<std::optional<double>>> rows(2);
    rows[1] = {2.0, 1.0, 2.0, std::nullopt, 1.0, 2.0, 1.0, 2.0};  // B: alternating 2,1
    rows[0] = {1.0, std::nullopt, std::nullopt, 1.0, 3.0,
               std::nullopt, 1.0, std::nullopt};                  // A sparse, gap at t=8
    const auto grid = make_grid(rows);

    std::vector<CellModel> models{{0, {{NeighborhoodSpec{0, {{1}}}, 0.9}}},
                                  {1, {{NeighborhoodSpec{1, {}}, 0.5}}}};

    // before any fill, A has no computable example at all
    CHECK(build_table(grid, models[0].specs[0].spec, quant).empty());

    const auto result = fill_gaps(grid, models, quant);
    const auto& b4 = row_at(result.report, 1, 4);
    CHECK(b4.outcome == "filled");
    CHECK(b4.state == 1); // B's table: 2 -> 1

    // A@5 = 3 with input (A@4=1, B@4=1) is recorded once B@4 is filled, and
    // A@8 with input (A@7=1, B@7=1) then resolves through that row exactly
    const auto& a8 = row_at(result.report, 0, 8);
    CHECK(a8.outcome == "filled");
    CHECK(a8.state == 3);
    CHECK(a8.strategy == "spec1");
}

TEST_CASE("models must cover every cell, in station order, each nonempty") {
    auto grid = make_grid({{1.0, 2.0}, {2.0, 1.0}});
    const QuantizerSpec quant(4, 3.0);
    CHECK_THROWS(fill_gaps(grid, self_only_models(1), quant));
    auto swapped = self_only_models(2);
    std::swap(swapped[0], swapped[1]);
    CHECK_THROWS(fill_gaps(grid, swapped, quant));
    auto empty_spec = self_only_models(2);
    empty_spec[1].specs.clear();
    CHECK_THROWS(predict(grid, empty_spec, quant));
}

TEST_CASE("predict requires a complete first instant") {
    auto grid = make_grid({{std::nullopt, 1.0, 2.0}, {1.0, 1.0, 1.0}});
    const QuantizerSpec quant(4, 3.0);
    CHECK_THROWS_WITH(predict(grid, self_only_models(2), quant), "initial instant incomplete");
}

TEST_CASE("prediction with empty tables defaults to state 0") {
    auto grid = make_grid({{1.0, 2.0}, {2.0, 1.0}});
    const QuantizerSpec quant(4, 3.0);
    const auto result = predict(grid, self_only_models(2), quant);
    for (const auto& r : result.report) {
        CHECK(r.t == 2);
        CHECK(r.state == 0);
        CHECK(r.strategy == "default");
    }
}

TEST_CASE("predictions become exact once the input has been seen before") {
    const auto data = gen_planted(small_config(), 505);
    const auto& grid = data.grid;
    const auto models = true_models(data.model);
    const auto result = predict(grid, models, data.model.quant);

    // oracle: the rule-input key of every cell at every instant, derived
    // from the clean states alone
    const int horizon = grid.horizon();
    std::vector<std::map<InputKey, int>> seen(static_cast<std::size_t>(grid.station_count()));
    std::vector<std::vector<InputKey>> keys(static_cast<std::size_t>(grid.station_count()));
    for (int i = 0; i < grid.station_count(); ++i)
        for (int t = 1; t <= horizon; ++t)
            keys[static_cast<std::size_t>(i)].push_back(
                *compute_input(grid, t, data.model.specs[static_cast<std::size_t>(i)],
                               data.model.quant));

    int checked = 0;
    for (int i = 0; i < grid.station_count(); ++i) {
        auto& history = seen[static_cast<std::size_t>(i)];
        for (int t = 3; t <= horizon; ++t) {
            // examples available at step t cover inputs at 1..t-2
            ++history[keys[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - 3)]];
            if (history.count(keys[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - 2)])) {
                const State truth = data.clean_states[static_cast<std::size_t>(i)]
                                                     [static_cast<std::size_t>(t - 1)];
                CHECK(result.predictions.at(i, t) == truth);
                ++checked;
            }
        }
    }
    CHECK(checked > grid.station_count() * (horizon - 10)); // warm-up is short
}

TEST_CASE("a stored prediction stands in for a gapped measurement") {
    const auto data = gen_planted(small_config(), 506);
    SeriesGrid with_gap = data.grid;
    const int j = 2, tau = 150;
    with_gap.set_value(j, tau, std::nullopt);

    const auto models = true_models(data.model);
    const auto first = predict(with_gap, models, data.model.quant);

    // replacing the gap by the representative of its stored prediction
    // leaves every prediction identical
    SeriesGrid substituted = with_gap;
    substituted.set_value(j, tau,
                          representative(first.predictions.at(j, tau), 1, data.model.quant));
    const auto second = predict(substituted, models, data.model.quant);
    CHECK(first.predictions == second.predictions);
}

TEST_CASE("strict causality: later values never affect earlier predictions") {
    const auto data = gen_planted(small_config(), 507);
    const auto models = true_models(data.model);
    const auto base = predict(data.grid, models, data.model.quant);

    Rng rng(99);
    for (int trial = 0; trial < 4; ++trial) {
        const int tstar = static_cast<int>(rng.uniform_int(5, data.grid.horizon()));
        const int cell = static_cast<int>(rng.uniform_int(0, data.grid.station_count() - 1));
        SeriesGrid mutated = data.grid;
        mutated.set_value(cell, tstar,
                          representative(static_cast<State>(rng.uniform_int(0, 3)), 1,
                                         data.model.quant));
        const auto changed = predict(mutated, models, data.model.quant);
        for (int i = 0; i < data.grid.station_count(); ++i)
            for (int t = 2; t <= tstar; ++t)
                CHECK(changed.predictions.at(i, t) == base.predictions.at(i, t));
    }
}

TEST_CASE("every cell receives a prediction at every t >= 2") {
    const auto data = gen_planted(small_config(), 508);
    auto degraded = insert_test_gaps(data.grid, 0.1, 3, /*protect_first_instant=*/true);
    const auto result = predict(degraded.grid, true_models(data.model), data.model.quant);
    for (int i = 0; i < degraded.grid.station_count(); ++i)
        for (int t = 2; t <= degraded.grid.horizon(); ++t)
            CHECK(result.predictions.at(i, t) >= 0);
    CHECK(result.report.size() ==
          static_cast<std::size_t>(degraded.grid.station_count()) *
              static_cast<std::size_t>(degraded.grid.horizon() - 1));
}
