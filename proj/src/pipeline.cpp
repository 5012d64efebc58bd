#include "cellcast/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <filesystem>
#include <iostream>
#include <thread>

#include "cellcast/engine.hpp"
#include "cellcast/kalman.hpp"
#include "cellcast/model_io.hpp"
#include "cellcast/output.hpp"
#include "csv_util.hpp"

namespace cellcast {

namespace fs = std::filesystem;

namespace {

// Fixed sub-seed streams off the master seed.
enum : std::uint64_t { kStreamGen = 1, kStreamGaps = 2, kStreamTrainBase = 100 };

} // namespace

std::vector<GAResult> train_cells(const SeriesGrid& grid, const GAParams& base,
                                  const QuantizerSpec& quant, std::uint64_t master_seed,
                                  int jobs, bool quiet) {
    const int p = grid.station_count();
    std::vector<GAResult> results(static_cast<std::size_t>(p));
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= p) return;
            try {
                GAParams params = base;
                params.seed =
                    mix_seed(master_seed, kStreamTrainBase + static_cast<std::uint64_t>(i));
                results[static_cast<std::size_t>(i)] = run_ga(grid, i, params, quant);
                if (!quiet)
                    std::cerr << "trained " << grid.station(i).id << " best fitness "
                              << results[static_cast<std::size_t>(i)].best.front().fitness
                              << '\n';
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(std::min(jobs, p)));
    for (int w = 0; w < std::min(jobs, p); ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

namespace {

void write_fitness_curves(const std::string& path, const SeriesGrid& grid,
                          const std::vector<GAResult>& results) {
    auto out = csvu::open_out(path);
    out << "station_id,generation,best_fitness\n";
    for (const auto& r : results)
        for (std::size_t g = 0; g < r.best_history.size(); ++g)
            out << grid.station(r.center).id << ',' << g + 1 << ','
                << csvu::format_value(r.best_history[g]) << '\n';
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir / "models");
    const auto at = [&](const char* name) { return (out_dir / name).string(); };
    const auto log = [&](const std::string& msg) {
        if (!config.quiet) std::cerr << msg << '\n';
    };

    // data + quantizer
    if (config.stations_path.empty() != config.series_path.empty())
        throw std::runtime_error("provide both --stations and --series, or neither");
    const bool planted = config.stations_path.empty();
    std::optional<SeriesGrid> full;
    std::optional<QuantizerSpec> quant;
    if (planted) {
        log("generating planted corpus");
        auto data = gen_planted(config.planted, mix_seed(config.seed, kStreamGen));
        quant = data.model.quant; // the generator's discretization is authoritative
        full = std::move(data.grid);
        write_stations_csv(at("stations.csv"), full->stations());
        write_series_csv(at("series.csv"), *full);
    } else {
        log("loading " + config.series_path);
        full = load_csv(config.stations_path, config.series_path);
    }

    log("inserting test gaps");
    auto insertion =
        insert_test_gaps(*full, config.gap_fraction, mix_seed(config.seed, kStreamGaps),
                         /*protect_first_instant=*/true);
    SeriesGrid& degraded = insertion.grid;
    if (!quant) quant = fit_range(degraded, config.num_states);
    for (auto& e : insertion.test_set) e.state = quantize(e.value, 1, *quant);
    write_series_csv(at("degraded.csv"), degraded);
    write_test_set_csv(at("testset.csv"), degraded, insertion.test_set);

    // per-cell training
    GAParams ga = config.ga;
    if (planted) {
        ga.candidate_size = std::min(ga.candidate_size, degraded.station_count());
        ga.neighborhood_size = std::min(ga.neighborhood_size, ga.candidate_size);
    }
    log("training " + std::to_string(degraded.station_count()) + " cells");
    const auto trained = train_cells(degraded, ga, *quant, config.seed, config.jobs, config.quiet);
    std::vector<CellModel> models;
    for (const auto& r : trained) {
        write_cell_model((out_dir / "models" / (degraded.station(r.center).id + ".json")).string(),
                         degraded, r);
        models.push_back(to_cell_model(r));
    }
    write_fitness_curves(at("ga_fitness.csv"), degraded, trained);

    // gap filling and prediction, learned rules vs per-series baseline
    log("filling gaps");
    const auto ca_fill = fill_gaps(degraded, models, *quant);
    write_output_series_csv(at("ca_filled.csv"), degraded, ca_fill.states, *quant, "filled",
                            "unfilled");
    write_report_csv(at("ca_fill_report.csv"), degraded, ca_fill.report);

    log("predicting");
    const auto ca_pred = predict(degraded, models, *quant);
    write_output_series_csv(at("ca_predicted.csv"), degraded, ca_pred.predictions, *quant,
                            "predicted", "unfilled", /*prefer_produced=*/true);
    write_report_csv(at("ca_predict_report.csv"), degraded, ca_pred.report);

    log("running baseline");
    const auto k_fill = kalman_fill(degraded, *quant, config.kalman_iterations);
    write_output_series_csv(at("kalman_filled.csv"), degraded, k_fill.states, *quant,
                            "kalman_filled", "skipped");
    write_report_csv(at("kalman_fill_report.csv"), degraded, k_fill.report);

    const auto k_pred = kalman_predict(degraded, *quant, config.kalman_iterations);
    write_output_series_csv(at("kalman_predicted.csv"), degraded, k_pred.states, *quant,
                            "kalman_predicted", "skipped", /*prefer_produced=*/true);
    write_report_csv(at("kalman_predict_report.csv"), degraded, k_pred.report);

    // paired evaluation
    PipelineResult result;
    result.ca_fill = evaluate(outcomes_from_report(ca_fill.report), insertion.test_set, *quant,
                              degraded);
    result.kalman_fill = evaluate(outcomes_from_report(k_fill.report), insertion.test_set, *quant,
                                  degraded);
    result.ca_predict = evaluate(outcomes_from_report(ca_pred.report), insertion.test_set, *quant,
                                 degraded);
    result.kalman_predict = evaluate(outcomes_from_report(k_pred.report), insertion.test_set,
                                     *quant, degraded);

    const auto fill_cmp = render_report("gap filling", "cellular automaton", result.ca_fill,
                                        "kalman smoothing", result.kalman_fill);
    const auto pred_cmp = render_report("value prediction", "cellular automaton",
                                        result.ca_predict, "kalman filtering",
                                        result.kalman_predict);
    result.report_text = fill_cmp.text + "\n" + pred_cmp.text;

    csvu::open_out(at("report.txt")) << result.report_text;
    csvu::open_out(at("eval_fill.csv")) << fill_cmp.csv;
    csvu::open_out(at("eval_predict.csv")) << pred_cmp.csv;
    log("wrote " + (out_dir / "report.txt").string());
    return result;
}

} // namespace cellcast
