// cellcast: models correlated time series as one two-dimensional cellular
// automaton, learns each cell's update rule from examples, and uses the
// learned rules to fill gaps and predict upcoming values. A per-series
// Kalman smoother/filter serves as the comparison baseline.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cellcast/engine.hpp"
#include "cellcast/kalman.hpp"
#include "cellcast/model_io.hpp"
#include "cellcast/output.hpp"
#include "cellcast/pipeline.hpp"

namespace {

using namespace cellcast;

struct QuantFlags {
    int states = 10;
    double base_range = 0.0; // 0 = fit from the data
};

void add_quant_flags(CLI::App* cmd, QuantFlags& q) {
    cmd->add_option("--states", q.states, "Number of discretization states")
        ->capture_default_str();
    cmd->add_option("--base-range", q.base_range,
                    "Discretization range; 0 fits the observed maximum")
        ->capture_default_str();
}

QuantizerSpec make_quant(const QuantFlags& q, const SeriesGrid& grid) {
    if (q.base_range > 0.0) return QuantizerSpec(q.states, q.base_range);
    return fit_range(grid, q.states);
}

struct DataFlags {
    std::string stations;
    std::string series;
    int horizon = 0;
};

void add_data_flags(CLI::App* cmd, DataFlags& d) {
    cmd->add_option("--stations", d.stations, "Stations CSV (id,x,y)")->required();
    cmd->add_option("--series", d.series, "Series CSV (station_id,t,value)")->required();
    cmd->add_option("--horizon", d.horizon, "Declared horizon T (0 = infer from the file)");
}

void add_ga_flags(CLI::App* cmd, GAParams& ga) {
    cmd->add_option("--population", ga.population, "Individuals per generation")
        ->capture_default_str();
    cmd->add_option("--generations", ga.generations, "Number of generations")
        ->capture_default_str();
    cmd->add_option("--elite-rate", ga.elite_rate, "Fraction copied unchanged")
        ->capture_default_str();
    cmd->add_option("--p-crossover", ga.p_crossover, "Probability of crossover vs mutation")
        ->capture_default_str();
    cmd->add_option("--phi", ga.phi, "Selection pressure (largest/smallest weight)")
        ->capture_default_str();
    cmd->add_option("--weight-ratio", ga.weight_ratio, "Fitness weight ratio")
        ->capture_default_str();
    cmd->add_option("--neighborhood-size", ga.neighborhood_size, "Largest neighborhood size n")
        ->capture_default_str();
    cmd->add_option("--candidate-size", ga.candidate_size, "Candidate set size m")
        ->capture_default_str();
    cmd->add_option("--max-groups", ga.max_groups, "Largest partition label u")
        ->capture_default_str();
}

void add_planted_flags(CLI::App* cmd, PlantedConfig& pc) {
    cmd->add_option("--planted-stations", pc.stations, "Stations to generate")
        ->capture_default_str();
    cmd->add_option("--planted-horizon", pc.horizon, "Instants to generate")
        ->capture_default_str();
    cmd->add_option("--planted-states", pc.num_states, "States of the generator")
        ->capture_default_str();
    cmd->add_option("--planted-range", pc.base_range, "Range of the generator")
        ->capture_default_str();
    cmd->add_option("--planted-candidates", pc.candidate_size, "Candidate set size m")
        ->capture_default_str();
    cmd->add_option("--planted-neighbors", pc.neighborhood_size, "True neighborhood size n")
        ->capture_default_str();
    cmd->add_option("--planted-groups", pc.max_groups, "True partition label bound u")
        ->capture_default_str();
    cmd->add_option("--epsilon", pc.epsilon, "Observation noise rate")->capture_default_str();
    cmd->add_option("--zero-bias", pc.zero_bias, "Extra probability mass on state 0")
        ->capture_default_str();
}

// Every subcommand takes `--config file` with flat `key = value` lines and
// `#` comments; each key mirrors a long flag of that subcommand. The file is
// expanded into the argument list ahead of parsing, skipping keys the
// command line already provides, so the command line wins.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size())
            path = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0)
            path = args[k].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad config line (want key = value): " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("bad config line: " + line);
        if (key == "config") continue;

        const std::string flag = "--" + key;
        bool present = false;
        for (const auto& tok : args)
            if (tok == flag || tok.rfind(flag + "=", 0) == 0) present = true;
        if (!present) args.push_back(flag + "=" + value);
    }
    return args;
}

int run(int argc, char** argv) {
    CLI::App app{"correlated time series as a learned two-dimensional cellular automaton"};
    app.require_subcommand(1);

    std::string config_path; // consumed by expand_config before parsing
    const auto add_subcommand = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Config file (key = value, # comments)");
        return sub;
    };

    // ---- gen-data ----------------------------------------------------
    auto* gen = add_subcommand("gen-data", "Generate a synthetic corpus with known rules");
    PlantedConfig gen_cfg;
    std::uint64_t gen_seed = 1;
    std::string gen_stations_out = "stations.csv", gen_series_out = "series.csv";
    add_planted_flags(gen, gen_cfg);
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--stations-out", gen_stations_out, "Stations CSV to write")
        ->capture_default_str();
    gen->add_option("--series-out", gen_series_out, "Series CSV to write")
        ->capture_default_str();
    gen->callback([&] {
        const auto data = gen_planted(gen_cfg, gen_seed);
        write_stations_csv(gen_stations_out, data.grid.stations());
        write_series_csv(gen_series_out, data.grid);
    });

    // ---- insert-gaps -------------------------------------------------
    auto* gaps = add_subcommand("insert-gaps", "Turn random entries into test gaps");
    DataFlags gaps_data;
    QuantFlags gaps_quant;
    double gaps_fraction = 0.05;
    std::uint64_t gaps_seed = 1;
    bool gaps_protect = false;
    std::string gaps_series_out = "degraded.csv", gaps_test_out = "testset.csv";
    add_data_flags(gaps, gaps_data);
    add_quant_flags(gaps, gaps_quant);
    gaps->add_option("--fraction", gaps_fraction, "Fraction of non-gap entries per station")
        ->capture_default_str();
    gaps->add_option("--seed", gaps_seed, "Random seed")->capture_default_str();
    gaps->add_flag("--protect-first-instant", gaps_protect,
                   "Never gap t=1 (prediction needs a complete first instant)");
    gaps->add_option("--series-out", gaps_series_out, "Degraded series CSV to write")
        ->capture_default_str();
    gaps->add_option("--testset-out", gaps_test_out, "Test set CSV to write")
        ->capture_default_str();
    gaps->callback([&] {
        const auto grid = load_csv(gaps_data.stations, gaps_data.series, gaps_data.horizon);
        auto insertion = insert_test_gaps(grid, gaps_fraction, gaps_seed, gaps_protect);
        const auto quant = make_quant(gaps_quant, insertion.grid);
        for (auto& e : insertion.test_set) e.state = quantize(e.value, 1, quant);
        write_series_csv(gaps_series_out, insertion.grid);
        write_test_set_csv(gaps_test_out, insertion.grid, insertion.test_set);
    });

    // ---- train ---------------------------------------------------------
    auto* train = add_subcommand("train", "Learn neighborhoods and partitions per cell");
    DataFlags train_data;
    QuantFlags train_quant;
    GAParams train_ga;
    std::uint64_t train_seed = 1;
    int train_jobs = 0;
    std::string train_out = "models", train_curve;
    add_data_flags(train, train_data);
    add_quant_flags(train, train_quant);
    add_ga_flags(train, train_ga);
    train->add_option("--seed", train_seed, "Master seed (per-cell seeds derive from it)")
        ->capture_default_str();
    train->add_option("--jobs", train_jobs, "Concurrent cell trainings (0 = hardware)")
        ->capture_default_str();
    train->add_option("--out-dir", train_out, "Directory for per-cell model files")
        ->capture_default_str();
    train->add_option("--fitness-curve", train_curve, "Optional per-generation fitness CSV");
    train->callback([&] {
        const auto grid = load_csv(train_data.stations, train_data.series, train_data.horizon);
        const auto quant = make_quant(train_quant, grid);
        std::filesystem::create_directories(train_out);
        const auto results = train_cells(grid, train_ga, quant, train_seed, train_jobs, false);
        for (const auto& r : results)
            write_cell_model((std::filesystem::path(train_out) /
                              (grid.station(r.center).id + ".json")).string(),
                             grid, r);
        if (!train_curve.empty()) {
            std::ofstream out(train_curve);
            out << "station_id,generation,best_fitness\n";
            for (const auto& r : results)
                for (std::size_t g = 0; g < r.best_history.size(); ++g)
                    out << grid.station(r.center).id << ',' << g + 1 << ','
                        << r.best_history[g] << '\n';
        }
    });

    // ---- fill / predict -------------------------------------------------
    struct EngineFlags {
        DataFlags data;
        QuantFlags quant;
        std::string models = "models";
        std::string series_out;
        std::string report_out;
    };
    const auto add_engine_cmd = [&](const char* name, const char* help, bool filling) {
        auto* cmd = add_subcommand(name, help);
        auto flags = std::make_shared<EngineFlags>();
        flags->series_out = filling ? "filled.csv" : "predicted.csv";
        flags->report_out = filling ? "fill_report.csv" : "predict_report.csv";
        add_data_flags(cmd, flags->data);
        add_quant_flags(cmd, flags->quant);
        cmd->add_option("--models", flags->models, "Directory of per-cell model files")
            ->capture_default_str();
        cmd->add_option("--series-out", flags->series_out, "Output series CSV")
            ->capture_default_str();
        cmd->add_option("--report-out", flags->report_out, "Outcome report CSV")
            ->capture_default_str();
        cmd->callback([flags, filling] {
            const auto grid =
                load_csv(flags->data.stations, flags->data.series, flags->data.horizon);
            const auto quant = make_quant(flags->quant, grid);
            const auto models = load_models_dir(flags->models, grid);
            if (filling) {
                const auto result = fill_gaps(grid, models, quant);
                write_output_series_csv(flags->series_out, grid, result.states, quant, "filled",
                                        "unfilled");
                write_report_csv(flags->report_out, grid, result.report);
            } else {
                const auto result = predict(grid, models, quant);
                write_output_series_csv(flags->series_out, grid, result.predictions, quant,
                                        "predicted", "unfilled", true);
                write_report_csv(flags->report_out, grid, result.report);
            }
        });
    };
    add_engine_cmd("fill", "Fill gaps with the learned rules", true);
    add_engine_cmd("predict", "One-step predictions with the learned rules", false);

    // ---- kalman-fill / kalman-predict ------------------------------------
    const auto add_kalman_cmd = [&](const char* name, const char* help, bool filling) {
        auto* cmd = add_subcommand(name, help);
        auto flags = std::make_shared<EngineFlags>();
        auto iterations = std::make_shared<int>(10);
        flags->series_out = filling ? "kalman_filled.csv" : "kalman_predicted.csv";
        flags->report_out = filling ? "kalman_fill_report.csv" : "kalman_predict_report.csv";
        add_data_flags(cmd, flags->data);
        add_quant_flags(cmd, flags->quant);
        cmd->add_option("--iterations", *iterations, "EM iterations")->capture_default_str();
        cmd->add_option("--series-out", flags->series_out, "Output series CSV")
            ->capture_default_str();
        cmd->add_option("--report-out", flags->report_out, "Outcome report CSV")
            ->capture_default_str();
        cmd->callback([flags, iterations, filling] {
            const auto grid =
                load_csv(flags->data.stations, flags->data.series, flags->data.horizon);
            const auto quant = make_quant(flags->quant, grid);
            const auto result = filling ? kalman_fill(grid, quant, *iterations)
                                        : kalman_predict(grid, quant, *iterations);
            write_output_series_csv(flags->series_out, grid, result.states, quant,
                                    filling ? "kalman_filled" : "kalman_predicted", "skipped",
                                    !filling);
            write_report_csv(flags->report_out, grid, result.report);
        });
    };
    add_kalman_cmd("kalman-fill", "Fill gaps with per-series Kalman smoothing", true);
    add_kalman_cmd("kalman-predict", "One-step predictions with per-series Kalman filtering",
                   false);

    // ---- evaluate -------------------------------------------------------
    auto* eval = add_subcommand("evaluate", "Hit ratios of a report against a test set");
    DataFlags eval_data;
    QuantFlags eval_quant;
    std::string eval_report, eval_test, eval_out = "eval.csv", eval_method = "method";
    add_data_flags(eval, eval_data);
    add_quant_flags(eval, eval_quant);
    eval->add_option("--report", eval_report, "Outcome report CSV")->required();
    eval->add_option("--testset", eval_test, "Test set CSV")->required();
    eval->add_option("--method", eval_method, "Method label for the output")
        ->capture_default_str();
    eval->add_option("--out", eval_out, "Evaluation CSV to write")->capture_default_str();
    eval->callback([&] {
        const auto grid = load_csv(eval_data.stations, eval_data.series, eval_data.horizon);
        const auto quant = make_quant(eval_quant, grid);
        const auto rows = load_report_csv(eval_report, grid);
        const auto test = load_test_set_csv(eval_test, grid);
        const auto report = evaluate(outcomes_from_report(rows), test, quant, grid);
        write_eval_csv(eval_out, eval_method, report);
        std::cout << "overall hit ratio: " << report.ratio() << " (" << report.hits << '/'
                  << report.count << ")\n";
    });

    // ---- report -----------------------------------------------------------
    auto* rep = add_subcommand("report", "Side-by-side table of two evaluations");
    DataFlags rep_data;
    QuantFlags rep_quant;
    std::string rep_a, rep_b, rep_test, rep_name_a = "cellular automaton",
                                        rep_name_b = "kalman", rep_title = "comparison",
                                        rep_out;
    add_data_flags(rep, rep_data);
    add_quant_flags(rep, rep_quant);
    rep->add_option("--report-a", rep_a, "First outcome report CSV")->required();
    rep->add_option("--report-b", rep_b, "Second outcome report CSV")->required();
    rep->add_option("--testset", rep_test, "Test set CSV")->required();
    rep->add_option("--name-a", rep_name_a, "Label of the first method")->capture_default_str();
    rep->add_option("--name-b", rep_name_b, "Label of the second method")->capture_default_str();
    rep->add_option("--title", rep_title, "Table title")->capture_default_str();
    rep->add_option("--out", rep_out, "Also write the table to this file");
    rep->callback([&] {
        const auto grid = load_csv(rep_data.stations, rep_data.series, rep_data.horizon);
        const auto quant = make_quant(rep_quant, grid);
        const auto test = load_test_set_csv(rep_test, grid);
        const auto eval_a = evaluate(
            outcomes_from_report(load_report_csv(rep_a, grid)), test, quant, grid);
        const auto eval_b = evaluate(
            outcomes_from_report(load_report_csv(rep_b, grid)), test, quant, grid);
        const auto cmp = render_report(rep_title, rep_name_a, eval_a, rep_name_b, eval_b);
        std::cout << cmp.text;
        if (!rep_out.empty()) {
            std::ofstream out(rep_out);
            out << cmp.text;
        }
    });

    // ---- pipeline -----------------------------------------------------------
    auto* pipe = add_subcommand("pipeline", "Full experiment end to end");
    PipelineConfig pc;
    pipe->add_option("--stations", pc.stations_path, "Stations CSV (omit to generate data)");
    pipe->add_option("--series", pc.series_path, "Series CSV (omit to generate data)");
    add_planted_flags(pipe, pc.planted);
    add_ga_flags(pipe, pc.ga);
    pipe->add_option("--gap-fraction", pc.gap_fraction, "Artificial gap fraction")
        ->capture_default_str();
    pipe->add_option("--states", pc.num_states, "Quantizer states for loaded data")
        ->capture_default_str();
    pipe->add_option("--iterations", pc.kalman_iterations, "Kalman EM iterations")
        ->capture_default_str();
    pipe->add_option("--seed", pc.seed, "Master seed")->capture_default_str();
    pipe->add_option("--jobs", pc.jobs, "Concurrent cell trainings (0 = hardware)")
        ->capture_default_str();
    pipe->add_option("--out", pc.out_dir, "Output directory")->capture_default_str();
    pipe->add_flag("--quiet", pc.quiet, "Suppress progress messages");
    pipe->callback([&] {
        const auto result = run_pipeline(pc);
        std::cout << result.report_text;
    });

    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
