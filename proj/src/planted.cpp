#include "cellcast/planted.hpp"

#include <stdexcept>

#include "cellcast/rng.hpp"

namespace cellcast {

void PlantedConfig::validate() const {
    if (stations < 1) throw std::runtime_error("need at least one station");
    if (horizon < 2) throw std::runtime_error("horizon must be at least 2");
    if (num_states < 2) throw std::runtime_error("need at least 2 states");
    if (!(base_range > 0.0)) throw std::runtime_error("range must be positive");
    if (candidate_size < 1 || candidate_size > stations)
        throw std::runtime_error("candidate size out of range");
    if (neighborhood_size < 1 || neighborhood_size > candidate_size)
        throw std::runtime_error("neighborhood size out of range");
    if (max_groups < 1) throw std::runtime_error("group bound must be at least 1");
    if (epsilon < 0.0 || epsilon >= 1.0) throw std::runtime_error("noise rate must lie in [0,1)");
    if (zero_bias < 0.0 || zero_bias >= 1.0) throw std::runtime_error("zero bias must lie in [0,1)");
    if (!(coord_range > 0.0)) throw std::runtime_error("coordinate range must be positive");
}

namespace {

State draw_state(Rng& rng, int num_states, double zero_bias) {
    if (rng.bernoulli(zero_bias)) return 0;
    return static_cast<State>(rng.uniform_int(0, num_states - 1));
}

// One synchronous step on the real-valued proxy grid; extends the rule map
// at inputs it has not seen. `reals` must hold instants 1..t-1.
State step_cell(const PlantedModel& model, const SeriesGrid& reals, int cell, int t, Rng* rng,
                double zero_bias, std::map<InputKey, State>& rule) {
    const auto key = compute_input(reals, t - 1, model.specs[static_cast<std::size_t>(cell)],
                                   model.quant);
    if (!key) throw std::runtime_error("planted trajectory hit a gap");
    const auto it = rule.find(*key);
    if (it != rule.end()) return it->second;
    if (!rng) throw std::runtime_error("input unseen by the stored rules");
    const State out = draw_state(*rng, model.quant.num_states, zero_bias);
    rule.emplace(*key, out);
    return out;
}

} // namespace

PlantedData gen_planted(const PlantedConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);

    PlantedModel model;
    model.seed = seed;
    model.epsilon = config.epsilon;
    model.quant = QuantizerSpec(config.num_states, config.base_range);

    for (int i = 0; i < config.stations; ++i)
        model.stations.push_back({"s" + std::to_string(i + 1),
                                  rng.uniform() * config.coord_range,
                                  rng.uniform() * config.coord_range});

    for (int i = 0; i < config.stations; ++i) {
        const auto cands = nearest_candidates(model.stations, i, config.candidate_size);
        model.candidates.emplace_back(cands.begin() + 1, cands.end());

        Genome g;
        g.labels.assign(static_cast<std::size_t>(config.candidate_size - 1), 0);
        const int neighbors = std::min(config.neighborhood_size - 1, config.candidate_size - 1);
        for (const int pos : rng.sample_indices(config.candidate_size - 1, neighbors))
            g.labels[static_cast<std::size_t>(pos)] =
                static_cast<int>(rng.uniform_int(1, config.max_groups));
        model.specs.push_back(decode(g, model.candidates.back(), i));
        model.genomes.push_back(std::move(g));
    }
    model.rules.resize(static_cast<std::size_t>(config.stations));

    // clean trajectory on the real-valued proxies
    SeriesGrid reals(model.stations, config.horizon);
    std::vector<std::vector<State>> clean(static_cast<std::size_t>(config.stations),
                                          std::vector<State>(static_cast<std::size_t>(config.horizon)));
    for (int i = 0; i < config.stations; ++i) {
        const State s = draw_state(rng, config.num_states, config.zero_bias);
        model.initial.push_back(s);
        clean[static_cast<std::size_t>(i)][0] = s;
        reals.set_value(i, 1, representative(s, 1, model.quant));
    }
    for (int t = 2; t <= config.horizon; ++t) {
        std::vector<State> next(static_cast<std::size_t>(config.stations));
        for (int i = 0; i < config.stations; ++i)
            next[static_cast<std::size_t>(i)] =
                step_cell(model, reals, i, t, &rng, config.zero_bias,
                          model.rules[static_cast<std::size_t>(i)]);
        for (int i = 0; i < config.stations; ++i) {
            clean[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - 1)] =
                next[static_cast<std::size_t>(i)];
            reals.set_value(i, t, representative(next[static_cast<std::size_t>(i)], 1, model.quant));
        }
    }

    // observation noise: an emitted state is occasionally randomized; the
    // hidden dynamics stay clean
    SeriesGrid observed = reals;
    if (config.epsilon > 0.0) {
        for (int i = 0; i < config.stations; ++i)
            for (int t = 1; t <= config.horizon; ++t)
                if (rng.bernoulli(config.epsilon)) {
                    const State s = static_cast<State>(rng.uniform_int(0, config.num_states - 1));
                    observed.set_value(i, t, representative(s, 1, model.quant));
                }
    }

    return {std::move(observed), std::move(model), std::move(clean)};
}

std::vector<std::vector<State>> resimulate(const PlantedModel& model, int horizon) {
    const int p = static_cast<int>(model.stations.size());
    SeriesGrid reals(model.stations, horizon);
    std::vector<std::vector<State>> states(static_cast<std::size_t>(p),
                                           std::vector<State>(static_cast<std::size_t>(horizon)));
    auto rules = model.rules; // step_cell must not grow the stored model
    for (int i = 0; i < p; ++i) {
        states[static_cast<std::size_t>(i)][0] = model.initial[static_cast<std::size_t>(i)];
        reals.set_value(i, 1, representative(model.initial[static_cast<std::size_t>(i)], 1, model.quant));
    }
    for (int t = 2; t <= horizon; ++t) {
        std::vector<State> next(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i)
            next[static_cast<std::size_t>(i)] = step_cell(model, reals, i, t, nullptr, 0.0,
                                                          rules[static_cast<std::size_t>(i)]);
        for (int i = 0; i < p; ++i) {
            states[static_cast<std::size_t>(i)][static_cast<std::size_t>(t - 1)] =
                next[static_cast<std::size_t>(i)];
            reals.set_value(i, t, representative(next[static_cast<std::size_t>(i)], 1, model.quant));
        }
    }
    return states;
}

} // namespace cellcast
