#include "cellcast/model_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "csv_util.hpp"

namespace cellcast {

using nlohmann::json;

void write_cell_model(const std::string& path, const SeriesGrid& grid, const GAResult& result) {
    json doc;
    doc["center"] = grid.station(result.center).id;
    json candidates = json::array();
    for (const int j : result.candidate_order) candidates.push_back(grid.station(j).id);
    doc["candidates"] = std::move(candidates);
    json individuals = json::array();
    for (const auto& s : result.best)
        individuals.push_back({{"labels", s.genome.labels}, {"fitness", s.fitness}});
    doc["individuals"] = std::move(individuals);

    auto out = csvu::open_out(path);
    out << doc.dump(2) << '\n';
}

CellModel load_cell_model(const std::string& path, const SeriesGrid& grid) {
    auto in = csvu::open_in(path);
    json doc;
    in >> doc;

    CellModel model;
    const std::string center_id = doc.at("center").get<std::string>();
    model.center = grid.station_index(center_id);
    if (model.center < 0) throw std::runtime_error("unknown station: " + center_id);

    std::vector<int> order;
    for (const auto& id : doc.at("candidates")) {
        const int j = grid.station_index(id.get<std::string>());
        if (j < 0) throw std::runtime_error("unknown station: " + id.get<std::string>());
        order.push_back(j);
    }

    for (const auto& ind : doc.at("individuals")) {
        Genome g;
        g.labels = ind.at("labels").get<std::vector<int>>();
        ScoredSpec s;
        s.spec = decode(g, order, model.center);
        s.fitness = ind.at("fitness").get<double>();
        model.specs.push_back(std::move(s));
    }
    if (model.specs.empty()) throw std::runtime_error("cell model has no individuals: " + path);
    return model;
}

CellModel to_cell_model(const GAResult& result) {
    CellModel model;
    model.center = result.center;
    for (const auto& s : result.best) {
        ScoredSpec spec;
        spec.spec = decode(s.genome, result.candidate_order, result.center);
        spec.fitness = s.fitness;
        model.specs.push_back(std::move(spec));
    }
    return model;
}

std::vector<CellModel> load_models_dir(const std::string& dir, const SeriesGrid& grid) {
    std::vector<CellModel> models;
    for (int i = 0; i < grid.station_count(); ++i) {
        const auto path = std::filesystem::path(dir) / (grid.station(i).id + ".json");
        models.push_back(load_cell_model(path.string(), grid));
        if (models.back().center != i)
            throw std::runtime_error("model center mismatch in " + path.string());
    }
    return models;
}

} // namespace cellcast
