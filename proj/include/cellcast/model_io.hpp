#pragma once

#include <string>
#include <vector>

#include "cellcast/engine.hpp"
#include "cellcast/evolution.hpp"

namespace cellcast {

// Per-cell training artifact: JSON with the center id, the candidate order
// (station ids behind genome positions) and the best individuals as label
// strings with their fitness, best first.
void write_cell_model(const std::string& path, const SeriesGrid& grid, const GAResult& result);
CellModel load_cell_model(const std::string& path, const SeriesGrid& grid);

CellModel to_cell_model(const GAResult& result);

// Loads `<dir>/<station id>.json` for every station of the grid.
std::vector<CellModel> load_models_dir(const std::string& dir, const SeriesGrid& grid);

} // namespace cellcast
