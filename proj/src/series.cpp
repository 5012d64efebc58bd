#include "cellcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "cellcast/rng.hpp"
#include "csv_util.hpp"

namespace cellcast {

SeriesGrid::SeriesGrid(std::vector<Station> stations, int horizon)
    : stations_(std::move(stations)), horizon_(horizon) {
    if (stations_.empty()) throw std::runtime_error("grid needs at least one station");
    if (horizon_ < 2) throw std::runtime_error("horizon must be at least 2");
    std::set<std::string> seen;
    for (const auto& s : stations_)
        if (!seen.insert(s.id).second) throw std::runtime_error("duplicate station id: " + s.id);
    values_.assign(stations_.size() * static_cast<std::size_t>(horizon_), std::nullopt);
}

int SeriesGrid::station_index(const std::string& id) const {
    for (std::size_t i = 0; i < stations_.size(); ++i)
        if (stations_[i].id == id) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<Station> load_stations(const std::string& path) {
    auto in = csvu::open_in(path);
    std::string line;
    if (!std::getline(in, line) || csvu::split(line) != std::vector<std::string>{"id", "x", "y"})
        throw std::runtime_error("bad stations header in " + path);
    std::vector<Station> stations;
    while (std::getline(in, line)) {
        if (csvu::trim(line).empty()) continue;
        const auto f = csvu::split(line);
        if (f.size() != 3) throw std::runtime_error("bad stations row: " + line);
        stations.push_back({f[0], csvu::parse_double(f[1], "coordinate"),
                            csvu::parse_double(f[2], "coordinate")});
    }
    return stations;
}

struct SeriesRow {
    std::string id;
    int t;
    std::optional<double> value;
};

SeriesRow parse_series_row(const std::string& line) {
    const auto f = csvu::split(line);
    if (f.size() < 3) throw std::runtime_error("bad series row: " + line);
    SeriesRow row{f[0], 0, std::nullopt};
    const long t = csvu::parse_long(f[1], "instant");
    if (t < 1) throw std::runtime_error("instant out of range: " + f[1]);
    row.t = static_cast<int>(t);
    if (f[2] != "NA") {
        const double v = csvu::parse_double(f[2], "value");
        if (v < 0.0) throw std::runtime_error("negative measurement: " + f[2]);
        row.value = v;
    }
    return row;
}

} // namespace

SeriesGrid load_csv(const std::string& stations_path, const std::string& series_path,
                    int declared_horizon) {
    auto stations = load_stations(stations_path);

    auto in = csvu::open_in(series_path);
    std::string line;
    {
        if (!std::getline(in, line)) throw std::runtime_error("empty series file: " + series_path);
        const auto header = csvu::split(line);
        if (header.size() < 3 || header[0] != "station_id" || header[1] != "t" ||
            header[2] != "value")
            throw std::runtime_error("bad series header in " + series_path);
    }

    std::vector<SeriesRow> rows;
    int max_t = 0;
    while (std::getline(in, line)) {
        if (csvu::trim(line).empty()) continue;
        auto row = parse_series_row(line);
        if (declared_horizon > 0 && row.t > declared_horizon)
            throw std::runtime_error("instant out of range: " + std::to_string(row.t));
        max_t = std::max(max_t, row.t);
        rows.push_back(std::move(row));
    }

    const int horizon = declared_horizon > 0 ? declared_horizon : max_t;
    if (horizon < 2)
        throw std::runtime_error("series horizon must be at least 2 (declare one for sparse files)");

    SeriesGrid grid(std::move(stations), horizon);
    std::set<std::pair<int, int>> filled;
    for (const auto& row : rows) {
        const int i = grid.station_index(row.id);
        if (i < 0) throw std::runtime_error("unknown station: " + row.id);
        if (!filled.insert({i, row.t}).second)
            throw std::runtime_error("duplicate series entry: " + row.id + ",t=" +
                                     std::to_string(row.t));
        grid.set_value(i, row.t, row.value);
    }
    return grid;
}

void write_stations_csv(const std::string& path, const std::vector<Station>& stations) {
    auto out = csvu::open_out(path);
    out << "id,x,y\n";
    for (const auto& s : stations)
        out << s.id << ',' << csvu::format_value(s.x) << ',' << csvu::format_value(s.y) << '\n';
}

void write_series_csv(const std::string& path, const SeriesGrid& grid) {
    auto out = csvu::open_out(path);
    out << "station_id,t,value\n";
    for (int i = 0; i < grid.station_count(); ++i)
        for (int t = 1; t <= grid.horizon(); ++t) {
            const auto& v = grid.value(i, t);
            out << grid.station(i).id << ',' << t << ','
                << (v ? csvu::format_value(*v) : std::string("NA")) << '\n';
        }
}

void write_test_set_csv(const std::string& path, const SeriesGrid& grid, const TestSet& set) {
    auto out = csvu::open_out(path);
    out << "station_id,t,value,state\n";
    for (const auto& e : set) {
        out << grid.station(e.station).id << ',' << e.t << ',' << csvu::format_value(e.value)
            << ',';
        if (e.state >= 0) out << e.state;
        out << '\n';
    }
}

TestSet load_test_set_csv(const std::string& path, const SeriesGrid& grid) {
    auto in = csvu::open_in(path);
    std::string line;
    if (!std::getline(in, line) ||
        csvu::split(line) != std::vector<std::string>{"station_id", "t", "value", "state"})
        throw std::runtime_error("bad test set header in " + path);
    TestSet set;
    while (std::getline(in, line)) {
        if (csvu::trim(line).empty()) continue;
        const auto f = csvu::split(line);
        if (f.size() != 4) throw std::runtime_error("bad test set row: " + line);
        TestEntry e;
        const int i = grid.station_index(f[0]);
        if (i < 0) throw std::runtime_error("unknown station: " + f[0]);
        e.station = i;
        e.t = static_cast<int>(csvu::parse_long(f[1], "instant"));
        e.value = csvu::parse_double(f[2], "value");
        e.state = f[3].empty() ? -1 : static_cast<State>(csvu::parse_long(f[3], "state"));
        set.push_back(e);
    }
    return set;
}

GapInsertion insert_test_gaps(const SeriesGrid& grid, double fraction, std::uint64_t seed,
                              bool protect_first_instant) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::runtime_error("gap fraction must lie in (0,1)");

    Rng rng(seed);
    GapInsertion result{grid, {}};
    const int first = protect_first_instant ? 2 : 1;
    for (int i = 0; i < grid.station_count(); ++i) {
        std::vector<int> eligible;
        bool has_any = false;
        for (int t = 1; t <= grid.horizon(); ++t) {
            if (grid.is_gap(i, t)) continue;
            has_any = true;
            if (t >= first) eligible.push_back(t);
        }
        if (!has_any)
            throw std::runtime_error("station has no data: " + grid.station(i).id);

        const int k = static_cast<int>(fraction * static_cast<double>(eligible.size()));
        auto picks = rng.sample_indices(static_cast<int>(eligible.size()), k);
        std::sort(picks.begin(), picks.end());
        for (const int idx : picks) {
            const int t = eligible[static_cast<std::size_t>(idx)];
            result.test_set.push_back({i, t, *grid.value(i, t), -1});
            result.grid.set_value(i, t, std::nullopt);
        }
    }
    return result;
}

std::vector<int> nearest_candidates(const std::vector<Station>& stations, int station, int m) {
    const int p = static_cast<int>(stations.size());
    if (m < 1 || m > p) throw std::runtime_error("candidate count out of range");
    if (station < 0 || station >= p) throw std::runtime_error("station index out of range");

    std::vector<std::pair<double, int>> others;
    const auto& c = stations[static_cast<std::size_t>(station)];
    for (int j = 0; j < p; ++j) {
        if (j == station) continue;
        const auto& s = stations[static_cast<std::size_t>(j)];
        const double dx = s.x - c.x, dy = s.y - c.y;
        others.emplace_back(dx * dx + dy * dy, j);
    }
    std::sort(others.begin(), others.end()); // distance, then file order

    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(m));
    out.push_back(station);
    for (int k = 0; k < m - 1; ++k) out.push_back(others[static_cast<std::size_t>(k)].second);
    return out;
}

std::vector<int> nearest_candidates(const SeriesGrid& grid, int station, int m) {
    return nearest_candidates(grid.stations(), station, m);
}

} // namespace cellcast
