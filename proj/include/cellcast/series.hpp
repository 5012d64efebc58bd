#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cellcast/quantizer.hpp"

namespace cellcast {

struct Station {
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

// p correlated series over instants t = 1..T, each entry a nonnegative real
// or a gap. Immutable by convention after load/gap insertion; the engine
// works on private copies.
class SeriesGrid {
public:
    SeriesGrid(std::vector<Station> stations, int horizon);

    int station_count() const { return static_cast<int>(stations_.size()); }
    int horizon() const { return horizon_; }
    const std::vector<Station>& stations() const { return stations_; }
    const Station& station(int i) const { return stations_[static_cast<std::size_t>(i)]; }

    // -1 when the id is unknown.
    int station_index(const std::string& id) const;

    const std::optional<double>& value(int station, int t) const {
        return values_[index(station, t)];
    }
    bool is_gap(int station, int t) const { return !value(station, t).has_value(); }
    void set_value(int station, int t, std::optional<double> v) {
        values_[index(station, t)] = v;
    }

private:
    std::size_t index(int station, int t) const {
        return static_cast<std::size_t>(station) * static_cast<std::size_t>(horizon_) +
               static_cast<std::size_t>(t - 1);
    }

    std::vector<Station> stations_;
    int horizon_;
    std::vector<std::optional<double>> values_;
};

struct TestEntry {
    int station = 0;
    int t = 0;
    double value = 0.0;
    State state = -1; // filled in once a quantizer is available
};
using TestSet = std::vector<TestEntry>;

// stations CSV: header `id,x,y`. series CSV: header `station_id,t,value`
// with 1-based t and `NA` for gaps; columns beyond the third are ignored so
// engine outputs (which append a `source` column) reload cleanly.
// declared_horizon > 0 fixes T and makes larger t an error; otherwise T is
// the largest t present in the file.
SeriesGrid load_csv(const std::string& stations_path, const std::string& series_path,
                    int declared_horizon = 0);

void write_stations_csv(const std::string& path, const std::vector<Station>& stations);
void write_series_csv(const std::string& path, const SeriesGrid& grid);

void write_test_set_csv(const std::string& path, const SeriesGrid& grid, const TestSet& set);
TestSet load_test_set_csv(const std::string& path, const SeriesGrid& grid);

struct GapInsertion {
    SeriesGrid grid;
    TestSet test_set; // ordered by (station, t)
};

// Turns floor(fraction * #eligible-non-gap) entries per station into gaps,
// chosen uniformly without replacement; deterministic given seed. With
// protect_first_instant the t=1 entries are not eligible (prediction
// requires a complete first instant).
GapInsertion insert_test_gaps(const SeriesGrid& grid, double fraction, std::uint64_t seed,
                              bool protect_first_instant = false);

// Station i plus the m-1 stations nearest to it by Euclidean distance, ties
// by file order; output ordered by (distance, file order) so genome
// positions are stable.
std::vector<int> nearest_candidates(const std::vector<Station>& stations, int station, int m);
std::vector<int> nearest_candidates(const SeriesGrid& grid, int station, int m);

} // namespace cellcast
