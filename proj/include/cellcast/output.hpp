#pragma once

#include <string>
#include <vector>

#include "cellcast/series.hpp"

namespace cellcast {

// Dense per-(station, instant) state result; -1 where no state was produced.
class StateGrid {
public:
    StateGrid(int stations, int horizon)
        : stations_(stations), horizon_(horizon),
          v_(static_cast<std::size_t>(stations) * static_cast<std::size_t>(horizon), -1) {}

    int station_count() const { return stations_; }
    int horizon() const { return horizon_; }
    State at(int station, int t) const { return v_[index(station, t)]; }
    void set(int station, int t, State s) { v_[index(station, t)] = s; }

    bool operator==(const StateGrid&) const = default;

private:
    std::size_t index(int station, int t) const {
        return static_cast<std::size_t>(station) * static_cast<std::size_t>(horizon_) +
               static_cast<std::size_t>(t - 1);
    }

    int stations_;
    int horizon_;
    std::vector<State> v_;
};

// One engine/baseline outcome. For fills the rows cover exactly the gap
// positions of the input grid; for predictions, every (cell, t >= 2).
struct ReportRow {
    int station = 0;
    int t = 0;
    std::string outcome;  // filled | unfilled | predicted | skipped
    State state = -1;     // -1 when no state was produced
    std::string strategy; // which rung produced the value, or the reason
};

// report CSV: header `station_id,t,outcome,state,strategy,true_state`;
// state and true_state are blank when absent.
void write_report_csv(const std::string& path, const SeriesGrid& grid,
                      const std::vector<ReportRow>& rows);
std::vector<ReportRow> load_report_csv(const std::string& path, const SeriesGrid& grid);

// Output series CSV: the series schema plus a `source` column. Observed
// entries keep their original value; produced states are written as their
// representative reals; rows with no value carry NA. With prefer_produced
// (prediction outputs) a produced state wins over the observed value.
void write_output_series_csv(const std::string& path, const SeriesGrid& grid,
                             const StateGrid& states, const QuantizerSpec& quant,
                             const std::string& produced_source,
                             const std::string& missing_source,
                             bool prefer_produced = false);

} // namespace cellcast
