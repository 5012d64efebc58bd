#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cellcast/output.hpp"

namespace cellcast {

struct IntervalStat {
    State interval = 0;
    long hits = 0;
    long count = 0;
    double ratio() const { return count ? static_cast<double>(hits) / static_cast<double>(count) : 0.0; }
};

struct StationEval {
    std::string id;
    long hits = 0;
    long count = 0;
    std::vector<IntervalStat> intervals; // ascending, only intervals present
    double ratio() const { return count ? static_cast<double>(hits) / static_cast<double>(count) : 0.0; }
};

struct EvalReport {
    std::vector<StationEval> stations;
    long hits = 0;
    long count = 0;
    double ratio() const { return count ? static_cast<double>(hits) / static_cast<double>(count) : 0.0; }
};

// Outcome per test position: the produced state, or -1 for an explicit
// miss (unfilled). A test position absent from the map is an error.
using Outcomes = std::map<std::pair<int, int>, State>;

Outcomes outcomes_from_report(const std::vector<ReportRow>& rows);

// Hit iff the outcome state equals the quantized true value; per-interval
// grouping is by the true state. Unfilled outcomes count as misses.
EvalReport evaluate(const Outcomes& outcomes, const TestSet& test_set,
                    const QuantizerSpec& quant, const SeriesGrid& grid);

struct RenderedComparison {
    std::string text; // two aligned tables, strictly-best cells marked `*`
    std::string csv;  // method,station_id,interval,hits,count,ratio,best
};

// Side-by-side comparison of two methods on the same test set. Ratios are
// rendered to 3 decimals and strict winners are judged at that precision;
// intervals absent from a station's test set render blank.
RenderedComparison render_report(const std::string& title,
                                 const std::string& name_a, const EvalReport& a,
                                 const std::string& name_b, const EvalReport& b);

void write_eval_csv(const std::string& path, const std::string& method, const EvalReport& report);

} // namespace cellcast
