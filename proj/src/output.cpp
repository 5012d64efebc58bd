#include "cellcast/output.hpp"

#include "cellcast/quantizer.hpp"
#include "csv_util.hpp"

namespace cellcast {

void write_report_csv(const std::string& path, const SeriesGrid& grid,
                      const std::vector<ReportRow>& rows) {
    auto out = csvu::open_out(path);
    out << "station_id,t,outcome,state,strategy,true_state\n";
    for (const auto& r : rows) {
        out << grid.station(r.station).id << ',' << r.t << ',' << r.outcome << ',';
        if (r.state >= 0) out << r.state;
        out << ',' << r.strategy << ",\n";
    }
}

std::vector<ReportRow> load_report_csv(const std::string& path, const SeriesGrid& grid) {
    auto in = csvu::open_in(path);
    std::string line;
    if (!std::getline(in, line) || csvu::split(line)[0] != "station_id")
        throw std::runtime_error("bad report header in " + path);
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (csvu::trim(line).empty()) continue;
        const auto f = csvu::split(line);
        if (f.size() < 5) throw std::runtime_error("bad report row: " + line);
        ReportRow r;
        const int i = grid.station_index(f[0]);
        if (i < 0) throw std::runtime_error("unknown station: " + f[0]);
        r.station = i;
        r.t = static_cast<int>(csvu::parse_long(f[1], "instant"));
        r.outcome = f[2];
        r.state = f[3].empty() ? -1 : static_cast<State>(csvu::parse_long(f[3], "state"));
        r.strategy = f[4];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_output_series_csv(const std::string& path, const SeriesGrid& grid,
                             const StateGrid& states, const QuantizerSpec& quant,
                             const std::string& produced_source,
                             const std::string& missing_source, bool prefer_produced) {
    auto out = csvu::open_out(path);
    out << "station_id,t,value,source\n";
    for (int i = 0; i < grid.station_count(); ++i)
        for (int t = 1; t <= grid.horizon(); ++t) {
            const auto& observed = grid.value(i, t);
            const bool produced = states.at(i, t) >= 0;
            out << grid.station(i).id << ',' << t << ',';
            if (produced && (prefer_produced || !observed)) {
                out << csvu::format_value(representative(states.at(i, t), 1, quant)) << ','
                    << produced_source;
            } else if (observed) {
                out << csvu::format_value(*observed) << ",observed";
            } else {
                out << "NA," << missing_source;
            }
            out << '\n';
        }
}

} // namespace cellcast
