#include "cellcast/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csv_util.hpp"

namespace cellcast {

Outcomes outcomes_from_report(const std::vector<ReportRow>& rows) {
    Outcomes out;
    for (const auto& r : rows) out[{r.station, r.t}] = r.state;
    return out;
}

EvalReport evaluate(const Outcomes& outcomes, const TestSet& test_set,
                    const QuantizerSpec& quant, const SeriesGrid& grid) {
    std::vector<std::map<State, std::pair<long, long>>> per_station(
        static_cast<std::size_t>(grid.station_count())); // interval -> (hits, count)

    for (const auto& e : test_set) {
        const auto it = outcomes.find({e.station, e.t});
        if (it == outcomes.end())
            throw std::runtime_error("test position missing from outcomes: " +
                                     grid.station(e.station).id + ",t=" + std::to_string(e.t));
        const State truth = quantize(e.value, 1, quant);
        auto& [hits, count] = per_station[static_cast<std::size_t>(e.station)][truth];
        ++count;
        if (it->second == truth) ++hits;
    }

    EvalReport report;
    for (int i = 0; i < grid.station_count(); ++i) {
        StationEval st;
        st.id = grid.station(i).id;
        for (const auto& [interval, hc] : per_station[static_cast<std::size_t>(i)]) {
            st.intervals.push_back({interval, hc.first, hc.second});
            st.hits += hc.first;
            st.count += hc.second;
        }
        report.hits += st.hits;
        report.count += st.count;
        report.stations.push_back(std::move(st));
    }
    return report;
}

namespace {

std::string ratio3(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r);
    return buf;
}

long rounded3(double r) { return std::lround(r * 1000.0); }

const IntervalStat* find_interval(const StationEval& st, State interval) {
    for (const auto& iv : st.intervals)
        if (iv.interval == interval) return &iv;
    return nullptr;
}

// cells[row][col]; col 0 = station, 1 = overall, then intervals
std::string layout(const std::string& header, const std::vector<State>& intervals,
                   const std::vector<std::vector<std::string>>& cells) {
    std::ostringstream out;
    out << header << '\n';
    std::vector<std::string> head{"station", "overall"};
    for (const State iv : intervals) head.push_back(std::to_string(iv));

    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    const auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << "  ";
            out << std::string(width[c] - row[c].size(), ' ') << row[c];
        }
        out << '\n';
    };
    emit(head);
    for (const auto& row : cells) emit(row);
    return out.str();
}

} // namespace

RenderedComparison render_report(const std::string& title,
                                 const std::string& name_a, const EvalReport& a,
                                 const std::string& name_b, const EvalReport& b) {
    if (a.stations.size() != b.stations.size())
        throw std::runtime_error("mismatched station sets");
    for (std::size_t i = 0; i < a.stations.size(); ++i)
        if (a.stations[i].id != b.stations[i].id)
            throw std::runtime_error("mismatched station sets");

    std::set<State> interval_set;
    for (const auto* rep : {&a, &b})
        for (const auto& st : rep->stations)
            for (const auto& iv : st.intervals) interval_set.insert(iv.interval);
    const std::vector<State> intervals(interval_set.begin(), interval_set.end());

    // a cell is starred when it is strictly best at rendering precision
    const auto mark = [](double mine, double other, bool have_mine, bool have_other) {
        if (!have_mine) return std::string();
        std::string s = ratio3(mine);
        if (have_other && rounded3(mine) > rounded3(other)) s += '*';
        return s;
    };

    std::ostringstream csv;
    csv << "method,station_id,interval,hits,count,ratio,best\n";
    const auto csv_row = [&](const std::string& method, const std::string& station,
                             const std::string& interval, long hits, long count, double ratio,
                             bool best) {
        csv << method << ',' << station << ',' << interval << ',' << hits << ',' << count << ','
            << ratio3(ratio) << ',' << (best ? 1 : 0) << '\n';
    };

    std::vector<std::vector<std::string>> cells_a, cells_b;
    for (std::size_t i = 0; i <= a.stations.size(); ++i) {
        const bool total = i == a.stations.size();
        const std::string id = total ? "all" : a.stations[i].id;
        const double ra = total ? a.ratio() : a.stations[i].ratio();
        const double rb = total ? b.ratio() : b.stations[i].ratio();

        std::vector<std::string> row_a{id, mark(ra, rb, true, true)};
        std::vector<std::string> row_b{id, mark(rb, ra, true, true)};
        csv_row(name_a, id, "overall", total ? a.hits : a.stations[i].hits,
                total ? a.count : a.stations[i].count, ra, rounded3(ra) > rounded3(rb));
        csv_row(name_b, id, "overall", total ? b.hits : b.stations[i].hits,
                total ? b.count : b.stations[i].count, rb, rounded3(rb) > rounded3(ra));
        if (total) {
            row_a.insert(row_a.end(), intervals.size(), "");
            row_b.insert(row_b.end(), intervals.size(), "");
        } else {
            for (const State iv : intervals) {
                const auto* ia = find_interval(a.stations[i], iv);
                const auto* ib = find_interval(b.stations[i], iv);
                row_a.push_back(mark(ia ? ia->ratio() : 0.0, ib ? ib->ratio() : 0.0,
                                     ia != nullptr, ib != nullptr));
                row_b.push_back(mark(ib ? ib->ratio() : 0.0, ia ? ia->ratio() : 0.0,
                                     ib != nullptr, ia != nullptr));
                if (ia)
                    csv_row(name_a, id, std::to_string(iv), ia->hits, ia->count, ia->ratio(),
                            ib && rounded3(ia->ratio()) > rounded3(ib->ratio()));
                if (ib)
                    csv_row(name_b, id, std::to_string(iv), ib->hits, ib->count, ib->ratio(),
                            ia && rounded3(ib->ratio()) > rounded3(ia->ratio()));
            }
        }
        cells_a.push_back(std::move(row_a));
        cells_b.push_back(std::move(row_b));
    }

    RenderedComparison out;
    std::ostringstream text;
    text << "== " << title << " ==\n\n";
    text << layout(name_a, intervals, cells_a) << '\n';
    text << layout(name_b, intervals, cells_b);
    out.text = text.str();
    out.csv = csv.str();
    return out;
}

void write_eval_csv(const std::string& path, const std::string& method,
                    const EvalReport& report) {
    auto out = csvu::open_out(path);
    out << "method,station_id,interval,hits,count,ratio\n";
    const auto row = [&](const std::string& station, const std::string& interval, long hits,
                         long count, double ratio) {
        out << method << ',' << station << ',' << interval << ',' << hits << ',' << count << ','
            << ratio3(ratio) << '\n';
    };
    for (const auto& st : report.stations) {
        row(st.id, "overall", st.hits, st.count, st.ratio());
        for (const auto& iv : st.intervals)
            row(st.id, std::to_string(iv.interval), iv.hits, iv.count, iv.ratio());
    }
    row("all", "overall", report.hits, report.count, report.ratio());
}

} // namespace cellcast
