#include "sift/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sift::ingest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

/// Iterates non-blank lines, tracking 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view& line, std::size_t& number) {
        while (pos_ < text_.size()) {
            auto end = text_.find('\n', pos_);
            if (end == std::string_view::npos) end = text_.size();
            line = trim(text_.substr(pos_, end - pos_));
            pos_ = end + 1;
            ++line_no_;
            if (!line.empty()) {
                number = line_no_;
                return true;
            }
        }
        return false;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

std::int64_t parse_int(std::string_view s, const std::string& src, std::size_t line, const char* field) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(src, line, std::string("invalid integer in field '") + field + "': '" + std::string(s) + "'");
    }
    return v;
}

double parse_real(std::string_view s, const std::string& src, std::size_t line, const char* field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(src, line, std::string("invalid number in field '") + field + "': '" + std::string(s) + "'");
    }
    if (!std::isfinite(v)) {
        throw ParseError(src, line, std::string("non-finite value in field '") + field + "': '" + std::string(s) + "'");
    }
    return v;
}

void require_identifier(std::string_view s, const std::string& src, std::size_t line, const char* field) {
    if (s.empty()) {
        throw ParseError(src, line, std::string("empty identifier in field '") + field + "'");
    }
}

void expect_header(LineReader& reader, std::string_view expected, const std::string& src) {
    std::string_view line;
    std::size_t no = 0;
    if (!reader.next(line, no)) {
        throw ParseError(src, 1, "missing header, expected '" + std::string(expected) + "'");
    }
    if (line != expected) {
        throw ParseError(src, no, "unexpected header '" + std::string(line) + "', expected '" +
                                      std::string(expected) + "'");
    }
}

constexpr std::string_view kMetricsHeader = "timestamp_ms,component,metric,value";
constexpr std::string_view kEventsHeader = "timestamp_ms,caller,callee";
constexpr std::string_view kCallGraphHeader = "caller,callee,count";

}  // namespace

MetricCatalog::MetricCatalog(std::vector<MetricSeries> series) : series_(std::move(series)) {
    std::sort(series_.begin(), series_.end(),
              [](const MetricSeries& a, const MetricSeries& b) { return a.key() < b.key(); });
    for (std::size_t i = 0; i < series_.size(); ++i) {
        const auto& s = series_[i];
        if (s.component.empty() || s.metric.empty()) {
            throw Error("series with empty component or metric name");
        }
        if (i > 0 && series_[i - 1].key() == s.key()) {
            throw Error("duplicate series " + s.key().str());
        }
        if (s.samples.size() < 2) {
            throw Error("series " + s.key().str() + " has fewer than 2 samples");
        }
        for (std::size_t j = 0; j < s.samples.size(); ++j) {
            if (s.samples[j].timestamp_ms < 0) {
                throw Error("series " + s.key().str() + " has a negative timestamp");
            }
            if (!std::isfinite(s.samples[j].value)) {
                throw Error("series " + s.key().str() + " has a non-finite value");
            }
            if (j > 0 && s.samples[j].timestamp_ms <= s.samples[j - 1].timestamp_ms) {
                throw Error("series " + s.key().str() + " is not strictly increasing in time");
            }
        }
        components_.insert(s.component);
    }
}

const MetricSeries* MetricCatalog::find(const MetricKey& key) const {
    const auto it = std::lower_bound(series_.begin(), series_.end(), key,
                                     [](const MetricSeries& s, const MetricKey& k) { return s.key() < k; });
    if (it == series_.end() || it->key() != key) return nullptr;
    return &*it;
}

std::map<std::string, std::set<std::string>> MetricCatalog::metric_names() const {
    std::map<std::string, std::set<std::string>> out;
    for (const auto& s : series_) out[s.component].insert(s.metric);
    return out;
}

std::vector<std::pair<std::string, std::string>> CallGraph::undirected_pairs() const {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& [edge, count] : edges) {
        const auto& [a, b] = edge;
        pairs.insert(a < b ? std::pair{a, b} : std::pair{b, a});
    }
    return {pairs.begin(), pairs.end()};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing file: " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("cannot format number");
    return {buf, ptr};
}

MetricCatalog parse_metrics(std::string_view text, const std::string& source) {
    LineReader reader(text);
    expect_header(reader, kMetricsHeader, source);

    std::map<MetricKey, std::vector<std::pair<RawSample, std::size_t>>> grouped;
    std::string_view line;
    std::size_t no = 0;
    while (reader.next(line, no)) {
        const auto f = split(line, ',');
        if (f.size() != 4) {
            throw ParseError(source, no, "expected 4 fields, found " + std::to_string(f.size()));
        }
        const auto ts = parse_int(f[0], source, no, "timestamp_ms");
        if (ts < 0) throw ParseError(source, no, "negative timestamp");
        require_identifier(f[1], source, no, "component");
        require_identifier(f[2], source, no, "metric");
        const auto value = parse_real(f[3], source, no, "value");
        grouped[{std::string(f[1]), std::string(f[2])}].push_back({{ts, value}, no});
    }

    std::vector<MetricSeries> series;
    series.reserve(grouped.size());
    for (auto& [key, rows] : grouped) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const auto& a, const auto& b) { return a.first.timestamp_ms < b.first.timestamp_ms; });
        MetricSeries s{key.component, key.metric, {}};
        s.samples.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].first.timestamp_ms == rows[i - 1].first.timestamp_ms) {
                throw ParseError(source, std::max(rows[i].second, rows[i - 1].second),
                                 "duplicate timestamp " + std::to_string(rows[i].first.timestamp_ms) +
                                     " for series " + key.str());
            }
            s.samples.push_back(rows[i].first);
        }
        if (s.samples.size() < 2) {
            throw ParseError(source, rows.front().second, "series " + key.str() + " has fewer than 2 samples");
        }
        series.push_back(std::move(s));
    }
    return MetricCatalog(std::move(series));
}

MetricCatalog load_metrics(const std::filesystem::path& path) {
    return parse_metrics(read_file(path), path.string());
}

std::string format_metrics(const MetricCatalog& catalog) {
    std::string out(kMetricsHeader);
    out += '\n';
    for (const auto& s : catalog.series()) {
        for (const auto& sample : s.samples) {
            out += std::to_string(sample.timestamp_ms);
            out += ',';
            out += s.component;
            out += ',';
            out += s.metric;
            out += ',';
            out += format_double(sample.value);
            out += '\n';
        }
    }
    return out;
}

void write_metrics(const MetricCatalog& catalog, const std::filesystem::path& path) {
    write_file(path, format_metrics(catalog));
}

std::vector<CommEvent> parse_events(std::string_view text, const std::string& source) {
    LineReader reader(text);
    expect_header(reader, kEventsHeader, source);
    std::vector<CommEvent> events;
    std::string_view line;
    std::size_t no = 0;
    while (reader.next(line, no)) {
        const auto f = split(line, ',');
        if (f.size() != 3) {
            throw ParseError(source, no, "expected 3 fields, found " + std::to_string(f.size()));
        }
        const auto ts = parse_int(f[0], source, no, "timestamp_ms");
        require_identifier(f[1], source, no, "caller");
        require_identifier(f[2], source, no, "callee");
        events.push_back({ts, std::string(f[1]), std::string(f[2])});
    }
    return events;
}

std::vector<CommEvent> load_events(const std::filesystem::path& path) {
    return parse_events(read_file(path), path.string());
}

CallGraph build_call_graph(std::span<const CommEvent> events) {
    if (events.empty()) throw Error("no communication events");
    CallGraph g;
    for (const auto& e : events) {
        if (e.caller == e.callee) {
            ++g.self_calls_dropped;
            continue;
        }
        g.nodes.insert(e.caller);
        g.nodes.insert(e.callee);
        ++g.edges[{e.caller, e.callee}];
    }
    if (g.edges.empty()) {
        throw Error("call graph is empty: all " + std::to_string(g.self_calls_dropped) + " events are self-calls");
    }
    return g;
}

CallGraph parse_call_graph(std::string_view text, const std::string& source) {
    LineReader reader(text);
    expect_header(reader, kCallGraphHeader, source);
    CallGraph g;
    std::string_view line;
    std::size_t no = 0;
    while (reader.next(line, no)) {
        const auto f = split(line, ',');
        if (f.size() != 3) {
            throw ParseError(source, no, "expected 3 fields, found " + std::to_string(f.size()));
        }
        require_identifier(f[0], source, no, "caller");
        require_identifier(f[1], source, no, "callee");
        const auto count = parse_int(f[2], source, no, "count");
        if (count < 1) throw ParseError(source, no, "edge count must be positive");
        if (f[0] == f[1]) throw ParseError(source, no, "self-edge " + std::string(f[0]));
        const std::pair<std::string, std::string> key{std::string(f[0]), std::string(f[1])};
        if (g.edges.contains(key)) throw ParseError(source, no, "duplicate edge");
        g.nodes.insert(key.first);
        g.nodes.insert(key.second);
        g.edges[key] = static_cast<std::uint64_t>(count);
    }
    if (g.edges.empty()) throw ParseError(source, 0, "call graph has no edges");
    return g;
}

CallGraph load_call_graph(const std::filesystem::path& path) {
    return parse_call_graph(read_file(path), path.string());
}

void write_call_graph(const CallGraph& graph, const std::filesystem::path& path) {
    std::string out(kCallGraphHeader);
    out += '\n';
    for (const auto& [edge, count] : graph.edges) {
        out += edge.first + "," + edge.second + "," + std::to_string(count) + "\n";
    }
    write_file(path, out);
}

CallGraph load_call_graph_any(const std::filesystem::path& path) {
    const auto text = read_file(path);
    const auto header = trim(std::string_view(text).substr(0, text.find('\n')));
    if (header == kEventsHeader) {
        const auto events = parse_events(text, path.string());
        return build_call_graph(events);
    }
    return parse_call_graph(text, path.string());
}

}  // namespace sift::ingest
