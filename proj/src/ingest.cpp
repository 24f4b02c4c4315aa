#include "tg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tg/error.hpp"
#include "tg/types.hpp"

namespace tg {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::int64_t parse_int(std::string_view field, std::size_t line_no, const char* what) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": " + what + " '" +
                         std::string(field) + "' is not an integer");
    }
    return value;
}

double parse_double(std::string_view field, std::size_t line_no, const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": " + what + " '" +
                         std::string(field) + "' is not a number");
    }
    return value;
}

}  // namespace

ParsedDataset parse_csv(std::istream& in, const CsvSchema& schema) {
    const std::size_t expected = 3 + (schema.has_t_end ? 1 : 0) + (schema.has_weight ? 1 : 0);

    std::unordered_map<std::int64_t, NodeId> dense;
    std::vector<std::int64_t> node_ids;
    auto remap = [&](std::int64_t raw) {
        const auto [it, inserted] = dense.try_emplace(raw, static_cast<NodeId>(node_ids.size()));
        if (inserted) node_ids.push_back(raw);
        return it->second;
    };

    std::vector<Event> events;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = schema.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != expected) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(expected) + " fields, got " +
                             std::to_string(fields.size()));
        }
        std::size_t col = 0;
        const std::int64_t raw_src = parse_int(fields[col++], line_no, "src");
        const std::int64_t raw_dst = parse_int(fields[col++], line_no, "dst");
        const Time t_start = parse_int(fields[col++], line_no, "t");
        const Time t_end = schema.has_t_end ? parse_int(fields[col++], line_no, "t_end") : t_start;
        const double weight = schema.has_weight ? parse_double(fields[col++], line_no, "weight") : 1.0;

        Event e;
        e.src = remap(raw_src);
        e.dst = remap(raw_dst);
        e.t_start = t_start;
        e.t_end = t_end;
        e.weight = weight;
        events.push_back(e);
    }
    if (events.empty()) {
        throw ParseError("no event rows found");
    }

    ParsedDataset out;
    out.stream = validate_stream(std::move(events));
    out.node_ids = std::move(node_ids);
    return out;
}

ParsedDataset parse_csv_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return parse_csv(in, schema);
}

void SplitSpec::validate() const {
    auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (!in_open_unit(train) || !in_open_unit(val) || !in_open_unit(test)) {
        throw ParameterError("split fractions must each lie in (0, 1)");
    }
    if (std::abs(train + val + test - 1.0) > 1e-9) {
        throw ParameterError("split fractions must sum to 1");
    }
}

SplitResult chronological_split(const EventStream& stream, const SplitSpec& spec) {
    spec.validate();
    const auto k = static_cast<double>(stream.size());
    const auto i1 = static_cast<std::size_t>(std::floor(spec.train * k + 1e-9));
    const auto i2 = static_cast<std::size_t>(std::floor((spec.train + spec.val) * k + 1e-9));
    return chronological_split_at(stream, i1, i2);
}

SplitResult chronological_split_at(const EventStream& stream, std::size_t i1, std::size_t i2) {
    const std::size_t k = stream.size();
    if (i1 == 0 || i1 >= i2 || i2 >= k) {
        throw SplitError("split indices (" + std::to_string(i1) + ", " + std::to_string(i2) +
                         ") leave an empty part for " + std::to_string(k) + " events");
    }
    SplitResult out;
    out.train = slice_stream(stream, 0, i1);
    out.val = slice_stream(stream, i1, i2);
    out.test = slice_stream(stream, i2, k);
    return out;
}

double surprise_index(const EventStream& train, const EventStream& test) {
    if (test.events.empty()) {
        throw ParameterError("surprise_index: empty test stream");
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(train.events.size());
    for (const Event& e : train.events) seen.insert(pair_key(e.src, e.dst));
    std::size_t unseen = 0;
    for (const Event& e : test.events) {
        if (!seen.contains(pair_key(e.src, e.dst))) ++unseen;
    }
    return static_cast<double>(unseen) / static_cast<double>(test.events.size());
}

DatasetStats dataset_stats(const EventStream& stream, const SplitSpec& spec,
                           const std::string& granularity) {
    DatasetStats stats;
    stats.num_nodes = stream.num_nodes;
    stats.num_edges = static_cast<std::int64_t>(stream.size());

    std::unordered_set<std::uint64_t> pairs;
    pairs.reserve(stream.events.size());
    for (const Event& e : stream.events) pairs.insert(pair_key(e.src, e.dst));
    stats.num_unique_edges = static_cast<std::int64_t>(pairs.size());

    try {
        const SplitResult split = chronological_split(stream, spec);
        stats.surprise = surprise_index(split.train, split.test);
    } catch (const SplitError&) {
        // Too few events to carve out non-empty train/test portions.
        stats.surprise = std::numeric_limits<double>::quiet_NaN();
    }

    if (granularity == "auto") {
        const GranularityChoice choice = finest_gapless_granularity(stream);
        stats.granularity = choice.granularity.name;
        stats.num_snapshots = choice.snapshot_count;
    } else {
        const Granularity g = granularity_from_name(granularity);
        stats.granularity = g.name;
        stats.num_snapshots = make_partition(stream, g.width).count();
    }
    return stats;
}

}  // namespace tg
