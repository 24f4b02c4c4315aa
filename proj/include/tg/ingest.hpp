#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tg/core.hpp"
#include "tg/discretize.hpp"

namespace tg {

// Column layout for event CSV files: src,dst,t[,t_end][,weight].
struct CsvSchema {
    bool has_header = true;
    bool has_t_end = false;
    bool has_weight = false;
};

// Parsed events with the raw-to-dense node id mapping. node_ids[i] is the
// raw id that was remapped to dense id i (first-appearance order).
struct ParsedDataset {
    EventStream stream;
    std::vector<std::int64_t> node_ids;
};

ParsedDataset parse_csv(std::istream& in, const CsvSchema& schema);
ParsedDataset parse_csv_file(const std::string& path, const CsvSchema& schema);

// Chronological split fractions; each must lie in (0, 1) and they must sum
// to 1 within 1e-9.
struct SplitSpec {
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;

    void validate() const;
};

struct SplitResult {
    EventStream train;
    EventStream val;
    EventStream test;
};

// Splits the (time-sorted) stream at event indices floor(train*k) and
// floor((train+val)*k). Throws SplitError when any part comes out empty.
SplitResult chronological_split(const EventStream& stream, const SplitSpec& spec);

// Split at explicit event indices i1 <= i2.
SplitResult chronological_split_at(const EventStream& stream, std::size_t i1, std::size_t i2);

// Fraction of test events whose (src, dst) pair never occurs in train.
// Counts event occurrences, not distinct pairs.
double surprise_index(const EventStream& train, const EventStream& test);

struct DatasetStats {
    NodeId num_nodes = 0;
    std::int64_t num_edges = 0;
    std::int64_t num_unique_edges = 0;
    double surprise = 0.0;
    std::string granularity;         // chosen or requested granularity
    std::int64_t num_snapshots = 0;  // partition size at that granularity
};

// granularity "auto" picks the finest gapless named granularity; any other
// name counts partition intervals at that width.
DatasetStats dataset_stats(const EventStream& stream, const SplitSpec& spec = SplitSpec{},
                           const std::string& granularity = "auto");

}  // namespace tg
