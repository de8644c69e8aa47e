#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphent/estimators.hpp"
#include "graphent/graph.hpp"

// Edge-list ingestion and snapshot building for entropy time series on real
// graphs.  Node ids are arbitrary tokens; timestamps are either ISO dates
// (YYYY-MM or YYYY-MM-DD) or plain integers treated as opaque ordered keys.
// The two timestamp styles cannot be mixed within one snapshot build.

namespace graphent::ingest {

struct TimePoint {
  bool is_date = false;
  long long raw = 0;  // opaque key when !is_date
  int year = 0;
  int month = 1;
  int day = 1;
  int precision = 0;  // date fields given: 2 = year-month, 3 = full date

  // Total order inside one style: dates by calendar, raw keys by value.
  long long ordinal() const {
    return is_date ? (static_cast<long long>(year) * 10000 + month * 100 + day)
                   : raw;
  }
};

struct EdgeRecord {
  std::string u;
  std::string v;
  std::optional<TimePoint> t;
};

struct ParseOptions {
  char delimiter = 0;  // 0 means any run of whitespace
  bool has_timestamps = false;
  std::string comment_prefix = "#";
  // Accept a file with zero valid edges instead of treating it as degenerate
  // (callers must then supply the node count themselves).
  bool allow_empty = false;
};

struct ParseResult {
  std::vector<EdgeRecord> records;  // canonical: u < v, duplicates removed
  int self_loops_dropped = 0;
  int duplicates_collapsed = 0;
  std::vector<std::pair<int, std::string>> malformed;  // (line number, text)
};

// Reads "u v" or "u v t" lines.  Self-loops are dropped and counted;
// duplicate undirected edges (same pair, and same timestamp when present)
// are collapsed.  Malformed lines are collected, not fatal.  Throws on an
// unreadable file, and a degenerate-input error on zero valid edges unless
// options.allow_empty is set.
ParseResult parse_edge_list(const std::string& path,
                            const ParseOptions& options = {});

// Canonical serialization ("u v" or "u v t" per line); parsing the output
// reproduces the records exactly.
void save_edge_records(const std::vector<EdgeRecord>& records,
                       const std::string& path);

enum class Window { monthly, yearly, custom };
enum class SnapshotMode { cumulative, windowed };

struct SnapshotSeries {
  std::vector<std::string> labels;  // one per snapshot, in time order
  std::vector<long long> keys;      // bucket keys behind the labels
  std::vector<Graph> graphs;        // each over the full node universe
  std::vector<std::string> tokens;  // node index -> original token
};

// Buckets records by window and materializes one graph per bucket over the
// shared node universe (token -> index by first appearance).  monthly/yearly
// emit only observed buckets; custom emits one snapshot per boundary, where
// boundaries are strictly increasing ordinal keys covering every record
// (bucket b holds ordinals in (boundary[b-1], boundary[b]]).  `cumulative`
// accumulates all edges up to the bucket end; `windowed` keeps only the
// bucket's own edges.  Records must all carry timestamps of one style.
SnapshotSeries build_snapshots(const std::vector<EdgeRecord>& records,
                               Window window, SnapshotMode mode,
                               const std::vector<long long>& boundaries = {});

struct SeriesOptions {
  std::string estimator_id = "H3";
  int k = 0;          // H3 block count, 0 picks round(sqrt(n_active))
  double eta = 0.01;  // H4
  estimators::GhatNorm norm = estimators::GhatNorm::configuration;
  int restarts = 3;
  std::uint64_t seed = 0;  // reused for every snapshot, so equal snapshots
                           // give equal rows
};

struct TimeseriesRow {
  std::string label;
  int n_active = 0;  // nodes with degree >= 1 in the snapshot
  double rho_hat = 0.0;
  double entropy = 0.0;
  std::optional<double> variance;
  bool skipped = false;
  std::string note;  // why the row carries no estimate
};

// One row per snapshot in time order.  Each snapshot is restricted to its
// active (degree >= 1) nodes before estimating; snapshots with fewer than 2
// active nodes, and estimator failures, produce flagged rows.
std::vector<TimeseriesRow> entropy_timeseries(const SnapshotSeries& series,
                                              const SeriesOptions& opt = {});

// Header records the options, then one line per row:
//   timestamp,n_active,rho_hat,entropy,variance,flag
void write_timeseries_csv(const std::vector<TimeseriesRow>& rows,
                          const SeriesOptions& opt, const std::string& path);

}  // namespace graphent::ingest
