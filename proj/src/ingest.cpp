#include "graphent/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "graphent/errors.hpp"

namespace graphent::ingest {
namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> tokens;
  if (delim == 0) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) tokens.push_back(line.substr(start, i - start));
    }
  } else {
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = line.find(delim, start);
      const std::size_t stop = end == std::string::npos ? line.size() : end;
      std::string tok = line.substr(start, stop - start);
      // trim surrounding whitespace inside delimited fields
      while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front())))
        tok.erase(tok.begin());
      while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back())))
        tok.pop_back();
      if (!tok.empty()) tokens.push_back(std::move(tok));
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  return tokens;
}

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
  if (from >= to || to > s.size()) return false;
  for (std::size_t i = from; i < to; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

bool parse_timestamp(const std::string& tok, TimePoint& out) {
  // plain integer, optionally negative: an opaque ordered key
  const std::size_t digits_from = tok.size() > 1 && tok[0] == '-' ? 1 : 0;
  if (all_digits(tok, digits_from, tok.size())) {
    try {
      out = TimePoint{};
      out.raw = std::stoll(tok);
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }
  // ISO YYYY-MM or YYYY-MM-DD
  if (tok.size() < 7 || tok[4] != '-' || !all_digits(tok, 0, 4) ||
      !all_digits(tok, 5, 7))
    return false;
  out = TimePoint{};
  out.is_date = true;
  out.year = std::stoi(tok.substr(0, 4));
  out.month = std::stoi(tok.substr(5, 2));
  out.precision = 2;
  if (out.month < 1 || out.month > 12) return false;
  if (tok.size() == 7) return true;
  if (tok.size() != 10 || tok[7] != '-' || !all_digits(tok, 8, 10)) return false;
  out.day = std::stoi(tok.substr(8, 2));
  out.precision = 3;
  return out.day >= 1 && out.day <= 31;
}

std::string timestamp_string(const TimePoint& t) {
  if (!t.is_date) return std::to_string(t.raw);
  char buf[16];
  if (t.precision >= 3)
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", t.year, t.month, t.day);
  else
    std::snprintf(buf, sizeof buf, "%04d-%02d", t.year, t.month);
  return buf;
}

// key identifying a record for undirected dedup
std::string dedup_key(const EdgeRecord& r) {
  std::string key = r.u;
  key += '\x1f';
  key += r.v;
  if (r.t) {
    key += '\x1f';
    key += timestamp_string(*r.t);
  }
  return key;
}

long long bucket_key(const TimePoint& t, Window window) {
  if (window == Window::monthly)
    return t.is_date ? static_cast<long long>(t.year) * 12 + (t.month - 1) : t.raw;
  if (window == Window::yearly)
    return t.is_date ? t.year : t.raw;
  return t.ordinal();
}

std::string bucket_label(long long key, Window window, bool dated) {
  if (!dated) return std::to_string(key);
  char buf[16];
  if (window == Window::monthly) {
    std::snprintf(buf, sizeof buf, "%04lld-%02lld", key / 12, key % 12 + 1);
    return buf;
  }
  if (window == Window::yearly) {
    std::snprintf(buf, sizeof buf, "%04lld", key);
    return buf;
  }
  return std::to_string(key);
}

}  // namespace

ParseResult parse_edge_list(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_edge_list: cannot read " + path);

  ParseResult result;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!options.comment_prefix.empty() &&
        line.compare(0, options.comment_prefix.size(), options.comment_prefix) == 0)
      continue;
    std::vector<std::string> tokens = split(line, options.delimiter);
    if (tokens.empty()) continue;

    const std::size_t want = options.has_timestamps ? 3 : 2;
    if (tokens.size() != want) {
      result.malformed.emplace_back(line_no, line);
      continue;
    }
    EdgeRecord rec;
    rec.u = tokens[0];
    rec.v = tokens[1];
    if (options.has_timestamps) {
      TimePoint tp;
      if (!parse_timestamp(tokens[2], tp)) {
        result.malformed.emplace_back(line_no, line);
        continue;
      }
      rec.t = tp;
    }
    if (rec.u == rec.v) {
      ++result.self_loops_dropped;
      continue;
    }
    if (rec.v < rec.u) std::swap(rec.u, rec.v);
    if (!seen.insert(dedup_key(rec)).second) {
      ++result.duplicates_collapsed;
      continue;
    }
    result.records.push_back(std::move(rec));
  }

  if (result.records.empty() && !options.allow_empty)
    throw degenerate_input_error("parse_edge_list: no valid edges in " + path);
  return result;
}

void save_edge_records(const std::vector<EdgeRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_edge_records: cannot write " + path);
  for (const EdgeRecord& r : records) {
    out << r.u << ' ' << r.v;
    if (r.t) out << ' ' << timestamp_string(*r.t);
    out << '\n';
  }
}

SnapshotSeries build_snapshots(const std::vector<EdgeRecord>& records,
                               Window window, SnapshotMode mode,
                               const std::vector<long long>& boundaries) {
  if (records.empty())
    throw std::domain_error("build_snapshots: no records");
  for (const EdgeRecord& r : records)
    if (!r.t)
      throw std::domain_error("build_snapshots: records carry no timestamps");
  const bool dated = records.front().t->is_date;
  for (const EdgeRecord& r : records)
    if (r.t->is_date != dated)
      throw std::domain_error(
          "build_snapshots: mixed date and integer timestamps");

  SnapshotSeries series;
  std::unordered_map<std::string, int> index;
  auto node_of = [&](const std::string& tok) {
    auto [it, inserted] = index.emplace(tok, static_cast<int>(series.tokens.size()));
    if (inserted) series.tokens.push_back(tok);
    return it->second;
  };
  struct Item {
    long long key;
    int u, v;
  };
  std::vector<Item> items;
  items.reserve(records.size());
  for (const EdgeRecord& r : records) {
    const int u = node_of(r.u), v = node_of(r.v);
    items.push_back({bucket_key(*r.t, window), u, v});
  }

  if (window == Window::custom) {
    if (boundaries.empty())
      throw std::domain_error("build_snapshots: custom window needs boundaries");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
      if (boundaries[i] <= boundaries[i - 1])
        throw std::domain_error(
            "build_snapshots: boundaries must be strictly increasing");
    for (const Item& it : items)
      if (it.key > boundaries.back())
        throw std::domain_error(
            "build_snapshots: record beyond the last custom boundary");
    series.keys = boundaries;
  } else {
    std::set<long long> observed;
    for (const Item& it : items) observed.insert(it.key);
    series.keys.assign(observed.begin(), observed.end());
  }

  const int n = static_cast<int>(series.tokens.size());
  long long prev = 0;
  bool have_prev = false;
  for (long long key : series.keys) {
    Graph g(n);
    for (const Item& it : items) {
      const bool inside =
          mode == SnapshotMode::cumulative
              ? it.key <= key
              : (window == Window::custom
                     ? it.key <= key && (!have_prev || it.key > prev)
                     : it.key == key);
      if (inside) g.set_edge(it.u, it.v, true);
    }
    series.graphs.push_back(std::move(g));
    series.labels.push_back(bucket_label(key, window, dated));
    prev = key;
    have_prev = true;
  }
  return series;
}

std::vector<TimeseriesRow> entropy_timeseries(const SnapshotSeries& series,
                                              const SeriesOptions& opt) {
  if (series.graphs.empty())
    throw std::domain_error("entropy_timeseries: empty series");
  const std::string& id = opt.estimator_id;
  if (id != "H1" && id != "H2" && id != "H3" && id != "H4")
    throw std::domain_error("entropy_timeseries: unknown estimator " + id);

  std::vector<TimeseriesRow> rows;
  rows.reserve(series.graphs.size());
  for (std::size_t s = 0; s < series.graphs.size(); ++s) {
    const Graph& full = series.graphs[s];
    TimeseriesRow row;
    row.label = series.labels[s];

    const std::vector<int> deg = full.degrees();
    std::vector<int> active;
    for (int i = 0; i < full.n(); ++i)
      if (deg[i] > 0) active.push_back(i);
    row.n_active = static_cast<int>(active.size());

    if (row.n_active < 2) {
      row.skipped = true;
      row.note = "fewer than 2 active nodes";
      rows.push_back(std::move(row));
      continue;
    }

    Graph g(row.n_active);
    for (int a = 0; a < row.n_active; ++a)
      for (int b = a + 1; b < row.n_active; ++b)
        if (full.edge(active[a], active[b])) g.set_edge(a, b, true);

    try {
      estimators::EntropyEstimate est;
      if (id == "H1") {
        est = estimators::entropy_constant(g);
      } else if (id == "H2") {
        est = estimators::entropy_separable(g, opt.norm);
      } else if (id == "H3") {
        estimators::BlockOptions bo;
        bo.restarts = opt.restarts;
        bo.seed = opt.seed;
        est = estimators::entropy_blockmodel(g, opt.k, bo).first;
      } else {
        est = estimators::entropy_lowrank(g, opt.eta);
      }
      row.rho_hat = est.rho_hat;
      row.entropy = est.value;
      row.variance = est.variance;
    } catch (const std::exception& err) {
      row.skipped = true;
      row.note = err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_timeseries_csv(const std::vector<TimeseriesRow>& rows,
                          const SeriesOptions& opt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_timeseries_csv: cannot write " + path);
  out << "# estimator=" << opt.estimator_id << " k=" << opt.k
      << " eta=" << fmt(opt.eta) << " ghat_norm="
      << (opt.norm == estimators::GhatNorm::paper ? "paper" : "configuration")
      << " restarts=" << opt.restarts << " seed=" << opt.seed << '\n';
  out << "timestamp,n_active,rho_hat,entropy,variance,flag\n";
  for (const TimeseriesRow& r : rows) {
    out << r.label << ',' << r.n_active << ',';
    if (r.skipped) {
      std::string note = r.note;
      for (char& ch : note)
        if (ch == ',' || ch == '\n') ch = ';';
      out << ",,," << note << '\n';
    } else {
      out << fmt(r.rho_hat) << ',' << fmt(r.entropy) << ',';
      if (r.variance) out << fmt(*r.variance);
      out << ",\n";
    }
  }
}

}  // namespace graphent::ingest
