#include "clickboost/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "clickboost/errors.hpp"
#include "clickboost/rng.hpp"
#include "clickboost/serial.hpp"

namespace clickboost {
namespace {

using json = nlohmann::ordered_json;

std::string kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::timestamp: return "timestamp";
    case ColumnKind::label: return "label";
  }
  return "?";
}

// One CSV record; honors double quotes, strips a trailing CR.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // CRLF line ending
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  *out = v;
  return true;
}

int weekday_from_civil(int y, int m, int d) {
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                     day{static_cast<unsigned>(d)}};
  weekday wd{sys_days{ymd}};
  return static_cast<int>(wd.iso_encoding()) - 1;  // 0 = Monday
}

bool try_parse_timestamp(const std::string& s, Timestamp* out) {
  Timestamp t;
  int n = std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%d", &t.year, &t.month,
                      &t.day, &t.hour, &t.minute, &t.second);
  if (n < 5) return false;
  if (n == 5) t.second = 0;
  if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31) return false;
  if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 ||
      t.second < 0 || t.second > 60)
    return false;
  t.weekday = weekday_from_civil(t.year, t.month, t.day);
  *out = t;
  return true;
}

std::string trim3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  while (s.find('.') != std::string::npos && (s.back() == '0')) s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

}  // namespace

void validate_schema(const std::vector<ColumnSchema>& schema) {
  if (schema.empty()) throw DataError("schema has no columns");
  std::set<std::string> names;
  int labels = 0;
  for (const auto& col : schema) {
    if (!names.insert(col.name).second)
      throw DataError("duplicate column name: " + col.name);
    if (col.kind == ColumnKind::label) ++labels;
  }
  if (labels != 1)
    throw DataError("schema must have exactly one label column, found " +
                    std::to_string(labels));
}

Timestamp parse_timestamp(const std::string& text) {
  Timestamp t;
  if (!try_parse_timestamp(text, &t))
    throw DataError("cannot parse timestamp '" + text + "'");
  return t;
}

int RawTable::label_column() const {
  for (int i = 0; i < n_cols(); ++i)
    if (schema[static_cast<std::size_t>(i)].kind == ColumnKind::label)
      return i;
  throw DataError("table has no label column");
}

std::vector<ColumnSchema> table1_schema() {
  return {
      {"Daily Time Spent on Site", ColumnKind::numeric},
      {"Age", ColumnKind::numeric},
      {"Area Income", ColumnKind::numeric},
      {"Daily Internet Usage", ColumnKind::numeric},
      {"Clicked on Ad", ColumnKind::label},
  };
}

std::vector<ColumnSchema> ad_full_schema() {
  return {
      {"Daily Time Spent on Site", ColumnKind::numeric},
      {"Age", ColumnKind::numeric},
      {"Area Income", ColumnKind::numeric},
      {"Daily Internet Usage", ColumnKind::numeric},
      {"Ad Topic Line", ColumnKind::categorical},
      {"City", ColumnKind::categorical},
      {"Male", ColumnKind::numeric},
      {"Country", ColumnKind::categorical},
      {"Timestamp", ColumnKind::timestamp},
      {"Clicked on Ad", ColumnKind::label},
  };
}

std::optional<std::vector<ColumnSchema>> schema_by_name(std::string_view name) {
  if (name == "table1") return table1_schema();
  if (name == "ad_full") return ad_full_schema();
  return std::nullopt;
}

RawTable parse_csv(std::istream& in, const std::vector<ColumnSchema>& schema,
                   std::string_view source_name) {
  validate_schema(schema);
  const std::string src(source_name);

  std::string line;
  if (!std::getline(in, line))
    throw DataError(src + ": empty file, expected a header row");
  std::vector<std::string> header = split_csv_line(line);

  std::vector<std::string> expected;
  expected.reserve(schema.size());
  for (const auto& col : schema) expected.push_back(col.name);
  if (header != expected) {
    auto join = [](const std::vector<std::string>& v) {
      std::string out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i];
      }
      return out;
    };
    throw DataError(src + ": header mismatch; expected [" + join(expected) +
                    "] but found [" + join(header) + "]");
  }

  RawTable table;
  table.schema = schema;
  int row_no = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row_no;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != schema.size())
      throw DataError(src + ": row " + std::to_string(row_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(schema.size()));
    std::vector<Cell> cells;
    cells.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const ColumnSchema& col = schema[c];
      const std::string& f = fields[c];
      switch (col.kind) {
        case ColumnKind::numeric: {
          double v;
          if (!parse_number(f, &v) || !std::isfinite(v))
            throw DataError(src + ": row " + std::to_string(row_no) +
                            ", column '" + col.name +
                            "': cannot parse numeric value '" + f + "'");
          cells.emplace_back(v);
          break;
        }
        case ColumnKind::label: {
          double v;
          if (!parse_number(f, &v))
            throw DataError(src + ": row " + std::to_string(row_no) +
                            ", column '" + col.name +
                            "': cannot parse label value '" + f + "'");
          if (v != 0.0 && v != 1.0)
            throw DataError(src + ": row " + std::to_string(row_no) +
                            ", column '" + col.name + "': label value '" + f +
                            "' is outside {0,1}");
          cells.emplace_back(v);
          break;
        }
        case ColumnKind::categorical:
          cells.emplace_back(f);
          break;
        case ColumnKind::timestamp: {
          Timestamp t;
          if (!try_parse_timestamp(f, &t))
            throw DataError(src + ": row " + std::to_string(row_no) +
                            ", column '" + col.name +
                            "': cannot parse timestamp '" + f + "'");
          cells.emplace_back(t);
          break;
        }
      }
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

RawTable load_csv(const std::filesystem::path& path,
                  const std::vector<ColumnSchema>& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  return parse_csv(in, schema, path.string());
}

std::string write_csv(const RawTable& table) {
  std::string out;
  auto field = [&](const std::string& s) {
    if (s.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char c : s) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    } else {
      out += s;
    }
  };
  for (std::size_t c = 0; c < table.schema.size(); ++c) {
    if (c) out += ',';
    field(table.schema[c].name);
  }
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (const double* v = std::get_if<double>(&row[c])) {
        out += serial::format_double(*v);
      } else if (const std::string* s = std::get_if<std::string>(&row[c])) {
        field(*s);
      } else {
        const Timestamp& t = std::get<Timestamp>(row[c]);
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d",
                      t.year, t.month, t.day, t.hour, t.minute, t.second);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

StatsSummary summarize(const RawTable& table) {
  if (table.n_rows() == 0) throw DataError("summarize: table has no rows");
  StatsSummary stats;
  for (int c = 0; c < table.n_cols(); ++c) {
    const ColumnSchema& col = table.schema[static_cast<std::size_t>(c)];
    if (col.kind != ColumnKind::numeric && col.kind != ColumnKind::label)
      continue;
    std::vector<double> vals;
    vals.reserve(table.rows.size());
    for (const auto& row : table.rows) {
      double v = std::get<double>(row[static_cast<std::size_t>(c)]);
      if (!std::isfinite(v))
        throw DataError("summarize: non-finite value in column '" + col.name +
                        "'");
      vals.push_back(v);
    }
    const double n = static_cast<double>(vals.size());
    ColumnStats cs;
    cs.name = col.name;
    cs.max = *std::max_element(vals.begin(), vals.end());
    cs.min = *std::min_element(vals.begin(), vals.end());
    double sum = 0;
    for (double v : vals) sum += v;
    cs.mean = sum / n;
    // population variance, two-pass
    double ss = 0;
    for (double v : vals) ss += (v - cs.mean) * (v - cs.mean);
    cs.variance = ss / n;
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    cs.median = (m % 2 == 1) ? sorted[m / 2]
                             : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    stats.columns.push_back(std::move(cs));
  }
  if (stats.columns.empty())
    throw DataError("summarize: table has no numeric columns");
  return stats;
}

std::string render_stats_table(const StatsSummary& stats) {
  const std::vector<std::string> headers = {"Variable Name", "Maximum",
                                            "Minimum",       "Mean",
                                            "Median",        "Variance"};
  std::vector<std::vector<std::string>> cells;
  cells.push_back(headers);
  for (const auto& c : stats.columns)
    cells.push_back({c.name, trim3(c.max), trim3(c.min), trim3(c.mean),
                     trim3(c.median), trim3(c.variance)});
  std::vector<std::size_t> width(headers.size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      if (i + 1 < row.size())
        out += std::string(width[i] - row[i].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

std::string stats_to_json(const StatsSummary& stats) {
  json arr = json::array();
  for (const auto& c : stats.columns) {
    arr.push_back(json{{"name", c.name},
                       {"max", c.max},
                       {"min", c.min},
                       {"mean", c.mean},
                       {"median", c.median},
                       {"variance", c.variance}});
  }
  return arr.dump(2) + "\n";
}

SplitIndices split_indices(Index n, const SplitSpec& spec) {
  if (n < 2) throw DataError("split: need at least 2 rows");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw DataError("split: train_fraction must lie in (0,1)");
  const auto train_n = static_cast<Index>(
      std::floor(spec.train_fraction * static_cast<double>(n) + 0.5));
  if (train_n < 1 || train_n >= n)
    throw DataError("split: fraction " +
                    serial::format_double(spec.train_fraction) + " leaves an " +
                    (train_n < 1 ? std::string("empty train")
                                 : std::string("empty test")) +
                    " partition at N = " + std::to_string(n));
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
  if (spec.shuffle) {
    Rng rng(spec.seed);
    rng.shuffle(idx);
  }
  SplitIndices out;
  out.train.assign(idx.begin(), idx.begin() + train_n);
  out.test.assign(idx.begin() + train_n, idx.end());
  return out;
}

FeatureMatrix take_rows(const FeatureMatrix& matrix,
                        const std::vector<int>& rows) {
  FeatureMatrix out;
  out.feature_names = matrix.feature_names;
  out.scaler = matrix.scaler;
  out.values.resize(static_cast<Index>(rows.size()), matrix.cols());
  out.labels.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Index>(i)) = matrix.values.row(rows[i]);
    out.labels(static_cast<Index>(i)) = matrix.labels(rows[i]);
  }
  return out;
}

std::pair<FeatureMatrix, FeatureMatrix> split(const FeatureMatrix& matrix,
                                              const SplitSpec& spec) {
  SplitIndices idx = split_indices(matrix.rows(), spec);
  return {take_rows(matrix, idx.train), take_rows(matrix, idx.test)};
}

}  // namespace clickboost
