#include "sensorfault/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include "sensorfault/error.hpp"

namespace sensorfault {

namespace csv {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

}  // namespace csv

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  text = csv::trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

bool is_blank_or_comment(std::string_view line) {
  line = csv::trim(line);
  return line.empty() || line.front() == '#';
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadInputFile, "cannot open '" + path.string() + "'");
  return in;
}

struct Header {
  std::vector<std::string> names;

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorCode::BadInputFile, "missing CSV column '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  }
};

std::optional<Header> read_header(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    return Header{csv::split_row(line)};
  }
  return std::nullopt;
}

// A value cell that is empty or not a finite number counts as missing.
std::optional<double> parse_reading(std::string_view text, bool& malformed) {
  text = csv::trim(text);
  malformed = false;
  if (text.empty() || text == "NA" || text == "na" || text == "null") return std::nullopt;
  if (text == "nan" || text == "NaN" || text == "NAN") return std::nullopt;
  auto v = parse_number<double>(text);
  if (!v) {
    malformed = true;
    return std::nullopt;
  }
  if (!std::isfinite(*v)) return std::nullopt;
  return v;
}

struct Row {
  Timestamp time;
  std::optional<double> value;
};

Seconds infer_interval(const std::vector<Row>& rows, const std::string& label) {
  std::map<Seconds, std::size_t> counts;
  for (std::size_t i = 1; i < rows.size(); ++i) ++counts[rows[i].time - rows[i - 1].time];
  Seconds best = 0;
  std::size_t best_count = 0;
  for (const auto& [d, c] : counts) {
    if (c > best_count) {
      best = d;
      best_count = c;
    }
  }
  // Jittered timestamps still count towards the nominal spacing.
  std::size_t near_nominal = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Seconds d = rows[i].time - rows[i - 1].time;
    if (std::abs(static_cast<double>(d - best)) <= 0.01 * static_cast<double>(best)) ++near_nominal;
  }
  if (2 * near_nominal <= rows.size() - 1) {
    throw Error(ErrorCode::UnsupportedData,
                label + ": no dominant sample interval (irregular spacing)");
  }
  return best;
}

void build_series(const std::string& node, Modality modality, const std::vector<Row>& rows,
                  const CsvSchema& schema, IngestResult& result) {
  const std::string label = "series '" + node + "/" + std::string(to_string(modality)) + "'";
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].time <= rows[i - 1].time) {
      throw Error(ErrorCode::UnsupportedData, label + ": timestamps are not strictly increasing");
    }
  }

  Seconds nominal = 0;
  if (schema.nominal_interval) {
    nominal = *schema.nominal_interval;
    if (nominal <= 0) throw Error(ErrorCode::BadParameter, "nominal interval must be > 0");
  } else if (rows.size() >= 2) {
    nominal = infer_interval(rows, label);
  } else {
    throw Error(ErrorCode::UnsupportedData, label + ": a single row does not define a sample interval");
  }

  // Place rows on the nominal grid; absent rows become missing slots.
  std::vector<std::optional<double>> slots;
  slots.push_back(rows.front().value);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = static_cast<double>(rows[i].time - rows[i - 1].time);
    const double steps = std::round(d / static_cast<double>(nominal));
    if (steps < 1.0 || std::abs(d - steps * static_cast<double>(nominal)) > 0.01 * static_cast<double>(nominal)) {
      throw Error(ErrorCode::UnsupportedData,
                  label + ": spacing of " + std::to_string(static_cast<long long>(d)) +
                      " s is not a multiple of the " + std::to_string(nominal) + " s interval");
    }
    for (long long k = 1; k < static_cast<long long>(steps); ++k) slots.emplace_back(std::nullopt);
    slots.push_back(rows[i].value);
  }

  IngestNote note{node, modality, 0, 0, 0};
  std::size_t first = 0;
  while (first < slots.size() && !slots[first]) ++first;
  if (first == slots.size()) throw Error(ErrorCode::EmptyInput, label + ": every value is missing");
  std::size_t last = slots.size() - 1;
  while (!slots[last]) --last;
  note.trimmed = first + (slots.size() - 1 - last);

  const Timestamp grid_start = rows.front().time;
  auto start_segment = [&](std::size_t slot) {
    Series s;
    s.node_id = node;
    s.modality = modality;
    s.sample_interval = nominal;
    s.start_time = grid_start + static_cast<Timestamp>(slot) * nominal;
    return s;
  };

  Series current = start_segment(first);
  std::size_t k = first;
  while (k <= last) {
    if (slots[k]) {
      current.values.push_back(*slots[k]);
      ++k;
      continue;
    }
    std::size_t gap_end = k;
    while (!slots[gap_end]) ++gap_end;  // slots[last] is present, so this terminates
    const std::size_t gap = gap_end - k;
    if (gap <= schema.max_interpolated_gap) {
      const double lo = *slots[k - 1];
      const double hi = *slots[gap_end];
      for (std::size_t g = 1; g <= gap; ++g) {
        const double frac = static_cast<double>(g) / static_cast<double>(gap + 1);
        current.values.push_back(lo + (hi - lo) * frac);
      }
      note.interpolated += gap;
    } else {
      result.series.push_back(std::move(current));
      ++note.segments;
      current = start_segment(gap_end);
    }
    k = gap_end;
  }
  result.series.push_back(std::move(current));
  ++note.segments;
  result.notes.push_back(note);
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = csv::trim(text);
  if (text.empty()) return std::nullopt;
  if (text.find_first_of(":T ") == std::string_view::npos) return parse_number<Timestamp>(text);
  // YYYY-MM-DD[T ]hh:mm:ss[Z]
  if (text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  auto field = [&](std::size_t pos, std::size_t len) { return parse_number<int>(text.substr(pos, len)); };
  auto y = field(0, 4), mo = field(5, 2), d = field(8, 2), h = field(11, 2), mi = field(14, 2), s = field(17, 2);
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  if (*h > 23 || *mi > 59 || *s > 59) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + *h * 3600 + *mi * 60 + *s;
}

std::string format_timestamp(Timestamp t) {
  Timestamp days = t / 86400;
  Timestamp secs = t % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::size_t IngestResult::total_interpolated() const {
  std::size_t n = 0;
  for (const auto& note : notes) n += note.interpolated;
  return n;
}

IngestResult ingest_csv(std::istream& in, const CsvSchema& schema) {
  auto header = read_header(in);
  if (!header) throw Error(ErrorCode::EmptyInput, "CSV has no header");
  const std::size_t ts_col = header->index_of(schema.timestamp_column);
  const std::size_t node_col = header->index_of(schema.node_column);
  const std::size_t mod_col = header->index_of(schema.modality_column);
  const std::size_t val_col = header->index_of(schema.value_column);
  const std::size_t needed = std::max({ts_col, node_col, mod_col, val_col}) + 1;

  std::map<std::pair<std::string, Modality>, std::vector<Row>> groups;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto fields = csv::split_row(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() < needed) throw Error(ErrorCode::BadInputFile, where + ": too few columns");
    auto ts = parse_timestamp(fields[ts_col]);
    if (!ts) throw Error(ErrorCode::BadInputFile, where + ": bad timestamp '" + fields[ts_col] + "'");
    auto modality = parse_modality(fields[mod_col]);
    if (!modality) throw Error(ErrorCode::BadInputFile, where + ": unknown modality '" + fields[mod_col] + "'");
    if (fields[node_col].empty()) throw Error(ErrorCode::BadInputFile, where + ": empty node id");
    bool malformed = false;
    auto value = parse_reading(fields[val_col], malformed);
    if (malformed) throw Error(ErrorCode::BadInputFile, where + ": bad value '" + fields[val_col] + "'");
    groups[{fields[node_col], *modality}].push_back(Row{*ts, value});
  }
  if (groups.empty()) throw Error(ErrorCode::EmptyInput, "CSV has no data rows");

  IngestResult result;
  for (const auto& [key, rows] : groups) build_series(key.first, key.second, rows, schema, result);
  return result;
}

IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  auto in = open_or_throw(path);
  return ingest_csv(in, schema);
}

void write_series_csv(std::ostream& out, const std::vector<Series>& series) {
  out << "timestamp,node_id,modality,value\n";
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      out << format_timestamp(s.time_at(k)) << ',' << s.node_id << ',' << to_string(s.modality) << ','
          << format_double(s.values[k]) << '\n';
    }
  }
}

std::vector<PrecipRecord> read_precipitation_csv(std::istream& in) {
  auto header = read_header(in);
  if (!header) return {};
  const std::size_t ts_col = header->index_of("timestamp");
  const std::size_t amt_col = header->index_of("amount_mm");
  std::vector<PrecipRecord> records;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto fields = csv::split_row(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() <= std::max(ts_col, amt_col)) throw Error(ErrorCode::BadInputFile, where + ": too few columns");
    auto ts = parse_timestamp(fields[ts_col]);
    auto amount = parse_number<double>(fields[amt_col]);
    if (!ts || !amount || !std::isfinite(*amount) || *amount < 0.0) {
      throw Error(ErrorCode::BadInputFile, where + ": bad precipitation record");
    }
    if (!records.empty() && *ts <= records.back().time) {
      throw Error(ErrorCode::BadInputFile, where + ": precipitation records must be sorted by time");
    }
    records.push_back({*ts, *amount});
  }
  return records;
}

std::vector<PrecipRecord> read_precipitation_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_precipitation_csv(in);
}

void write_precipitation_csv(std::ostream& out, const std::vector<PrecipRecord>& records) {
  out << "timestamp,amount_mm\n";
  for (const auto& r : records) out << format_timestamp(r.time) << ',' << format_double(r.amount) << '\n';
}

std::vector<EventWindow> read_events_csv(std::istream& in) {
  auto header = read_header(in);
  if (!header) return {};
  const std::size_t start_col = header->index_of("start");
  const std::size_t end_col = header->index_of("end");
  std::vector<EventWindow> events;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto fields = csv::split_row(line);
    if (fields.size() <= std::max(start_col, end_col)) {
      throw Error(ErrorCode::BadInputFile, "line " + std::to_string(line_no) + ": too few columns");
    }
    auto start = parse_timestamp(fields[start_col]);
    auto end = parse_timestamp(fields[end_col]);
    if (!start || !end) throw Error(ErrorCode::BadInputFile, "line " + std::to_string(line_no) + ": bad timestamp");
    events.push_back({*start, *end});
  }
  try {
    validate_events(events);
  } catch (const Error& e) {
    throw Error(ErrorCode::BadInputFile, std::string("event CSV: ") + e.what());
  }
  return events;
}

std::vector<EventWindow> read_events_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_events_csv(in);
}

void write_events_csv(std::ostream& out, const std::vector<EventWindow>& events) {
  out << "start,end\n";
  for (const auto& e : events) out << format_timestamp(e.start) << ',' << format_timestamp(e.end) << '\n';
}

}  // namespace sensorfault
