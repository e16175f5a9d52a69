#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensorfault/series.hpp"

namespace sensorfault {

/// Parses "2007-06-22T00:10:00Z" (also with a space separator and/or without
/// the trailing Z) or a bare integer epoch. Returns nullopt on malformed input.
std::optional<Timestamp> parse_timestamp(std::string_view text);
/// ISO-8601 UTC, second resolution, trailing 'Z'.
std::string format_timestamp(Timestamp t);

/// Header names for the four reading columns.
struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string node_column = "node_id";
  std::string modality_column = "modality";
  std::string value_column = "value";
  /// When unset the nominal interval is inferred per series.
  std::optional<Seconds> nominal_interval;
  /// Longest run of missing samples repaired by interpolation; longer runs
  /// split the series.
  std::size_t max_interpolated_gap = 3;
};

struct IngestNote {
  std::string node_id;
  Modality modality = Modality::BoxTemperature;
  std::size_t interpolated = 0;  // samples filled by linear interpolation
  std::size_t segments = 1;      // >1 when long gaps split the series
  std::size_t trimmed = 0;       // missing values dropped at the series edges
};

struct IngestResult {
  std::vector<Series> series;  // ordered by (node_id, modality, start_time)
  std::vector<IngestNote> notes;

  std::size_t total_interpolated() const;
};

IngestResult ingest_csv(std::istream& in, const CsvSchema& schema = {});
IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes the ingestion schema. Values use round-trip precision.
void write_series_csv(std::ostream& out, const std::vector<Series>& series);

std::vector<PrecipRecord> read_precipitation_csv(std::istream& in);
std::vector<PrecipRecord> read_precipitation_csv(const std::filesystem::path& path);
void write_precipitation_csv(std::ostream& out, const std::vector<PrecipRecord>& records);

std::vector<EventWindow> read_events_csv(std::istream& in);
std::vector<EventWindow> read_events_csv(const std::filesystem::path& path);
void write_events_csv(std::ostream& out, const std::vector<EventWindow>& events);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

namespace csv {

std::vector<std::string> split_row(std::string_view line);
std::string_view trim(std::string_view s);

}  // namespace csv

}  // namespace sensorfault
