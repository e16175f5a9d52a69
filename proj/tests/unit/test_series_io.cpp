#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "sensorfault/csv_io.hpp"
#include "sensorfault/error.hpp"

namespace sensorfault {
namespace {

using testing::code_of;
using testing::make_series;

IngestResult ingest_text(const std::string& text, const CsvSchema& schema = {}) {
  std::istringstream in(text);
  return ingest_csv(in, schema);
}

TEST(Series, TimeAndSlice) {
  const auto s = make_series({1, 2, 3, 4}, 600, 100);
  EXPECT_EQ(s.time_at(2), 1300);
  EXPECT_EQ(s.end_time(), 2500);
  const auto t = s.slice(1, 2);
  EXPECT_EQ(t.start_time, 700);
  EXPECT_EQ(t.values, (std::vector<double>{2, 3}));
  EXPECT_THROW(s.slice(3, 2), Error);
}

TEST(Series, ValidateRejectsBadInterval) {
  auto s = make_series({1, 2}, 0);
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::BadParameter);
}

TEST(Series, ModalityNames) {
  EXPECT_EQ(to_string(Modality::BoxTemperature), "box_temp");
  EXPECT_EQ(parse_modality("soil_moisture"), Modality::SoilMoisture);
  EXPECT_FALSE(parse_modality("air"));
}

TEST(Series, ValidateEvents) {
  EXPECT_NO_THROW(validate_events({{0, 10}, {10, 20}}));
  EXPECT_THROW(validate_events({{0, 10}, {5, 20}}), Error);
  EXPECT_THROW(validate_events({{10, 10}}), Error);
  EXPECT_THROW(validate_events({{20, 30}, {0, 10}}), Error);
}

TEST(IndexSet, Operations) {
  using namespace index_set;
  EXPECT_EQ(normalized({5, 1, 5, 3}), (IndexSet{1, 3, 5}));
  EXPECT_EQ(set_union({1, 3}, {2, 3}), (IndexSet{1, 2, 3}));
  EXPECT_EQ(set_intersection({1, 3, 5}, {3, 4, 5}), (IndexSet{3, 5}));
  EXPECT_EQ(set_difference({1, 3, 5}, {3}), (IndexSet{1, 5}));
  EXPECT_TRUE(contains({1, 3}, 3));
  EXPECT_FALSE(contains({1, 3}, 2));
  EXPECT_TRUE(is_subset({1}, {1, 2}));
  EXPECT_FALSE(is_subset({0}, {1, 2}));
}

TEST(GroundTruth, Indices) {
  GroundTruthLabels g{{2, 9}, {{3, 2}, {7, 3}}};
  EXPECT_EQ(g.noise_indices(), (IndexSet{3, 4, 7, 8, 9}));
  EXPECT_EQ(g.all_indices(), (IndexSet{2, 3, 4, 7, 8, 9}));
}

TEST(Timestamp, ParseAndFormat) {
  EXPECT_EQ(parse_timestamp("2007-06-22T00:00:00Z"), 1182470400);
  EXPECT_EQ(parse_timestamp("2007-06-22 00:10:00"), 1182471000);
  EXPECT_EQ(parse_timestamp("1182470400"), 1182470400);
  EXPECT_FALSE(parse_timestamp("2007-13-01T00:00:00Z"));
  EXPECT_FALSE(parse_timestamp("yesterday"));
  EXPECT_EQ(format_timestamp(1182470400), "2007-06-22T00:00:00Z");
  for (Timestamp t : {Timestamp{0}, Timestamp{951782400}, Timestamp{4102444799}}) {
    EXPECT_EQ(parse_timestamp(format_timestamp(t)), t);
  }
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 25.0, -1e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.25), "0.25");
}

TEST(Csv, SplitAndTrim) {
  EXPECT_EQ(csv::split_row("a, b ,c"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(csv::trim("  x \r"), "x");
}

TEST(Ingest, ThreeRowsOneSeries) {
  const auto r = ingest_text(
      "timestamp,node_id,modality,value\n"
      "2007-06-22T00:00:00Z,n5,soil_moisture,0.20\n"
      "2007-06-22T00:10:00Z,n5,soil_moisture,0.21\n"
      "2007-06-22T00:20:00Z,n5,soil_moisture,0.22\n");
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.series[0].node_id, "n5");
  EXPECT_EQ(r.series[0].modality, Modality::SoilMoisture);
  EXPECT_EQ(r.series[0].sample_interval, 600);
  EXPECT_EQ(r.series[0].values.size(), 3u);
  EXPECT_EQ(r.total_interpolated(), 0u);
}

TEST(Ingest, MissingTimestampIsInterpolated) {
  const auto r = ingest_text(
      "timestamp,node_id,modality,value\n"
      "0,n5,soil_moisture,0.20\n"
      "600,n5,soil_moisture,0.20\n"
      "1800,n5,soil_moisture,0.30\n"
      "2400,n5,soil_moisture,0.30\n");
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.series[0].values, (std::vector<double>{0.20, 0.20, 0.25, 0.30, 0.30}));
  EXPECT_EQ(r.total_interpolated(), 1u);
}

TEST(Ingest, AlternatingSpacingIsIrregular) {
  EXPECT_EQ(code_of([] {
              ingest_text(
                  "timestamp,node_id,modality,value\n"
                  "0,n1,box_temp,1\n600,n1,box_temp,1\n1800,n1,box_temp,1\n2400,n1,box_temp,1\n3600,n1,box_temp,1\n");
            }),
            ErrorCode::UnsupportedData);
}

TEST(Ingest, LongGapSplitsAndEdgesTrim) {
  std::string text = "timestamp,node_id,modality,value\n0,n1,box_temp,\n";
  for (int k = 1; k <= 3; ++k) text += std::to_string(600 * k) + ",n1,box_temp," + std::to_string(k) + "\n";
  for (int k = 8; k <= 10; ++k) text += std::to_string(600 * k) + ",n1,box_temp," + std::to_string(k) + "\n";
  text += "6600,n1,box_temp,NA\n";
  const auto r = ingest_text(text);
  ASSERT_EQ(r.series.size(), 2u);
  EXPECT_EQ(r.series[0].start_time, 600);
  EXPECT_EQ(r.series[0].values.size(), 3u);
  EXPECT_EQ(r.series[1].start_time, 4800);
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_EQ(r.notes[0].segments, 2u);
  EXPECT_EQ(r.notes[0].trimmed, 2u);
}

TEST(Ingest, Errors) {
  EXPECT_EQ(code_of([] { ingest_text("timestamp,node_id,modality,value\n0,n1,box_temp,abc\n600,n1,box_temp,1\n"); }),
            ErrorCode::BadInputFile);
  EXPECT_EQ(code_of([] { ingest_text("timestamp,node,modality,value\n0,n1,box_temp,1\n"); }),
            ErrorCode::BadInputFile);
  EXPECT_EQ(code_of([] { ingest_text("timestamp,node_id,modality,value\n0,n1,box_temp,\n600,n1,box_temp,NA\n"); }),
            ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { ingest_text("timestamp,node_id,modality,value\n"); }), ErrorCode::EmptyInput);
}

TEST(Ingest, WriteReadRoundTrip) {
  auto a = make_series({0.1, 1.0 / 3.0, 25.5}, 600, 1182470400, Modality::SoilMoisture, "n2");
  auto b = make_series({20.25, 21.0}, 1200, 1182470400, Modality::BoxTemperature, "n1");
  std::ostringstream out;
  write_series_csv(out, {a, b});
  const auto r = ingest_text(out.str());
  ASSERT_EQ(r.series.size(), 2u);
  EXPECT_EQ(r.series[0].values, b.values);
  EXPECT_EQ(r.series[0].sample_interval, 1200);
  EXPECT_EQ(r.series[1].values, a.values);
  EXPECT_EQ(r.series[1].start_time, a.start_time);
}

TEST(PrecipCsv, RoundTrip) {
  std::vector<PrecipRecord> recs{{900, 0.0}, {1800, 1.25}, {2700, 0.1}};
  std::ostringstream out;
  write_precipitation_csv(out, recs);
  std::istringstream in(out.str());
  const auto back = read_precipitation_csv(in);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[1].time, 1800);
  EXPECT_EQ(back[1].amount, 1.25);
}

TEST(PrecipCsv, RejectsNegativeAndUnordered) {
  std::istringstream neg("timestamp,amount_mm\n900,-1\n");
  EXPECT_THROW(read_precipitation_csv(neg), Error);
  std::istringstream unordered("timestamp,amount_mm\n1800,1\n900,1\n");
  EXPECT_THROW(read_precipitation_csv(unordered), Error);
}

TEST(EventsCsv, RoundTrip) {
  std::vector<EventWindow> ev{{1182470400, 1182474000}, {1182480000, 1182483600}};
  std::ostringstream out;
  write_events_csv(out, ev);
  std::istringstream in(out.str());
  EXPECT_EQ(read_events_csv(in), ev);
}

TEST(Errors, CategoriesMapToExitCodes) {
  EXPECT_EQ(static_cast<int>(category_of(ErrorCode::BadParameter)), 2);
  EXPECT_EQ(static_cast<int>(category_of(ErrorCode::DegeneratePlan)), 2);
  EXPECT_EQ(static_cast<int>(category_of(ErrorCode::BadInputFile)), 3);
  EXPECT_EQ(static_cast<int>(category_of(ErrorCode::UnusableNeighbor)), 4);
}

}  // namespace
}  // namespace sensorfault
