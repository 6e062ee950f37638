#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "stlrob/dynamics.hpp"
#include "stlrob/signal.hpp"

using namespace stlrob;

namespace {

Trace read(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

}  // namespace

TEST(Normalize, RobotAndBatteryRanges) {
  const NormalizationMap map{{"battery", {0, 100}}, {"x", {0, 10}}};
  const Trace raw = Trace::from_columns({"battery", "x"}, {{80, 0, 100}, {6, 10, 0}});
  const Trace n = normalize(raw, map);
  EXPECT_DOUBLE_EQ(n.at(0, "battery"), 0.6);
  EXPECT_DOUBLE_EQ(n.at(0, "x"), 0.2);
  EXPECT_EQ(n.at(1, "battery"), -1.0);
  EXPECT_EQ(n.at(2, "battery"), 1.0);
  EXPECT_EQ(n.at(2, "x"), -1.0);
}

TEST(Normalize, OutOfRangeNamesChannelAndStep) {
  const NormalizationMap map{{"x", {0, 10}}};
  try {
    normalize(Trace::from_columns({"x"}, {{1, 2, 10.5}}), map);
    FAIL();
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'x'"), std::string::npos);
    EXPECT_NE(msg.find("step 2"), std::string::npos);
  }
}

TEST(Normalize, DegenerateAndMissingRanges) {
  const Trace raw = Trace::from_columns({"x"}, {{1}});
  EXPECT_THROW(normalize(raw, {{"x", {3, 3}}}), DomainError);
  EXPECT_THROW(normalize(raw, {{"x", {4, 3}}}), DomainError);
  EXPECT_THROW(normalize(raw, {{"y", {0, 3}}}), DomainError);
}

TEST(Normalize, InverseAndMonotone) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const double lo = std::uniform_real_distribution<double>(-100, 100)(rng);
    const double hi = lo + std::uniform_real_distribution<double>(1e-3, 200)(rng);
    const NormalizationMap map{{"v", {lo, hi}}};
    std::vector<double> col(30);
    for (double& v : col) v = std::uniform_real_distribution<double>(lo, hi)(rng);
    std::sort(col.begin(), col.end());
    const Trace raw = Trace::from_columns({"v"}, {col});
    const Trace n = normalize(raw, map);
    const Trace back = denormalize(n, map);
    for (std::size_t t = 0; t < col.size(); ++t) {
      EXPECT_NEAR(back.at(t, 0), col[t], 1e-12 * std::max(1.0, std::abs(col[t])));
      EXPECT_GE(n.at(t, 0), -1.0);
      EXPECT_LE(n.at(t, 0), 1.0);
      if (t > 0 && col[t] > col[t - 1]) {
        EXPECT_GT(n.at(t, 0), n.at(t - 1, 0));
      }
    }
  }
}

TEST(TraceCsv, ReadsTwoRows) {
  const Trace s = read("t,s\n0,0.5\n1,-0.25\n");
  EXPECT_EQ(s.length(), 2u);
  EXPECT_EQ(s.width(), 1u);
  EXPECT_EQ(s.at(1, "s"), -0.25);
}

TEST(TraceCsv, SchemaErrors) {
  EXPECT_THROW(read("t,s\n"), FormatError);
  EXPECT_THROW(read(""), FormatError);
  EXPECT_THROW(read("step,s\n0,1\n"), FormatError);
  EXPECT_THROW(read("t,s\n0,1,2\n"), FormatError);
  EXPECT_THROW(read("t,a,b\n0,1\n"), FormatError);
  EXPECT_THROW(read("t,s\n0,abc\n"), FormatError);
  EXPECT_THROW(read("t,s\n0,1\n2,1\n"), FormatError);
  EXPECT_THROW(read("t,s\n1,1\n"), FormatError);
  EXPECT_THROW(read("t,s,s\n0,1,1\n"), DomainError);
}

TEST(TraceCsv, TrajectoryDumpRoundTrips) {
  const SystemModel m =
      make_model("unicycle", {0.5, 5, 0}, Box{{{0, 10}, {0, 10}, {-6.28, 6.28}}},
                 Box{{{-1.3, 1.3}, {-1.3, 1.3}}}, {{"x", 0}, {"y", 1}});
  const auto q = simulate(m, {{1.0, 0.3}, {0.7, -0.2}, {1.3, 1.1}, {0.1, 0.0}});
  const Trace dump = trajectory_table(m, q);
  ASSERT_EQ(dump.length(), 5u);
  ASSERT_EQ(dump.width(), 3u);
  const auto path = std::filesystem::temp_directory_path() / "stlrob_roundtrip.csv";
  save_trace(path, dump);
  EXPECT_EQ(load_trace(path), dump);
  std::filesystem::remove(path);
  EXPECT_THROW(load_trace(path), FormatError);
}

TEST(TraceType, Invariants) {
  EXPECT_THROW(Trace({}, {}), DomainError);
  EXPECT_THROW(Trace({"a", "b"}, {1, 2, 3}), DomainError);
  EXPECT_THROW(Trace::from_columns({"a", "b"}, {{1, 2}, {1}}), DomainError);
  const Trace s = Trace::from_columns({"a", "b"}, {{1, 2}, {3, 4}});
  EXPECT_EQ(s.at(1, "b"), 4);
  EXPECT_EQ(s.column(0), (std::vector<double>{1, 2}));
  EXPECT_THROW(s.channel_index("c"), DomainError);
}
