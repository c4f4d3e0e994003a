#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <fstream>
#include <random>

#include "dtization/diagnostics.hpp"
#include "dtization/error.hpp"
#include "dtization/scalers.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace dtz {
namespace {

Dataset column(std::vector<double> values, std::vector<std::string> labels = {}) {
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  if (labels.empty()) return {{"f"}, x};
  return {{"f"}, x, "y", std::move(labels)};
}

bool bit_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a.data()[i]) != std::bit_cast<std::uint64_t>(b.data()[i])) return false;
  return true;
}

TEST(Fit, MinMaxParameters) {
  const auto s = fit(column({0, 5, 10}), ScalerMethod::minmax);
  const auto& p = std::get<MinMaxParams>(s.params);
  EXPECT_EQ(p.min(0), 0.0);
  EXPECT_EQ(p.max(0), 10.0);
}

TEST(Fit, LogShiftMakesArgumentsAtLeastOne) {
  const auto d = column({-2, 0, 7});
  const auto s = fit(d, ScalerMethod::log);
  EXPECT_EQ(std::get<LogParams>(s.params).shift(0), 3.0);
  const auto t = transform(s, d);
  EXPECT_EQ(t.features()(0, 0), 0.0);  // ln(1)
  EXPECT_DOUBLE_EQ(t.features()(1, 0), std::log(3.0));
  EXPECT_DOUBLE_EQ(t.features()(2, 0), std::log(10.0));
  // Positive columns are not shifted.
  EXPECT_EQ(std::get<LogParams>(fit(column({2, 3}), ScalerMethod::log).params).shift(0), 0.0);
}

TEST(Fit, StandardUsesPopulationStd) {
  const auto s = fit(column({1, 2, 3, 4}), ScalerMethod::standard);
  const auto& p = std::get<StandardParams>(s.params);
  EXPECT_EQ(p.mean(0), 2.5);
  EXPECT_DOUBLE_EQ(p.stddev(0), std::sqrt(1.25));
}

TEST(Fit, DtizationNeedsTarget) {
  EXPECT_THROW(fit(column({1, 2, 3}), ScalerMethod::dtization), ArgumentError);
}

TEST(Fit, DtizationOnWorkedExample) {
  const auto s = fit(column({1, 2, 10, 11}, {"a", "a", "b", "b"}), ScalerMethod::dtization);
  const auto& p = std::get<DtizationParams>(s.params);
  EXPECT_EQ(p.quartiles.q1(0), 1.75);
  EXPECT_EQ(p.quartiles.q3(0), 10.25);
  EXPECT_NEAR(p.factors.factors(0), 2.0, 1e-15);
  EXPECT_EQ(p.factors.first_depth[0], 1);
}

TEST(Transform, WorkedExamples) {
  const auto mm = fit(column({0, 5, 10}), ScalerMethod::minmax);
  const auto out = transform(mm, column({0, 5, 10}));
  EXPECT_EQ(out.features().col(0), Eigen::Vector3d(0, 0.5, 1));

  const auto robust = fit(column({1, 2, 3, 4}), ScalerMethod::robust);
  EXPECT_EQ(transform(robust, column({1.75, 3.25})).features().col(0), Eigen::Vector2d(0, 1));

  FittedScaler dt;
  dt.method = ScalerMethod::dtization;
  dt.feature_names = {"f"};
  ScalingFactorTable table;
  table.exponent = std::numbers::ln2;
  table.nf_total = 1;
  table.feature_names = {"f"};
  table.first_depth = {1};
  table.factors = Eigen::VectorXd::Constant(1, 2.0);
  dt.params = DtizationParams{RobustParams{Eigen::VectorXd::Constant(1, 1.75), Eigen::VectorXd::Constant(1, 3.25)},
                              table};
  EXPECT_EQ(transform(dt, column({3.25})).features()(0, 0), 2.0);
}

TEST(Transform, DegenerateColumnsBecomeZero) {
  const auto d = column({4, 4, 4, 4}, {"a", "b", "a", "b"});
  for (const auto m : all_scaler_methods()) {
    if (m == ScalerMethod::log) continue;  // log of a constant is a constant, not a division
    const auto out = transform(fit(d, m), d);
    EXPECT_TRUE((out.features().array() == 0.0).all()) << to_string(m);
  }
}

TEST(Transform, DoesNotMutateInputAndIsNotIdempotent) {
  std::mt19937_64 rng(4);
  const auto d = testing::structured_classification(rng, 60, 3, 3);
  const Eigen::MatrixXd before = d.features();
  for (const auto m : all_scaler_methods()) {
    const auto s = fit(d, m);
    const auto once = transform(s, d);
    EXPECT_TRUE(bit_equal(d.features(), before));
    const auto twice = transform(s, once);
    EXPECT_FALSE(bit_equal(once.features(), twice.features())) << to_string(m);
  }
}

TEST(Transform, DtizationIsFactorTimesRobust) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = testing::structured_classification(rng, 50 + trial, 1 + trial % 6, 3);
    for (const auto mode : {FactorMode::as_published, FactorMode::descending}) {
      const auto dt = fit(d, ScalerMethod::dtization, mode);
      const auto robust = fit(d, ScalerMethod::robust);
      const auto a = transform(dt, d).features();
      const auto b = transform(robust, d).features();
      const auto& factors = std::get<DtizationParams>(dt.params).factors;
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        const Eigen::VectorXd expected = factors.factors(j) * b.col(j).array();
        EXPECT_TRUE(bit_equal(a.col(j), expected));
        if (!factors.first_depth[j]) {
          EXPECT_TRUE(bit_equal(a.col(j), b.col(j)));
        }
      }
    }
  }
}

TEST(Transform, QuartilesMapToZeroAndFactor) {
  std::mt19937_64 rng(10);
  const auto d = testing::structured_classification(rng, 101, 4, 2);
  const auto s = fit(d, ScalerMethod::dtization);
  const auto& p = std::get<DtizationParams>(s.params);
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    const Eigen::Vector2d probe(p.quartiles.q1(j), p.quartiles.q3(j));
    const auto out = transform_column(s, j, probe);
    EXPECT_EQ(out(0), 0.0);
    EXPECT_DOUBLE_EQ(out(1), p.factors.factors(j));
  }
}

TEST(Transform, MissingFeatureThrowsExtraPassesThrough) {
  const auto s = fit(column({1, 2, 3}), ScalerMethod::minmax);
  const Dataset other({"g"}, Eigen::Vector3d(1, 2, 3));
  EXPECT_THROW(transform(s, other), DataError);

  Eigen::MatrixXd x(3, 2);
  x << 7, 1, 8, 2, 9, 3;
  const Dataset wider({"extra", "f"}, x);
  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](std::string_view m) { warnings.emplace_back(m); });
  const auto out = transform(s, wider);
  EXPECT_EQ(out.features().col(0), x.col(0));
  EXPECT_EQ(out.features().col(1), Eigen::Vector3d(0, 0.5, 1));
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Transform, MinMaxIsNotClippedOutsideTrainingRange) {
  const auto s = fit(column({0, 10}), ScalerMethod::minmax);
  EXPECT_EQ(transform(s, column({-5, 20})).features().col(0), Eigen::Vector2d(-0.5, 2.0));
}

class ScalerFile : public ::testing::Test {
 protected:
  fs::path dir = fs::temp_directory_path() / ("dtz_scaler_" + std::to_string(std::random_device{}()));
  void SetUp() override { fs::create_directories(dir); }
  void TearDown() override { fs::remove_all(dir); }
};

TEST_F(ScalerFile, RoundTripIsBitExact) {
  std::mt19937_64 rng(12);
  const auto d = testing::structured_classification(rng, 80, 5, 3);
  for (const auto m : all_scaler_methods()) {
    const auto s = fit(d, m, FactorMode::descending);
    save_scaler(s, dir / "s.dtz");
    const auto loaded = load_scaler(dir / "s.dtz");
    EXPECT_EQ(loaded.method, s.method);
    EXPECT_EQ(loaded.feature_names, s.feature_names);
    EXPECT_TRUE(bit_equal(transform(loaded, d).features(), transform(s, d).features())) << to_string(m);
  }
}

TEST_F(ScalerFile, TruncatedFileFails) {
  const auto s = fit(column({1, 2, 10, 11}, {"a", "a", "b", "b"}), ScalerMethod::dtization);
  const auto text = serialize_scaler(s);
  std::ofstream(dir / "cut.dtz") << text.substr(0, text.size() / 2);
  EXPECT_THROW(load_scaler(dir / "cut.dtz"), FormatError);
}

TEST_F(ScalerFile, UnknownMethodIsNamed) {
  auto text = serialize_scaler(fit(column({1, 2, 3}), ScalerMethod::robust));
  text.replace(text.find("\"robust\""), 8, "\"zscore\"");
  try {
    deserialize_scaler(text);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown method"), std::string::npos);
  }
}

TEST_F(ScalerFile, ChecksumAndVersionAreVerified) {
  auto text = serialize_scaler(fit(column({1, 2, 3}), ScalerMethod::minmax));
  auto tampered = text;
  const auto pos = tampered.find("\"f\"");
  tampered.replace(pos, 3, "\"g\"");
  try {
    deserialize_scaler(tampered);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("checksum mismatch"), std::string::npos);
  }
  auto versioned = text;
  versioned.replace(versioned.find("\"format_version\": 1"), 19, "\"format_version\": 2");
  try {
    deserialize_scaler(versioned);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version mismatch"), std::string::npos);
  }
  EXPECT_THROW(load_scaler(dir / "nope.dtz"), DataError);
}

TEST(Describe, FactorRows) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, 2, 0, 10, 0, 11, 0;
  const Dataset d({"f", "g"}, x, "y", std::vector<std::string>{"a", "a", "b", "b"});
  const auto text = describe(fit(d, ScalerMethod::dtization));
  EXPECT_NE(text.find("f depth=1 S=1.4142\n"), std::string::npos) << text;  // exp(ln2 / 2)
  EXPECT_NE(text.find("g depth=- S=1.0000\n"), std::string::npos) << text;
  EXPECT_LT(text.find("f depth="), text.find("g depth="));

  const auto single = describe(fit(column({1, 2, 10, 11}, {"a", "a", "b", "b"}), ScalerMethod::dtization));
  EXPECT_NE(single.find("f depth=1 S=2.0000\n"), std::string::npos) << single;
}

}  // namespace
}  // namespace dtz
