#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "dtization/dataset.hpp"
#include "dtization/diagnostics.hpp"
#include "dtization/error.hpp"
#include "dtization/quartiles.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace dtz {
namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("dtz_test_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& contents) const {
    std::ofstream(path_ / name, std::ios::binary) << contents;
    return path_ / name;
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

TEST(Quartiles, WorkedExamples) {
  const auto q = quartiles(Eigen::Vector4d(1, 2, 3, 4));
  EXPECT_EQ(q.q1, 1.75);
  EXPECT_EQ(q.q3, 3.25);

  const auto single = quartiles(Eigen::VectorXd::Constant(1, 5.0));
  EXPECT_EQ(single.q1, 5.0);
  EXPECT_EQ(single.q3, 5.0);
  EXPECT_EQ(single.iqr(), 0.0);

  const auto constant = quartiles(Eigen::Vector4d(7, 7, 7, 7));
  EXPECT_EQ(constant.q1, 7.0);
  EXPECT_EQ(constant.q3, 7.0);
}

TEST(Quartiles, EmptyInputThrows) { EXPECT_THROW(quartiles(Eigen::VectorXd(0)), ArgumentError); }

TEST(Quartiles, MatchesBruteForceAndIsPermutationInvariant) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(1, 1000);
  std::normal_distribution<double> gauss(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = trial % 3 == 0 ? std::round(gauss(rng) / 10.0) : gauss(rng);
    const Eigen::Map<Eigen::VectorXd> view(v.data(), static_cast<Eigen::Index>(v.size()));
    const auto q = quartiles(view);
    EXPECT_EQ(q.q1, testing::brute_quantile(v, 0.25));
    EXPECT_EQ(q.q3, testing::brute_quantile(v, 0.75));
    EXPECT_LE(q.q1, q.q3);

    std::shuffle(v.begin(), v.end(), rng);
    const auto shuffled = quartiles(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    EXPECT_EQ(shuffled.q1, q.q1);
    EXPECT_EQ(shuffled.q3, q.q3);
  }
}

TEST(Quartiles, ConstantListAnyLength) {
  for (int n = 1; n < 50; ++n) {
    const auto q = quartiles(Eigen::VectorXd::Constant(n, -3.5));
    EXPECT_EQ(q.q1, -3.5);
    EXPECT_EQ(q.q3, -3.5);
  }
}

TEST(Dataset, RejectsBadConstruction) {
  EXPECT_THROW(Dataset({"a", "a"}, Eigen::MatrixXd::Zero(2, 2)), DataError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 1);
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Dataset({"a"}, bad), DataError);
  EXPECT_THROW(Dataset({"a"}, Eigen::MatrixXd(0, 1)), DataError);
  EXPECT_THROW(Dataset({"a"}, Eigen::MatrixXd::Zero(2, 1), "y", std::vector<std::string>{"x"}), ArgumentError);
}

TEST(LoadCsv, BasicNumericTable) {
  TempDir dir;
  const auto path = dir.file("t.csv", "a,b,y\n1,2,x\n3,4,y\n5,6,x\n7,8,z\n");
  LoadReport report;
  const auto d = load_csv(path, "y", TaskKind::classification, &report);
  EXPECT_EQ(d.rows(), 4);
  EXPECT_EQ(d.cols(), 2);
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.labels()[3], "z");
  EXPECT_EQ(d.features()(2, 1), 6.0);
  EXPECT_TRUE(report.dropped_columns.empty());
  EXPECT_EQ(report.dropped_rows, 0u);
}

TEST(LoadCsv, DropsTextColumnWithWarning) {
  TempDir dir;
  const auto path = dir.file("t.csv", "a,city,y\n1,Oslo,0\n2,Rome,1\n3,Lima,0\n");
  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](std::string_view m) { warnings.emplace_back(m); });
  LoadReport report;
  const auto d = load_csv(path, "y", TaskKind::classification, &report);
  EXPECT_EQ(d.cols(), 1);
  ASSERT_EQ(report.dropped_columns.size(), 1u);
  EXPECT_EQ(report.dropped_columns.front(), "city");
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(LoadCsv, DropsRowWithBlankCell) {
  TempDir dir;
  const auto path = dir.file("t.csv", "a,b,y\n1,2,0\n3,,1\n5,6,0\n");
  ScopedWarningSink quiet([](std::string_view) {});
  LoadReport report;
  const auto d = load_csv(path, "y", TaskKind::classification, &report);
  EXPECT_EQ(d.rows(), 2);
  EXPECT_EQ(report.dropped_rows, 1u);
}

TEST(LoadCsv, QuotedFieldsScientificNotationAndCrlf) {
  TempDir dir;
  const auto path = dir.file("t.csv", "\"a\",\"b, c\",y\r\n1e-3,\"2.5E2\",\"x \"\r\n-4,+5,\"say \"\"hi\"\"\"\r\n");
  const auto d = load_csv(path, "y", TaskKind::classification);
  EXPECT_EQ(d.feature_names()[1], "b, c");
  EXPECT_EQ(d.features()(0, 0), 1e-3);
  EXPECT_EQ(d.features()(0, 1), 250.0);
  EXPECT_EQ(d.features()(1, 1), 5.0);
  EXPECT_EQ(d.labels()[0], "x");
  EXPECT_EQ(d.labels()[1], "say \"hi\"");
}

TEST(LoadCsv, Errors) {
  TempDir dir;
  EXPECT_THROW(load_csv(dir / "missing.csv", std::nullopt, TaskKind::unlabeled), DataError);
  const auto ok = dir.file("ok.csv", "a,y\n1,2\n");
  EXPECT_THROW(load_csv(ok, "nope", TaskKind::classification), DataError);
  ScopedWarningSink quiet([](std::string_view) {});
  const auto empty = dir.file("empty.csv", "a,y\n,1\n");
  EXPECT_THROW(load_csv(empty, "y", TaskKind::classification), DataError);
  const auto text_target = dir.file("tt.csv", "a,y\n1,cat\n2,dog\n");
  EXPECT_THROW(load_csv(text_target, "y", TaskKind::regression), TaskKindMismatch);
}

TEST(LoadCsv, WriteBackRoundTripsBitExactly) {
  TempDir dir;
  std::mt19937_64 rng(3);
  const auto d = testing::random_regression(rng, 60, 4);
  Eigen::MatrixXd x = d.features();
  x(0, 0) = 1e-300;
  x(1, 1) = -0.1 + 0.2;  // not exactly representable as short decimal
  x(2, 2) = 123456789.123456789;
  const auto original = d.with_features(x);
  write_csv(original, dir / "rt.csv");
  const auto again = load_csv(dir / "rt.csv", "y", TaskKind::regression);
  ASSERT_EQ(again.rows(), original.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      EXPECT_EQ(std::bit_cast<std::uint64_t>(again.features()(i, j)), std::bit_cast<std::uint64_t>(x(i, j)));
    EXPECT_EQ(again.targets()(i), original.targets()(i));
  }
}

TEST(LooksContinuous, Heuristic) {
  EXPECT_FALSE(looks_continuous(std::vector<std::string>{"0", "1", "2"}));
  EXPECT_FALSE(looks_continuous(std::vector<std::string>{"cat", "1.5"}));
  EXPECT_TRUE(looks_continuous(std::vector<std::string>{"0.5", "1", "2.25"}));

  std::vector<std::string> counts;
  for (int i = 0; i < 40; ++i) counts.push_back(std::to_string(100 + 3 * i));
  EXPECT_TRUE(looks_continuous(counts));
  std::vector<std::string> many_classes;
  for (int i = 0; i < 400; ++i) many_classes.push_back(std::to_string(i % 30));
  EXPECT_FALSE(looks_continuous(many_classes));
}

Dataset labelled(const std::vector<std::string>& labels) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(labels.size()), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = static_cast<double>(i);
  return {{"f"}, x, "y", labels};
}

TEST(TrainTestSplit, SizesAndDisjointness) {
  const auto d = labelled({"a", "a", "a", "a", "a", "b", "b", "b", "b", "b"});
  const auto s = train_test_split(d, 0.2, 42);
  EXPECT_EQ(s.test.rows(), 2);
  EXPECT_EQ(s.train.rows(), 8);
  std::set<Eigen::Index> all(s.train_rows.begin(), s.train_rows.end());
  for (auto r : s.test_rows) EXPECT_TRUE(all.insert(r).second);
  EXPECT_EQ(all.size(), 10u);
}

TEST(TrainTestSplit, Deterministic) {
  std::mt19937_64 rng(1);
  const auto d = testing::random_classification(rng, 50, 2, 3);
  const auto a = train_test_split(d, 0.3, 99);
  const auto b = train_test_split(d, 0.3, 99);
  EXPECT_EQ(a.train_rows, b.train_rows);
  EXPECT_EQ(a.test_rows, b.test_rows);
  const auto c = train_test_split(d, 0.3, 100);
  EXPECT_NE(a.test_rows, c.test_rows);
}

TEST(TrainTestSplit, StratifiedImbalanced) {
  // 8:2 binary with fraction 0.2: exact shares are 1.6 and 0.4, so the
  // apportionment gives floor/ceil counts {2, 0} (largest remainder).
  const auto d = labelled({"m", "m", "m", "m", "m", "m", "m", "m", "r", "r"});
  const auto s = train_test_split(d, 0.2, 42);
  std::map<std::string, int> test_counts;
  for (const auto& l : s.test.labels()) ++test_counts[l];
  EXPECT_EQ(test_counts["m"], 2);
  EXPECT_EQ(test_counts["r"], 0);
  EXPECT_EQ(s.test.rows(), 2);
}

TEST(TrainTestSplit, StratumSharesAreFloorOrCeil) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = testing::random_classification(rng, 40 + trial, 1, 4);
    const double fraction = 0.1 + 0.015 * trial;
    const auto s = train_test_split(d, fraction, static_cast<std::uint64_t>(trial));
    std::map<std::string, int> total;
    std::map<std::string, int> test;
    for (const auto& l : d.labels()) ++total[l];
    for (const auto& l : s.test.labels()) ++test[l];
    for (const auto& [label, c] : total) {
      if (c < 2) continue;
      const double exact = fraction * c;
      EXPECT_GE(test[label], static_cast<int>(std::floor(exact)));
      EXPECT_LE(test[label], static_cast<int>(std::ceil(exact)));
    }
    EXPECT_NEAR(static_cast<double>(s.test.rows()), fraction * d.rows(), 1.0);
  }
}

TEST(TrainTestSplit, SingletonClassStaysInTrain) {
  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](std::string_view m) { warnings.emplace_back(m); });
  const auto d = labelled({"a", "a", "a", "a", "a", "b", "b", "b", "b", "lonely"});
  const auto s = train_test_split(d, 0.2, 1);
  EXPECT_EQ(std::count(s.train.labels().begin(), s.train.labels().end(), "lonely"), 1);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(TrainTestSplit, Errors) {
  const auto d = labelled({"a", "b", "a", "b"});
  EXPECT_THROW(train_test_split(d, 0.0, 1), ArgumentError);
  EXPECT_THROW(train_test_split(d, 1.0, 1), ArgumentError);
  EXPECT_THROW(train_test_split(d, 0.05, 1), ArgumentError);  // rounds to an empty test split
  const Dataset unlabeled({"f"}, Eigen::MatrixXd::Zero(4, 1));
  EXPECT_THROW(train_test_split(unlabeled, 0.5, 1), ArgumentError);
}

TEST(TrainTestSplit, RegressionShuffle) {
  std::mt19937_64 rng(2);
  const auto d = testing::random_regression(rng, 25, 2);
  const auto s = train_test_split(d, 0.2, 42);
  EXPECT_EQ(s.test.rows(), 5);
  EXPECT_EQ(s.train.rows(), 20);
}

}  // namespace
}  // namespace dtz
