#include "dtization/bench.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

#include <fmt/format.h>

#include "csv.hpp"
#include "dtization/error.hpp"
#include "dtization/metrics.hpp"
#include "dtization/models.hpp"

namespace dtz {
namespace {

const std::vector<std::string> kClassificationMetrics = {"accuracy", "precision", "recall", "f1", "mcc"};
const std::vector<std::string> kRegressionMetrics = {"mae", "mse", "r2"};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ScalerEntry {
  ScalerMethod method;
  FactorMode mode;
};

std::vector<ScalerEntry> expand(const BenchConfig& config) {
  std::vector<ScalerEntry> entries;
  for (auto m : config.scalers) {
    if (m == ScalerMethod::dtization) {
      for (auto mode : config.modes) entries.push_back({m, mode});
    } else {
      entries.push_back({m, FactorMode::as_published});
    }
  }
  return entries;
}

std::vector<std::pair<std::string, double>> score(const SplitDataset& split, const FittedScaler& scaler, int k) {
  const auto train = transform(scaler, split.train);
  const auto test = transform(scaler, split.test);
  if (!train.features().allFinite() || !test.features().allFinite())
    throw DataError("transform produced non-finite values");
  if (split.train.task_kind() == TaskKind::classification) {
    const KnnModel model(train.features(), train.labels(), k);
    const auto predicted = model.predict(test.features());
    const auto r = classification_metrics(confusion_matrix(test.labels(), predicted));
    return {{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}, {"mcc", r.mcc}};
  }
  const auto model = ols_fit(train.features(), train.targets());
  const auto r = regression_metrics(test.targets(), ols_predict(model, test.features()));
  return {{"mae", r.mae}, {"mse", r.mse}, {"r2", r.r2}};
}

}  // namespace

std::string scaler_label(ScalerMethod method, FactorMode mode) {
  if (method != ScalerMethod::dtization) return std::string(to_string(method));
  return fmt::format("dtization/{}", to_string(mode));
}

std::optional<double> BenchReport::value(const std::string& scaler, const std::string& metric) const {
  for (const auto& row : rows)
    if (row.scaler == scaler && row.metric == metric) return row.value;
  return std::nullopt;
}

void validate(const BenchConfig& config) {
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0))
    throw ArgumentError(fmt::format("--test-fraction {} is outside (0, 1)", config.test_fraction));
  if (config.k < 1) throw ArgumentError("--k must be at least 1");
  if (config.scalers.empty()) throw ArgumentError("no scalers requested");
  if (config.modes.empty()) throw ArgumentError("no factor modes requested");
  if (config.task == TaskKind::unlabeled) throw ArgumentError("bench needs a classification or regression task");
  if (config.target.empty()) throw ArgumentError("bench needs --target");
}

BenchReport run_bench(const BenchConfig& config) {
  validate(config);
  const auto data = load_csv(config.data, config.target, config.task);
  if (config.task == TaskKind::classification && looks_continuous(data.labels()))
    throw TaskKindMismatch(fmt::format("task-kind mismatch: target '{}' holds continuous values; use --task regression",
                                       config.target));
  return run_bench(data, config.data.stem().string(), config);
}

BenchReport run_bench(const Dataset& data, const std::string& dataset_name, const BenchConfig& config) {
  validate(config);
  if (data.task_kind() != config.task)
    throw TaskKindMismatch(fmt::format("task-kind mismatch: dataset is {}, config asks for {}",
                                       to_string(data.task_kind()), to_string(config.task)));
  const auto split = train_test_split(data, config.test_fraction, config.seed);

  BenchReport report;
  report.dataset = dataset_name;
  report.task = config.task;
  report.model = config.task == TaskKind::classification ? fmt::format("knn(k={})", config.k) : "ols";
  report.seed = config.seed;
  report.test_fraction = config.test_fraction;
  report.k = config.k;
  report.modes = config.modes;
  report.train_rows = split.train.rows();
  report.test_rows = split.test.rows();
  report.features = data.cols();
  report.timestamp = utc_timestamp();

  const std::string model_name = config.task == TaskKind::classification ? "knn" : "ols";
  for (const auto& entry : expand(config)) {
    const auto label = scaler_label(entry.method, entry.mode);
    report.scalers.push_back(label);
    try {
      const auto scaler = fit(split.train, entry.method, entry.mode);
      const auto scores = score(split, scaler, config.k);
      for (const auto& [metric, value] : scores)
        if (!std::isfinite(value)) throw DataError(fmt::format("metric {} is not finite", metric));
      for (const auto& [metric, value] : scores)
        report.rows.push_back({dataset_name, label, model_name, metric, value});
    } catch (const Error& e) {
      report.failures.push_back({label, e.what()});
    }
  }
  return report;
}

std::string render_text(const BenchReport& report) {
  const bool cls = report.task == TaskKind::classification;
  std::string out;
  out += "# dtization bench report\n";
  out += fmt::format("# timestamp: {}\n", report.timestamp);
  out += fmt::format("dataset: {}\n", report.dataset);
  out += fmt::format("task: {}\n", to_string(report.task));
  out += fmt::format("model: {}\n", report.model);
  out += fmt::format("rows: train {}, test {}; features: {}\n", report.train_rows, report.test_rows, report.features);
  out += fmt::format("seed: {}\n", report.seed);
  out += fmt::format("test_fraction: {}\n", report.test_fraction);
  std::vector<std::string_view> modes;
  for (auto m : report.modes) modes.push_back(to_string(m));
  out += fmt::format("modes: {}\n", fmt::join(modes, ","));
  out += fmt::format("tool_version: {}\n\n", kToolVersion);

  const auto& metrics = cls ? kClassificationMetrics : kRegressionMetrics;
  const std::vector<std::string> heads = cls ? std::vector<std::string>{"Accuracy", "Precision", "Recall", "F1-score", "MCC"}
                                             : std::vector<std::string>{"MAE", "MSE", "R-squared"};
  std::size_t width = 8;
  for (const auto& s : report.scalers) width = std::max(width, s.size());
  out += fmt::format("{:<{}}", "Approach", width + 2);
  for (const auto& h : heads) out += fmt::format("{:>14}", h);
  out += '\n';
  for (const auto& s : report.scalers) {
    out += fmt::format("{:<{}}", s, width + 2);
    bool failed = false;
    for (const auto& f : report.failures)
      if (f.scaler == s) {
        out += fmt::format("FAILED: {}", f.message);
        failed = true;
      }
    if (!failed)
      for (const auto& m : metrics) out += fmt::format("{:>14.4f}", report.value(s, m).value_or(NAN));
    out += '\n';
  }
  return out;
}

std::string render_rows(const BenchReport& report) {
  std::string out;
  out += fmt::format("# timestamp={}\n", report.timestamp);
  out += fmt::format("# tool_version={}\n", kToolVersion);
  out += fmt::format("# task={}\n", to_string(report.task));
  out += fmt::format("# seed={}\n", report.seed);
  out += fmt::format("# test_fraction={}\n", report.test_fraction);
  out += fmt::format("# k={}\n", report.k);
  std::vector<std::string_view> modes;
  for (auto m : report.modes) modes.push_back(to_string(m));
  out += fmt::format("# modes={}\n", fmt::join(modes, ";"));
  out += fmt::format("# train_rows={}\n# test_rows={}\n", report.train_rows, report.test_rows);
  for (const auto& f : report.failures) out += fmt::format("# failed {}: {}\n", f.scaler, f.message);
  out += "dataset,scaler,model,metric,value\n";
  for (const auto& r : report.rows)
    out += fmt::format("{},{},{},{},{}\n", csv::escape(r.dataset), csv::escape(r.scaler), r.model, r.metric,
                       csv::format_roundtrip(r.value));
  return out;
}

}  // namespace dtz
