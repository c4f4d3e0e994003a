#include "dtization/cli.hpp"

#include <algorithm>
#include <fstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dtization/bench.hpp"
#include "dtization/dataset.hpp"
#include "dtization/diagnostics.hpp"
#include "dtization/error.hpp"
#include "dtization/scalers.hpp"

namespace dtz::cli {
namespace {

struct Options {
  std::string data;
  std::string target;
  std::string task;
  std::vector<std::string> methods;
  std::vector<std::string> modes;
  int k = 3;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "text";
  std::string scaler;
  bool tree = false;
};

// Comma-separated or repeated values, e.g. --method robust,dtization.
std::vector<std::string> split_list(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& v : values) {
    std::size_t start = 0;
    while (start <= v.size()) {
      const auto end = std::min(v.find(',', start), v.size());
      if (end > start) out.push_back(v.substr(start, end - start));
      start = end + 1;
    }
  }
  return out;
}

TaskKind resolve_task(const Options& o) {
  if (!o.task.empty()) return parse_task_kind(o.task);
  return o.target.empty() ? TaskKind::unlabeled : TaskKind::classification;
}

Dataset load_for_task(const Options& o, TaskKind kind) {
  std::optional<std::string> target;
  if (!o.target.empty()) target = o.target;
  if (kind == TaskKind::unlabeled && target) kind = TaskKind::classification;
  auto data = load_csv(o.data, target, kind);
  if (kind == TaskKind::classification && looks_continuous(data.labels())) {
    if (!o.task.empty())
      throw TaskKindMismatch(
          fmt::format("task-kind mismatch: target '{}' holds continuous values; use --task regression", o.target));
    // No --task given: a continuous target means regression.
    data = load_csv(o.data, target, TaskKind::regression);
  }
  return data;
}

int cmd_fit(const Options& o, std::ostream& out) {
  const auto methods = split_list(o.methods);
  if (methods.size() != 1) throw ArgumentError("fit takes exactly one --method");
  const auto method = parse_scaler_method(methods.front());
  const auto modes = split_list(o.modes);
  if (modes.size() > 1) throw ArgumentError("fit takes a single --mode");
  const auto mode = modes.empty() ? FactorMode::as_published : parse_factor_mode(modes.front());
  const auto kind = resolve_task(o);
  if (method == ScalerMethod::dtization && (o.target.empty() || kind == TaskKind::unlabeled))
    throw ArgumentError("dtization is supervised and requires --target");

  const auto data = load_for_task(o, kind);
  const auto scaler = fit(data, method, mode);
  save_scaler(scaler, o.out);
  out << fmt::format("fitted {} on {} rows x {} features -> {}\n", to_string(method), data.rows(), data.cols(), o.out);
  out << describe(scaler);
  return kOk;
}

int cmd_transform(const Options& o, std::ostream& out) {
  const auto scaler = load_scaler(o.scaler);
  // The target column (named or recorded at fit time) is copied through as text.
  std::optional<std::string> target;
  const auto wanted = o.target.empty() ? scaler.target_name : o.target;
  if (!wanted.empty()) {
    const auto header = read_csv_header(o.data);
    if (std::find(header.begin(), header.end(), wanted) != header.end()) {
      target = wanted;
    } else if (!o.target.empty()) {
      throw DataError(fmt::format("target column '{}' not found in '{}'", wanted, o.data));
    }
  }
  const auto data = load_csv(o.data, target, target ? TaskKind::classification : TaskKind::unlabeled);
  const auto scaled = transform(scaler, data);
  write_csv(scaled, o.out);
  out << fmt::format("transformed {} rows with {} scaler -> {}\n", scaled.rows(), to_string(scaler.method), o.out);
  return kOk;
}

int cmd_inspect(const Options& o, std::ostream& out) {
  const auto scaler = load_scaler(o.scaler);
  out << fmt::format("method: {}\n", to_string(scaler.method));
  out << describe(scaler);
  if (o.tree) {
    const auto* dt = std::get_if<DtizationParams>(&scaler.params);
    if (!dt) throw ArgumentError("--tree needs a dtization scaler");
    out << "tree:\n";
    for (const auto& node : dt->factors.nodes)
      out << fmt::format("{:>{}}[d={}] {} < {} (n={})\n", "", 2 * node.depth, node.depth,
                         scaler.feature_names[static_cast<std::size_t>(node.feature)], node.split_point, node.rows);
  }
  return kOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  BenchConfig config;
  config.data = o.data;
  config.target = o.target;
  config.task = o.task.empty() ? TaskKind::classification : parse_task_kind(o.task);
  config.scalers.clear();
  const auto methods = split_list(o.methods);
  if (methods.empty()) {
    config.scalers = all_scaler_methods();
  } else {
    for (const auto& m : methods) config.scalers.push_back(parse_scaler_method(m));
  }
  const auto modes = split_list(o.modes);
  if (!modes.empty()) {
    config.modes.clear();
    for (const auto& m : modes) config.modes.push_back(parse_factor_mode(m));
  }
  config.k = o.k;
  config.test_fraction = o.test_fraction;
  config.seed = o.seed;
  if (o.format == "text") {
    config.format = ReportFormat::text;
  } else if (o.format == "rows") {
    config.format = ReportFormat::rows;
  } else {
    throw ArgumentError(fmt::format("unknown --format '{}' (expected text or rows)", o.format));
  }
  if (!o.out.empty()) config.out = o.out;
  validate(config);

  const auto report = run_bench(config);
  out << render_text(report);
  if (config.out) {
    std::ofstream file(*config.out, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError(fmt::format("cannot write '{}'", config.out->string()));
    file << (config.format == ReportFormat::rows ? render_rows(report) : render_text(report));
  }
  if (!report.failures.empty()) {
    throw DataError(fmt::format("{} scaler(s) failed", report.failures.size()));
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ScopedWarningSink sink([&err](std::string_view msg) { err << "warning: " << msg << '\n'; });

  CLI::App app{"Supervised feature scaling with decision-tree depth factors", "dtization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  const auto valid_methods = "minmax, standard, log, robust, dtization";
  auto* fit_cmd = app.add_subcommand("fit", "Fit a scaler on a CSV and save it");
  fit_cmd->add_option("--data", o.data, "Input CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--target", o.target, "Target column");
  fit_cmd->add_option("--task", o.task, "classification | regression");
  fit_cmd->add_option("--method", o.methods, fmt::format("Scaler: {}", valid_methods))->required();
  fit_cmd->add_option("--mode", o.modes, "Factor mode: as-published | descending");
  fit_cmd->add_option("--out", o.out, "Scaler file to write")->required();

  auto* transform_cmd = app.add_subcommand("transform", "Apply a saved scaler to a CSV");
  transform_cmd->add_option("--data", o.data, "Input CSV")->required()->check(CLI::ExistingFile);
  transform_cmd->add_option("--scaler", o.scaler, "Scaler file")->required();
  transform_cmd->add_option("--target", o.target, "Target column to copy through");
  transform_cmd->add_option("--out", o.out, "Output CSV")->required();

  auto* inspect_cmd = app.add_subcommand("inspect", "Print a saved scaler's parameters");
  inspect_cmd->add_option("scaler,--scaler", o.scaler, "Scaler file")->required();
  inspect_cmd->add_flag("--tree", o.tree, "Also dump the importance tree");

  auto* bench_cmd = app.add_subcommand("bench", "Compare scalers with KNN or OLS on a held-out split");
  bench_cmd->add_option("--data", o.data, "Labelled CSV")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--target", o.target, "Target column")->required();
  bench_cmd->add_option("--task", o.task, "classification | regression");
  bench_cmd->add_option("--method", o.methods, fmt::format("Scalers to compare (default all): {}", valid_methods));
  bench_cmd->add_option("--mode", o.modes, "Factor modes for dtization (default as-published)");
  bench_cmd->add_option("--k", o.k, "Neighbours for KNN")->capture_default_str();
  bench_cmd->add_option("--test-fraction", o.test_fraction, "Held-out share")->capture_default_str();
  bench_cmd->add_option("--seed", o.seed, "Split seed")->capture_default_str();
  bench_cmd->add_option("--out", o.out, "Report file");
  bench_cmd->add_option("--format", o.format, "Report file format: text | rows")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(o, out);
    if (transform_cmd->parsed()) return cmd_transform(o, out);
    if (inspect_cmd->parsed()) return cmd_inspect(o, out);
    if (bench_cmd->parsed()) return cmd_bench(o, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    err << "run 'dtization --help' for usage\n";
    return kUsage;
  } catch (const TaskKindMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace dtz::cli
