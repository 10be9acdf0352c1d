// Operator entry point: scenario validation, single runs, parameter
// sweeps, and aggregation of metrics tables produced by earlier runs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmsim/dmsim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;     // topology fails validation
constexpr int kExitParse = 2;       // scenario or input file unreadable
constexpr int kExitInternal = 3;

std::string validation_json(const dmsim::ValidationReport& report) {
  nlohmann::ordered_json doc;
  doc["valid"] = report.ok();
  doc["errors"] = report.error_count();
  doc["warnings"] = report.warning_count();
  doc["issues"] = nlohmann::ordered_json::array();
  for (const auto& issue : report.issues) {
    nlohmann::ordered_json j;
    j["severity"] = issue.severity == dmsim::Severity::error ? "error" : "warning";
    j["code"] = issue.code;
    j["region"] = issue.region;
    j["message"] = issue.message;
    doc["issues"].push_back(std::move(j));
  }
  return doc.dump();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

std::string summary_text(const dmsim::SimulationResult& res) {
  std::ostringstream os;
  os << "scenario: " << res.info.scenario << "\n";
  os << "seed: " << res.info.seed << "\n";
  os << "horizon: " << res.info.horizon << "\n";
  os << "trace events: " << res.trace_lines.size() << "\n";
  const auto& m = res.metrics;
  os << "triggers: " << m.triggers << "\n";
  os << "bundles created: " << m.bundles_created << "\n";
  os << "bundles delivered: " << m.bundles_delivered << "\n";
  os << "bundles deferred: " << m.bundles_deferred << "\n";
  os << "delivery ratio: " << m.delivery_ratio << "\n";
  os << "detection latency mean: " << m.detection_latency_mean << "\n";
  os << "warning latency mean: " << m.warning_latency_mean << "\n";
  os << "warnings issued: " << m.warnings_issued << " (false: " << m.false_warnings << ")\n";
  os << "missed events: " << m.missed_events << "\n";
  os << "map utilization: " << m.map_utilization << "\n";
  os << "processing makespan: " << m.dpc_makespan << "\n";
  os << "channel blocks: " << m.channel_blocks << "\n";
  os << "bypass dispatches: " << m.bypass_dispatches << "\n";
  os << "trace digest: " << res.digest << "\n";
  return os.str();
}

int do_validate(const std::string& file) {
  const dmsim::Scenario sc = dmsim::load_scenario(file);
  const auto report = dmsim::validate_topology(sc.topology);
  std::cout << report.to_text();
  std::cout << validation_json(report) << "\n";
  return report.ok() ? kExitOk : kExitInvalid;
}

int do_run(const std::string& file, std::uint64_t seed, double horizon, std::string out_dir) {
  const dmsim::Scenario sc = dmsim::load_scenario(file);
  const auto report = dmsim::validate_topology(sc.topology);
  if (!report.ok()) {
    std::cerr << report.to_text();
    return kExitInvalid;
  }
  if (horizon < 0.0) horizon = sc.params.default_horizon;
  const auto res = dmsim::run_simulation(sc, seed, horizon);

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "trace.jsonl", res.trace_text);
  write_file(fs::path(out_dir) / "metrics.csv",
             dmsim::metrics_csv_header() + "\n" + dmsim::metrics_csv_row(res.info, res.metrics) +
                 "\n");
  write_file(fs::path(out_dir) / "summary.txt", summary_text(res));
  write_file(fs::path(out_dir) / "trace.digest", res.digest + "  trace.jsonl\n");

  std::cout << summary_text(res);
  std::cout << "wrote " << out_dir << "/{trace.jsonl, metrics.csv, summary.txt, trace.digest}\n";
  return kExitOk;
}

int render_report(const std::string& csv_path, std::ostream& out);

int do_sweep(const std::string& file, const std::string& param,
             const std::vector<std::string>& values, int reps, std::uint64_t seed, double horizon,
             std::string out_dir) {
  if (values.empty()) {
    std::cerr << "sweep needs at least one value\n";
    return kExitParse;
  }
  const dmsim::Scenario base = dmsim::load_scenario(file);

  // Invalid points are reported and skipped; the rest still run, and any
  // skip turns the final exit code into a failure.
  std::vector<std::string> usable;
  int skipped = 0;
  for (const auto& value : values) {
    try {
      const dmsim::Scenario sc = dmsim::apply_param(base, param, value);
      const auto report = dmsim::validate_topology(sc.topology);
      if (!report.ok()) {
        std::cerr << "sweep point " << param << "=" << value << " fails validation, skipping:\n"
                  << report.to_text();
        ++skipped;
        continue;
      }
    } catch (const dmsim::SweepError& e) {
      std::cerr << "sweep point " << param << "=" << value << " skipped: " << e.what() << "\n";
      ++skipped;
      continue;
    }
    usable.push_back(value);
  }

  if (horizon < 0.0) horizon = base.params.default_horizon;
  std::vector<dmsim::SweepPoint> points;
  if (!usable.empty()) points = dmsim::run_sweep(base, param, usable, reps, seed, horizon);

  std::ostringstream csv;
  csv << dmsim::metrics_csv_header() << "\n";
  for (const auto& p : points) {
    csv << dmsim::metrics_csv_row(p.result.info, p.result.metrics) << "\n";
  }

  fs::create_directories(out_dir);
  const fs::path csv_path = fs::path(out_dir) / "metrics.csv";
  write_file(csv_path, csv.str());

  std::ostringstream sum;
  sum << "scenario: " << base.name << "\n";
  sum << "sweep: " << param << " over";
  for (const auto& v : values) sum << " " << v;
  sum << "\nreps per value: " << reps << "\n";
  sum << "base seed: " << seed << "\n";
  sum << "horizon: " << horizon << "\n";
  sum << "runs: " << points.size() << "\n";
  if (skipped > 0) sum << "skipped points: " << skipped << "\n";
  sum << "\n";
  {
    std::ostringstream table;
    render_report(csv_path.string(), table);
    sum << table.str();
  }
  write_file(fs::path(out_dir) / "summary.txt", sum.str());
  std::cout << sum.str();
  std::cout << "wrote " << out_dir << "/{metrics.csv, summary.txt}\n";
  return skipped > 0 ? kExitInvalid : kExitOk;
}

struct Aggregate {
  int n = 0;
  double sum = 0.0, sum2 = 0.0;
  void add(double x) {
    if (std::isnan(x)) return;
    ++n;
    sum += x;
    sum2 += x * x;
  }
  double mean() const { return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN(); }
  double stderr_of_mean() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = (sum2 - n * m * m) / (n - 1);
    return std::sqrt(std::max(0.0, var) / n);
  }
};

int render_report(const std::string& csv_path, std::ostream& out) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "cannot open " << csv_path << "\n";
    return kExitParse;
  }
  std::string header;
  if (!std::getline(in, header)) {
    std::cerr << csv_path << ": empty file\n";
    return kExitParse;
  }
  std::map<std::string, int> col;
  {
    std::istringstream hs(header);
    std::string name;
    int i = 0;
    while (std::getline(hs, name, ',')) col[name] = i++;
  }
  for (const char* need : {"param", "value", "triggers", "delivery_ratio",
                           "warning_latency_mean", "false_warnings", "warnings_issued"}) {
    if (!col.count(need)) {
      std::cerr << csv_path << ": missing column " << need << "\n";
      return kExitParse;
    }
  }

  struct Group {
    Aggregate triggers, delivery, warning_latency, false_warnings, warnings;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < col.size()) cells.push_back("");
    auto num = [&](const char* name) {
      const std::string& c = cells[col[name]];
      if (c.empty()) return std::numeric_limits<double>::quiet_NaN();
      try {
        return std::stod(c);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    auto& g = groups[{cells[col["param"]], cells[col["value"]]}];
    g.triggers.add(num("triggers"));
    g.delivery.add(num("delivery_ratio"));
    g.warning_latency.add(num("warning_latency_mean"));
    g.false_warnings.add(num("false_warnings"));
    g.warnings.add(num("warnings_issued"));
  }

  auto cell = [](const Aggregate& a) {
    std::ostringstream os;
    if (a.n == 0) {
      os << "-";
    } else {
      os << std::fixed << std::setprecision(3) << a.mean();
      if (a.n > 1) os << " +/- " << std::setprecision(3) << a.stderr_of_mean();
    }
    return os.str();
  };

  out << std::left << std::setw(16) << "param" << std::setw(10) << "value" << std::setw(6)
      << "runs" << std::setw(20) << "triggers" << std::setw(20) << "delivery_ratio"
      << std::setw(24) << "warning_latency_mean" << std::setw(20) << "false_warnings"
      << std::setw(20) << "warnings_issued" << "\n";
  for (const auto& [key, g] : groups) {
    out << std::left << std::setw(16) << (key.first.empty() ? "(none)" : key.first) << std::setw(10)
        << (key.second.empty() ? "-" : key.second) << std::setw(6) << g.triggers.n << std::setw(20)
        << cell(g.triggers) << std::setw(20) << cell(g.delivery) << std::setw(24)
        << cell(g.warning_latency) << std::setw(20) << cell(g.false_warnings) << std::setw(20)
        << cell(g.warnings) << "\n";
  }
  return kExitOk;
}

int do_report(const std::string& csv_path) { return render_report(csv_path, std::cout); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete-event simulator of a sensor/mule/processing warning pipeline"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::uint64_t seed = 1;
  double horizon = -1.0;  // sentinel: use the scenario's own default
  const char* env_out = std::getenv("DMSIM_OUT");
  std::string out_dir = env_out ? env_out : "out";
  std::string param;
  std::vector<std::string> values;
  int reps = 1;
  std::string csv_path;

  auto* validate = app.add_subcommand("validate", "check a scenario file and print the report");
  validate->add_option("file", scenario_file, "scenario file")->required();

  auto* run = app.add_subcommand("run", "execute one simulation run");
  run->add_option("file", scenario_file, "scenario file")->required();
  run->add_option("--seed", seed, "run seed (default 1)");
  run->add_option("--horizon", horizon, "simulated seconds (default from [sim] horizon)");
  run->add_option("--out", out_dir, "output directory (default $DMSIM_OUT or ./out)");

  auto* sweep = app.add_subcommand("sweep", "run a one-parameter sweep");
  sweep->add_option("file", scenario_file, "scenario file")->required();
  sweep->add_option("--param", param, "parameter to vary")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("--reps", reps, "replicates per value (default 1)");
  sweep->add_option("--seed", seed, "base seed; replicate r uses seed+r");
  sweep->add_option("--horizon", horizon, "simulated seconds (default from [sim] horizon)");
  sweep->add_option("--out", out_dir, "output directory (default $DMSIM_OUT or ./out)");

  auto* report = app.add_subcommand("report", "aggregate a metrics.csv into a table");
  report->add_option("file", csv_path, "metrics csv from run or sweep")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (validate->parsed()) return do_validate(scenario_file);
    if (run->parsed()) return do_run(scenario_file, seed, horizon, out_dir);
    if (sweep->parsed()) return do_sweep(scenario_file, param, values, reps, seed, horizon, out_dir);
    if (report->parsed()) return do_report(csv_path);
  } catch (const dmsim::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const dmsim::SweepError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const dmsim::ClusterError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
