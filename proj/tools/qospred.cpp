// qospred: QoS violation prediction from KPI event streams.
//
//   qospred predict   --config <file> --events <file|-> --qc <file> --out <csv>
//   qospred simulate  --scenario A|B|C --seed <n> --duration <min> --out <file>
//   qospred bench     --lengths 20,40,60,80,100 --out <csv>
//   qospred plot-data --config <file> --scenarios A,B,C --out <csv>
//   qospred config    (prints every configuration key with its default)
//
// Exit status: 0 success, 1 configuration or usage error, 2 runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qospred/config.hpp"
#include "qospred/log.hpp"
#include "qospred/pipeline.hpp"
#include "qospred/qc.hpp"
#include "qospred/scenario.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to `path`, or standard output for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

qospred::Config config_or_default(const std::string& path) {
  return path.empty() ? qospred::Config{} : qospred::load_config(path);
}

template <class T>
std::vector<T> split_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse(item));
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

std::size_t parse_length(const std::string& s) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v == 0) throw UsageError("invalid queue length '" + s + "'");
  return v;
}

qospred::Scenario parse_scenario_arg(const std::string& s) {
  auto sc = qospred::parse_scenario(s);
  if (!sc) throw UsageError("unknown scenario '" + s + "' (expected A, B or C)");
  return *sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QoS violation prediction with birth-death CTMC models"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string config_path, events_path, qc_path, out_path = "-", derived_path;
  bool timing = false;
  auto* predict = app.add_subcommand("predict", "Run the prediction loop over an event stream");
  predict->add_option("--config", config_path, "Configuration file")->required();
  predict->add_option("--events", events_path, "Event file, or - for standard input")->required();
  predict->add_option("--qc", qc_path, "Quality constraint file")->required();
  predict->add_option("--out", out_path, "Prediction CSV (default: standard output)");
  predict->add_option("--derived", derived_path, "Write derived events to this file");
  predict->add_flag("--timing", timing, "Add build/check time columns");

  std::string scenario_name = "A";
  std::uint64_t seed = 1;
  std::optional<double> duration;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic smart-meter stream");
  simulate->add_option("--scenario", scenario_name, "A, B or C")->required();
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--duration", duration, "Duration in minutes");
  simulate->add_option("--config", config_path, "Configuration file for scenario.* keys");
  simulate->add_option("--out", out_path, "Event file (default: standard output)");

  std::string lengths = "20,40,60,80,100";
  double rate = 1.0;
  double horizon = 30.0;
  auto* bench = app.add_subcommand("bench", "Model size and checking time of the 3-queue network");
  bench->add_option("--lengths", lengths, "Comma-separated queue lengths");
  bench->add_option("--rate", rate, "Birth and death rate of every queue (1/min)");
  bench->add_option("--horizon", horizon, "Time bound of the checked property (min)");
  bench->add_option("--out", out_path, "CSV (default: standard output)");

  std::string scenarios = "A,B,C";
  auto* plot = app.add_subcommand("plot-data", "Violation probability per queue state");
  plot->add_option("--config", config_path, "Configuration file");
  plot->add_option("--scenarios", scenarios, "Comma-separated scenarios");
  plot->add_option("--out", out_path, "CSV (default: standard output)");

  auto* config_cmd = app.add_subcommand("config", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  if (verbose) qospred::log::set_min_level(qospred::log::Level::Debug);

  int stage_error = kConfigError;
  try {
    if (*config_cmd) {
      std::cout << qospred::default_config_text();
      return 0;
    }

    if (*predict) {
      qospred::Config cfg = qospred::load_config(config_path);
      if (timing) cfg.timing = true;
      const auto qcs = qospred::qc::parse_qc_file(read_file(qc_path));
      std::ifstream events_file;
      std::istream* in = &std::cin;
      if (events_path != "-") {
        events_file.open(events_path);
        if (!events_file) throw UsageError("cannot open '" + events_path + "'");
        in = &events_file;
      }
      Output out(out_path);
      std::optional<Output> derived;
      if (!derived_path.empty()) derived.emplace(derived_path);
      stage_error = kRuntimeError;
      const auto s = qospred::run_pipeline(cfg, qcs, *in, out.stream(),
                                           derived ? &derived->stream() : nullptr);
      qospred::log::info(std::to_string(s.events) + " events, " + std::to_string(s.records) +
                         " periods, " + std::to_string(s.alerts) + " alerts, " +
                         std::to_string(s.errors) + " periods with errors");
      return 0;
    }

    if (*simulate) {
      qospred::Config cfg = config_or_default(config_path);
      qospred::ScenarioConfig sc = cfg.scenario;
      sc.scenario = parse_scenario_arg(scenario_name);
      sc.seed = seed;
      if (duration) sc.duration_min = *duration;
      sc.validate();
      Output out(out_path);
      stage_error = kRuntimeError;
      for (const auto& e : qospred::generate(sc)) out.stream() << qospred::format_event(e) << '\n';
      return 0;
    }

    if (*bench) {
      const auto lens = split_list<std::size_t>(lengths, parse_length);
      if (!(rate > 0.0) || !(horizon > 0.0)) throw UsageError("rate and horizon must be positive");
      qospred::BenchOptions opts;
      opts.rate = rate;
      opts.horizon_min = horizon;
      Output out(out_path);
      stage_error = kRuntimeError;
      std::vector<qospred::BenchRow> rows;
      for (std::size_t len : lens) {
        rows.push_back(qospred::bench_one(len, opts));
        qospred::log::info("length " + std::to_string(len) + ": " +
                           std::to_string(rows.back().states) + " states, " +
                           std::to_string(rows.back().total_s) + " s");
      }
      out.stream() << qospred::bench_csv(rows);
      return 0;
    }

    if (*plot) {
      const qospred::Config cfg = config_or_default(config_path);
      const auto list = split_list<qospred::Scenario>(scenarios, parse_scenario_arg);
      Output out(out_path);
      stage_error = kRuntimeError;
      std::vector<qospred::PlotRow> rows;
      for (auto sc : list) {
        qospred::ScenarioConfig scfg = cfg.scenario;
        scfg.scenario = sc;
        const auto rates = qospred::nominal_rates(scfg, cfg.partition.width());
        const auto curve = qospred::violation_curve(cfg.partition, rates, cfg.horizon_min,
                                                    cfg.plot_transient);
        for (std::size_t s = 0; s < curve.size(); ++s) {
          rows.push_back({std::string(qospred::to_string(sc)), s, curve[s], rates.lambda, rates.mu});
        }
      }
      out.stream() << qospred::plot_csv(rows);
      return 0;
    }
  } catch (const qospred::ConfigError& e) {
    qospred::log::error(e.what());
    return kConfigError;
  } catch (const qospred::qc::ParseError& e) {
    qospred::log::error(std::string("constraint file: ") + e.what());
    return kConfigError;
  } catch (const UsageError& e) {
    qospred::log::error(e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    qospred::log::error(e.what());
    return stage_error == kConfigError ? kConfigError : kRuntimeError;
  }
  return 0;
}
