// Command-line front end: build and solve chains, verify liftings, run
// simulations and the bins game, sweep latencies over n.
//
// Exit codes: 0 success, 1 verification/computation failure, 2 usage error.
// Every output file gets a <basename>.config.json sidecar echoing the full
// run configuration, and reruns with identical configs are byte-identical.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfa/binsgame.hpp"
#include "lfa/chain_io.hpp"
#include "lfa/lifting.hpp"
#include "lfa/markov.hpp"
#include "lfa/metrics.hpp"
#include "lfa/models.hpp"
#include "lfa/simulator.hpp"

namespace {

namespace fs = std::filesystem;
using lfa::io::format_number;

constexpr const char* kVersion = "0.1.0";

/// Relative output paths land under $LFA_OUT_DIR when it is set.
fs::path resolve_out(const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("LFA_OUT_DIR")) p = fs::path(dir) / p;
  }
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

/// Ordered key/value pairs rendered as a flat JSON object; values arrive
/// pre-rendered (quoted strings, bare numbers, arrays).
struct ConfigEcho {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;

  void add(const std::string& key, const std::string& raw) { params.emplace_back(key, raw); }
  void add_str(const std::string& key, const std::string& v) { add(key, "\"" + v + "\""); }
  void add_int(const std::string& key, long long v) { add(key, std::to_string(v)); }
  void add_uint(const std::string& key, unsigned long long v) { add(key, std::to_string(v)); }
  void add_num(const std::string& key, double v) { add(key, format_number(v)); }

  std::string render() const {
    std::string out = "{\n  \"tool\": \"lfa\",\n  \"version\": \"";
    out += kVersion;
    out += "\",\n  \"command\": \"" + command + "\",\n  \"params\": {";
    for (std::size_t i = 0; i < params.size(); ++i) {
      out += i ? ",\n    " : "\n    ";
      out += "\"" + params[i].first + "\": " + params[i].second;
    }
    out += params.empty() ? "}\n}\n" : "\n  }\n}\n";
    return out;
  }
};

void write_sidecar(const fs::path& out_path, const ConfigEcho& config) {
  fs::path sidecar = out_path;
  sidecar.replace_extension();
  sidecar += ".config.json";
  write_text(sidecar, config.render());
}

std::string join_u32(const std::vector<std::uint32_t>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

// --- chain build / chain solve -------------------------------------------

lfa::markov::Chain build_named_chain(const std::string& model, std::uint32_t n,
                                     std::uint32_t q) {
  if (model == "scu-ind") return lfa::models::build_scu_individual(n);
  if (model == "scu-sys") return lfa::models::build_scu_system(n);
  if (model == "fai-ind") return lfa::models::build_fai_individual(n);
  if (model == "fai-glob") return lfa::models::build_fai_global(n);
  if (model == "par-ind") return lfa::models::build_parallel_individual(n, q);
  if (model == "par-sys") return lfa::models::build_parallel_system(n, q);
  throw CLI::ValidationError("--model", "unknown chain model: " + model);
}

struct ChainBuildArgs {
  std::string model;
  std::uint32_t n = 0;
  std::uint32_t q = 2;
  std::string out;
};

int run_chain_build(const ChainBuildArgs& args) {
  lfa::markov::Chain chain = build_named_chain(args.model, args.n, args.q);
  std::string text;
  bool dot = fs::path(args.out).extension() == ".dot";
  text = dot ? lfa::io::to_dot(chain) : lfa::io::to_json(chain);
  if (args.out.empty()) {
    std::cout << text;
    return 0;
  }
  fs::path out = resolve_out(args.out);
  write_text(out, text);
  ConfigEcho config;
  config.command = "chain build";
  config.add_str("model", args.model);
  config.add_uint("n", args.n);
  config.add_uint("q", args.q);
  config.add_str("out", args.out);
  write_sidecar(out, config);
  std::cout << "wrote " << out.string() << " (" << chain.num_states << " states, "
            << chain.edges.size() << " transitions)\n";
  return 0;
}

struct ChainSolveArgs {
  std::string in;
  std::string model;
  std::uint32_t n = 0;
  std::uint32_t q = 2;
  double tol = 1e-12;
  std::string out;
};

int run_chain_solve(const ChainSolveArgs& args) {
  lfa::markov::Chain chain;
  if (!args.in.empty()) {
    std::ifstream f(args.in, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + args.in);
    std::stringstream ss;
    ss << f.rdbuf();
    chain = lfa::io::from_json(ss.str());
  } else if (!args.model.empty()) {
    chain = build_named_chain(args.model, args.n, args.q);
  } else {
    throw CLI::ValidationError("chain solve", "needs --in or --model");
  }

  lfa::markov::ValidationReport vr = lfa::markov::validate(chain);
  if (!vr.ok()) {
    std::cerr << "chain fails validation: " << vr.row_sum_violations.size()
              << " row-sum violations, " << vr.out_of_range_edges.size()
              << " out-of-range edges, " << vr.unreachable_states.size()
              << " unreachable states\n";
    return 1;
  }
  bool irreducible = lfa::markov::is_irreducible(chain);
  if (!irreducible) {
    std::cerr << "chain is reducible; stationary undefined/non-unique\n";
    return 1;
  }
  std::uint32_t per = lfa::markov::period(chain);
  lfa::markov::Distribution pi = lfa::markov::stationary(chain, args.tol);

  bool has_events = false;
  for (const lfa::markov::Edge& e : chain.edges) has_events = has_events || e.event;

  std::string text = "{\n  \"num_states\": " + std::to_string(chain.num_states) +
                     ",\n  \"irreducible\": true,\n  \"period\": " + std::to_string(per) +
                     ",\n  \"ergodic\": " + (per == 1 ? "true" : "false") +
                     ",\n  \"tolerance\": " + format_number(args.tol) + ",\n  \"pi\": [";
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (i) text += ", ";
    text += format_number(pi[i]);
  }
  text += "]";
  if (has_events) {
    lfa::markov::EventRate rate = lfa::markov::event_rate(chain, pi);
    text += ",\n  \"mu\": " + format_number(rate.mu) +
            ",\n  \"latency\": " + format_number(rate.latency);
  }
  text += "\n}\n";

  if (args.out.empty()) {
    std::cout << text;
    return 0;
  }
  fs::path out = resolve_out(args.out);
  write_text(out, text);
  ConfigEcho config;
  config.command = "chain solve";
  if (!args.in.empty()) config.add_str("in", args.in);
  if (!args.model.empty()) {
    config.add_str("model", args.model);
    config.add_uint("n", args.n);
    config.add_uint("q", args.q);
  }
  config.add_num("tol", args.tol);
  config.add_str("out", args.out);
  write_sidecar(out, config);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// --- lifting verify --------------------------------------------------------

struct LiftingArgs {
  std::string model;
  std::uint32_t n = 0;
  std::uint32_t q = 2;
  double tol = 1e-9;
  bool corrupt = false;
  std::string out;
};

int run_lifting_verify(const LiftingArgs& args) {
  lfa::markov::Chain fine, coarse;
  lfa::lifting::LiftingMap map;
  if (args.model == "scu") {
    fine = lfa::models::build_scu_individual(args.n);
    coarse = lfa::models::build_scu_system(args.n);
    map = lfa::models::scu_lifting_map(args.n);
  } else if (args.model == "fai") {
    fine = lfa::models::build_fai_individual(args.n);
    coarse = lfa::models::build_fai_global(args.n);
    map = lfa::models::fai_lifting_map(args.n);
  } else if (args.model == "parallel") {
    fine = lfa::models::build_parallel_individual(args.n, args.q);
    coarse = lfa::models::build_parallel_system(args.n, args.q);
    map = lfa::models::parallel_lifting_map(args.n, args.q);
  } else {
    throw CLI::ValidationError("--model", "unknown lifting model: " + args.model);
  }

  if (args.corrupt) {
    // Swap the images of the first two fine states mapped to different
    // coarse states: a deterministic negative control.
    for (std::size_t i = 1; i < map.fine_to_coarse.size(); ++i) {
      if (map.fine_to_coarse[i] != map.fine_to_coarse[0]) {
        std::swap(map.fine_to_coarse[0], map.fine_to_coarse[i]);
        break;
      }
    }
  }

  lfa::lifting::LiftingReport report = lfa::lifting::verify_lifting(fine, coarse, map, args.tol);
  std::cout << "flow homomorphism:     " << (report.flow_homomorphism_ok ? "ok" : "FAIL")
            << " (max residual " << format_number(report.max_flow_residual, 3) << ")\n"
            << "stationary aggregation: " << (report.aggregation_ok ? "ok" : "FAIL")
            << " (max residual " << format_number(report.max_aggregation_residual, 3) << ")\n"
            << "fiber symmetry:        " << (report.fiber_symmetry_ok ? "ok" : "FAIL")
            << " (max spread " << format_number(report.max_fiber_spread, 3) << ")\n"
            << (report.ok() ? "pass" : "fail") << "\n";

  if (!args.out.empty()) {
    fs::path out = resolve_out(args.out);
    std::string text =
        std::string("{\n  \"flow_homomorphism_ok\": ") +
        (report.flow_homomorphism_ok ? "true" : "false") +
        ",\n  \"max_flow_residual\": " + format_number(report.max_flow_residual) +
        ",\n  \"aggregation_ok\": " + (report.aggregation_ok ? "true" : "false") +
        ",\n  \"max_aggregation_residual\": " + format_number(report.max_aggregation_residual) +
        ",\n  \"fiber_symmetry_ok\": " + (report.fiber_symmetry_ok ? "true" : "false") +
        ",\n  \"max_fiber_spread\": " + format_number(report.max_fiber_spread) +
        ",\n  \"pass\": " + (report.ok() ? "true" : "false") + "\n}\n";
    write_text(out, text);
    ConfigEcho config;
    config.command = "lifting verify";
    config.add_str("model", args.model);
    config.add_uint("n", args.n);
    config.add_uint("q", args.q);
    config.add_num("tol", args.tol);
    config.add(std::string("corrupt_map"), args.corrupt ? "true" : "false");
    config.add_str("out", args.out);
    write_sidecar(out, config);
  }
  return report.ok() ? 0 : 1;
}

// --- sim run ----------------------------------------------------------------

struct SimArgs {
  std::string model;
  std::uint32_t n = 0;
  std::uint32_t q = 0;
  std::uint32_t s = 1;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::vector<double> weights;
  double theta = 0;
  std::vector<std::string> crash;
  std::string out;
  bool full_precision = false;
};

lfa::sim::SchedulerSpec scheduler_from_args(const SimArgs& args) {
  if (!args.weights.empty() && !args.crash.empty())
    throw CLI::ValidationError("sim run", "--weights and --crash are mutually exclusive");
  if (!args.weights.empty()) {
    if (args.theta <= 0)
      throw CLI::ValidationError("sim run", "--weights needs --theta in (0, 1]");
    return lfa::sim::SchedulerSpec::weighted(args.weights, args.theta);
  }
  if (!args.crash.empty()) {
    std::map<std::uint32_t, std::uint64_t> crashes;
    for (const std::string& spec : args.crash) {
      std::size_t colon = spec.find(':');
      if (colon == std::string::npos)
        throw CLI::ValidationError("--crash", "expected process:step, got " + spec);
      crashes[static_cast<std::uint32_t>(std::stoul(spec.substr(0, colon)))] =
          std::stoull(spec.substr(colon + 1));
    }
    return lfa::sim::SchedulerSpec::with_crashes(std::move(crashes));
  }
  return lfa::sim::SchedulerSpec::uniform();
}

std::string trace_json(const std::string& model, const lfa::sim::Trace& tr) {
  std::string text = "{\n  \"model\": \"" + model + "\",\n  \"n\": " + std::to_string(tr.n) +
                     ",\n  \"q\": " + std::to_string(tr.q) +
                     ",\n  \"s\": " + std::to_string(tr.s) +
                     ",\n  \"steps\": " + std::to_string(tr.total_steps) +
                     ",\n  \"seed\": " + std::to_string(tr.seed) +
                     ",\n  \"total_successes\": " + std::to_string(tr.total_successes()) +
                     ",\n  \"crash_times\": {";
  bool first = true;
  for (const auto& [p, t] : tr.crash_times) {
    if (!first) text += ", ";
    first = false;
    text += "\"" + std::to_string(p) + "\": " + std::to_string(t);
  }
  text += "},\n  \"completions\": [";
  for (std::uint32_t p = 0; p < tr.n; ++p) {
    text += p ? ",\n    [" : "\n    [";
    for (std::size_t i = 0; i < tr.completions[p].size(); ++i) {
      if (i) text += ", ";
      text += std::to_string(tr.completions[p][i]);
    }
    text += "]";
  }
  text += "\n  ],\n  \"success_steps\": [";
  first = true;
  for (std::uint64_t t = 0; t < tr.total_steps; ++t) {
    if (!tr.success_at_step[t]) continue;
    if (!first) text += ", ";
    first = false;
    text += std::to_string(t);
  }
  text += "]\n}\n";
  return text;
}

std::string stats_csv(const std::string& model, const lfa::sim::Trace& tr, int sig) {
  lfa::metrics::LatencyReport rep = lfa::metrics::estimate_latencies(tr);
  double wi_min = std::numeric_limits<double>::quiet_NaN();
  double wi_max = std::numeric_limits<double>::quiet_NaN();
  for (double wi : rep.W_i) {
    if (std::isnan(wi)) continue;
    if (std::isnan(wi_min) || wi < wi_min) wi_min = wi;
    if (std::isnan(wi_max) || wi > wi_max) wi_max = wi;
  }
  std::string text = "model,n,q,s,steps,seed,W_emp,Wi_emp_min,Wi_emp_max,completion_rate\n";
  text += model + "," + std::to_string(tr.n) + "," + std::to_string(tr.q) + "," +
          std::to_string(tr.s) + "," + std::to_string(tr.total_steps) + "," +
          std::to_string(tr.seed) + "," + format_number(rep.W, sig) + "," +
          format_number(wi_min, sig) + "," + format_number(wi_max, sig) + "," +
          format_number(rep.completion_rate, sig) + "\n";
  return text;
}

int run_sim(const SimArgs& args) {
  lfa::sim::SchedulerSpec sched = scheduler_from_args(args);
  lfa::sim::Trace trace;
  std::string extra_json;
  if (args.model == "scu") {
    trace = lfa::sim::run_scu({args.q, args.s}, args.n, args.steps, args.seed, sched);
  } else if (args.model == "parallel") {
    if (args.q < 1) throw CLI::ValidationError("sim run", "parallel model needs --q >= 1");
    trace = lfa::sim::run_parallel(args.q, args.n, args.steps, args.seed, sched);
  } else if (args.model == "unbounded") {
    if (sched.kind != lfa::sim::SchedulerKind::Uniform)
      throw CLI::ValidationError("sim run", "unbounded model runs under the uniform scheduler");
    lfa::sim::UnboundedResult res = lfa::sim::run_unbounded_lf(args.n, args.steps, args.seed);
    trace = std::move(res.trace);
    extra_json = ",\n  \"first_winner\": " + std::to_string(res.stats.first_winner) +
                 ",\n  \"successes_by_first_winner\": " +
                 std::to_string(res.stats.successes_by_first_winner) +
                 ",\n  \"monopoly\": " + (res.stats.monopoly() ? "true" : "false");
  } else {
    throw CLI::ValidationError("--model", "unknown simulation model: " + args.model);
  }

  fs::path out = resolve_out(args.out);
  std::string ext = out.extension().string();
  std::string text;
  if (ext == ".json") {
    text = trace_json(args.model, trace);
    if (!extra_json.empty()) text.insert(text.rfind("\n}"), extra_json);
  } else if (ext == ".csv") {
    text = stats_csv(args.model, trace, args.full_precision ? 17 : 6);
  } else {
    throw CLI::ValidationError("--out", "expected a .json trace or .csv stats path");
  }
  write_text(out, text);

  ConfigEcho config;
  config.command = "sim run";
  config.add_str("model", args.model);
  config.add_uint("n", args.n);
  config.add_uint("q", args.q);
  config.add_uint("s", args.s);
  config.add_uint("steps", args.steps);
  config.add_uint("seed", args.seed);
  if (!args.weights.empty()) {
    std::string w = "[";
    for (std::size_t i = 0; i < args.weights.size(); ++i) {
      if (i) w += ", ";
      w += format_number(args.weights[i]);
    }
    config.add("weights", w + "]");
    config.add_num("theta", args.theta);
  }
  if (!args.crash.empty()) {
    std::string c = "[";
    for (std::size_t i = 0; i < args.crash.size(); ++i) {
      if (i) c += ", ";
      c += "\"" + args.crash[i] + "\"";
    }
    config.add("crash", c + "]");
  }
  config.add_str("out", args.out);
  config.add("full_precision", args.full_precision ? "true" : "false");
  write_sidecar(out, config);
  std::cout << "wrote " << out.string() << " (" << trace.total_successes()
            << " completions in " << trace.total_steps << " steps)\n";
  return 0;
}

// --- bins run ----------------------------------------------------------------

struct BinsArgs {
  std::uint32_t n = 0;
  std::uint64_t phases = 0;
  std::uint64_t seed = 0;
  double alpha = 4.0;
  double c = 10.0;
  std::string out;
};

int run_bins_cmd(const BinsArgs& args) {
  lfa::bins::BinsConfig config;
  config.n = args.n;
  config.phases = args.phases;
  config.seed = args.seed;
  config.alpha = args.alpha;
  config.c = args.c;
  std::vector<lfa::bins::PhaseRecord> records = lfa::bins::run_bins(config);

  std::string text = "phase_index,a_start,b_start,length,range\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const lfa::bins::PhaseRecord& r = records[i];
    text += std::to_string(i) + "," + std::to_string(r.a_start) + "," +
            std::to_string(r.b_start) + "," + std::to_string(r.length) + "," +
            std::to_string(r.range) + "\n";
  }
  fs::path out = resolve_out(args.out);
  write_text(out, text);

  ConfigEcho echo;
  echo.command = "bins run";
  echo.add_uint("n", args.n);
  echo.add_uint("phases", args.phases);
  echo.add_uint("seed", args.seed);
  echo.add_num("alpha", args.alpha);
  echo.add_num("c", args.c);
  echo.add_str("out", args.out);
  write_sidecar(out, echo);

  lfa::bins::RangeReport stats = lfa::bins::phase_stats(records, args.alpha, args.c);
  long double total = 0;
  for (const lfa::bins::PhaseRecord& r : records) total += r.length;
  std::cout << "wrote " << out.string() << "\n"
            << "mean phase length " << format_number(static_cast<double>(total / records.size()), 6)
            << "; range fractions " << format_number(stats.range[0].fraction, 3) << " / "
            << format_number(stats.range[1].fraction, 3) << " / "
            << format_number(stats.range[2].fraction, 3) << "; bound violations "
            << format_number(stats.bound_violation_fraction, 3) << "\n";
  return 0;
}

// --- sweep / crash-sweep ------------------------------------------------------

std::string sweep_csv(const std::vector<lfa::metrics::SweepRow>& rows, int sig) {
  std::string text = "n,k_correct,q,s,W,W_over_sqrt_n,completion_rate,source\n";
  for (const lfa::metrics::SweepRow& row : rows) {
    text += std::to_string(row.n) + "," + std::to_string(row.k_correct) + "," +
            std::to_string(row.q) + "," + std::to_string(row.s) + "," +
            format_number(row.W, sig) + "," + format_number(row.W_over_sqrt_n, sig) + "," +
            format_number(row.completion_rate, sig) + "," + row.source + "\n";
  }
  return text;
}

struct SweepArgs {
  std::string model;
  std::string mode;
  std::vector<std::uint32_t> n_list;
  std::uint32_t q = 0;
  std::uint32_t s = 1;
  std::uint64_t steps = 1000000;
  std::uint64_t phases = 100000;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string fit_out;
  std::string curve_out;
  bool full_precision = false;
};

int run_sweep(const SweepArgs& args) {
  lfa::metrics::Model model;
  if (args.model == "scu")
    model = lfa::metrics::Model::Scu;
  else if (args.model == "fai")
    model = lfa::metrics::Model::Fai;
  else if (args.model == "parallel")
    model = lfa::metrics::Model::Parallel;
  else
    throw CLI::ValidationError("--model", "unknown sweep model: " + args.model);

  lfa::metrics::SweepMode mode;
  if (args.mode == "exact")
    mode = lfa::metrics::SweepMode::Exact;
  else if (args.mode == "sim")
    mode = lfa::metrics::SweepMode::Sim;
  else if (args.mode == "bins")
    mode = lfa::metrics::SweepMode::Bins;
  else
    throw CLI::ValidationError("--mode", "expected exact, sim, or bins");

  if (mode != lfa::metrics::SweepMode::Exact && !args.seed)
    throw CLI::ValidationError("sweep", "--seed is required for sim and bins modes");

  lfa::metrics::SweepBudget budget;
  budget.steps = args.steps;
  budget.phases = args.phases;
  budget.seed = args.seed.value_or(0);
  lfa::metrics::SweepResult result = lfa::metrics::sweep(model, args.n_list, args.q, args.s,
                                                         mode, budget);

  ConfigEcho echo;
  echo.command = "sweep";
  echo.add_str("model", args.model);
  echo.add_str("mode", args.mode);
  echo.add("n", join_u32(args.n_list));
  echo.add_uint("q", args.q);
  echo.add_uint("s", args.s);
  echo.add_uint("steps", args.steps);
  echo.add_uint("phases", args.phases);
  if (args.seed) echo.add_uint("seed", *args.seed);
  echo.add_str("out", args.out);
  echo.add("full_precision", args.full_precision ? "true" : "false");

  int sig = args.full_precision ? 17 : 6;
  fs::path out = resolve_out(args.out);
  write_text(out, sweep_csv(result.rows, sig));
  write_sidecar(out, echo);

  if (!args.fit_out.empty()) {
    fs::path fit = resolve_out(args.fit_out);
    std::string text = "{\n  \"gamma\": " + format_number(result.gamma) +
                       ",\n  \"C\": " + format_number(result.C) +
                       ",\n  \"fit_points\": " + std::to_string(result.fit_points) +
                       ",\n  \"degenerate\": " + (result.degenerate ? "true" : "false") +
                       "\n}\n";
    write_text(fit, text);
    write_sidecar(fit, echo);
  }
  if (!args.curve_out.empty()) {
    fs::path curve = resolve_out(args.curve_out);
    std::string text = "# n completion_rate scaled_prediction worst_case\n";
    for (const lfa::metrics::CurvePoint& pt : lfa::metrics::make_completion_curve(result.rows)) {
      text += std::to_string(pt.n) + " " + format_number(pt.completion_rate, sig) + " " +
              format_number(pt.scaled_prediction, sig) + " " +
              format_number(pt.worst_case, sig) + "\n";
    }
    write_text(curve, text);
    write_sidecar(curve, echo);
  }

  std::cout << "wrote " << out.string() << " (" << result.rows.size() << " rows)\n";
  if (result.degenerate)
    std::cout << "scaling fit degenerate (fewer than two usable points)\n";
  else
    std::cout << "fitted W - q ~ C n^gamma with gamma = " << format_number(result.gamma, 6)
              << ", C = " << format_number(result.C, 6) << " over " << result.fit_points
              << " points\n";
  return 0;
}

struct CrashArgs {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t q = 0;
  std::uint32_t s = 1;
  std::uint64_t steps = 1000000;
  std::uint64_t seed = 0;
  std::string out;
  bool full_precision = false;
};

int run_crash_sweep(const CrashArgs& args) {
  lfa::metrics::SweepRow row =
      lfa::metrics::crash_sweep_point(args.n, args.k, args.q, args.s, args.steps, args.seed);
  fs::path out = resolve_out(args.out);
  write_text(out, sweep_csv({row}, args.full_precision ? 17 : 6));
  ConfigEcho echo;
  echo.command = "crash-sweep";
  echo.add_uint("n", args.n);
  echo.add_uint("k", args.k);
  echo.add_uint("q", args.q);
  echo.add_uint("s", args.s);
  echo.add_uint("steps", args.steps);
  echo.add_uint("seed", args.seed);
  echo.add_str("out", args.out);
  echo.add("full_precision", args.full_precision ? "true" : "false");
  write_sidecar(out, echo);
  std::cout << "wrote " << out.string() << " (W = " << format_number(row.W, 6) << " with "
            << args.k << " of " << args.n << " processes correct)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  int rc = 0;
  CLI::App app{"Exact Markov chains, schedulers, and latency sweeps for lock-free retry loops"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  ChainBuildArgs cb;
  ChainSolveArgs cs;
  LiftingArgs la;
  SimArgs sa;
  BinsArgs ba;
  SweepArgs swa;
  CrashArgs cra;

  CLI::App* chain = app.add_subcommand("chain", "Build or solve a model chain");
  chain->require_subcommand(1);
  CLI::App* build = chain->add_subcommand("build", "Construct a chain and write JSON or DOT");
  build->add_option("--model", cb.model, "scu-ind|scu-sys|fai-ind|fai-glob|par-ind|par-sys")
      ->required();
  build->add_option("--n", cb.n, "number of processes")->required();
  build->add_option("--q", cb.q, "parallel work parameter (par-* models)");
  build->add_option("--out", cb.out, "output path (.json or .dot; stdout if omitted)");
  build->callback([&rc, &cb]() { rc = run_chain_build(cb); });

  CLI::App* solve = chain->add_subcommand("solve", "Stationary distribution and event rate");
  solve->add_option("--in", cs.in, "chain JSON produced by chain build");
  solve->add_option("--model", cs.model, "build instead of reading: scu-ind|...|par-sys");
  solve->add_option("--n", cs.n, "number of processes (with --model)");
  solve->add_option("--q", cs.q, "parallel work parameter (with --model)");
  solve->add_option("--tol", cs.tol, "stationary residual tolerance")->capture_default_str();
  solve->add_option("--out", cs.out, "solution JSON path (stdout if omitted)");
  solve->callback([&rc, &cs]() { rc = run_chain_solve(cs); });

  CLI::App* lift = app.add_subcommand("lifting", "Lifting verification");
  lift->require_subcommand(1);
  CLI::App* verify = lift->add_subcommand("verify", "Check individual-to-system chain lifting");
  verify->add_option("--model", la.model, "scu|fai|parallel")->required();
  verify->add_option("--n", la.n, "number of processes")->required();
  verify->add_option("--q", la.q, "parallel work parameter (parallel model)");
  verify->add_option("--tol", la.tol, "residual tolerance")->capture_default_str();
  verify->add_flag("--corrupt-map", la.corrupt, "negative control: corrupt the map first");
  verify->add_option("--out", la.out, "optional report JSON path");
  verify->callback([&rc, &la]() { rc = run_lifting_verify(la); });

  CLI::App* sim = app.add_subcommand("sim", "Step-level scheduler simulation");
  sim->require_subcommand(1);
  CLI::App* run = sim->add_subcommand("run", "Run one simulation");
  run->add_option("--model", sa.model, "scu|unbounded|parallel")->required();
  run->add_option("--n", sa.n, "number of processes")->required();
  run->add_option("--q", sa.q, "preamble length (scu) / counter modulus (parallel)");
  run->add_option("--s", sa.s, "scan reads per loop iteration (scu)")->capture_default_str();
  run->add_option("--steps", sa.steps, "scheduled steps")->required();
  run->add_option("--seed", sa.seed, "RNG seed")->required();
  run->add_option("--weights", sa.weights, "per-process scheduling weights")->delimiter(',');
  run->add_option("--theta", sa.theta, "weak-fairness floor for --weights");
  run->add_option("--crash", sa.crash, "process:step crash list")->delimiter(',');
  run->add_option("--out", sa.out, "trace .json or stats .csv path")->required();
  run->add_flag("--full-precision", sa.full_precision, "17 significant digits in CSV");
  run->callback([&rc, &sa]() { rc = run_sim(sa); });

  CLI::App* bins = app.add_subcommand("bins", "Iterated balls-into-bins game");
  bins->require_subcommand(1);
  CLI::App* bins_run = bins->add_subcommand("run", "Simulate phases and write the records");
  bins_run->add_option("--n", ba.n, "bins")->required();
  bins_run->add_option("--phases", ba.phases, "phases to simulate")->required();
  bins_run->add_option("--seed", ba.seed, "RNG seed")->required();
  bins_run->add_option("--alpha", ba.alpha, "bound constant")->capture_default_str();
  bins_run->add_option("--c", ba.c, "range constant")->capture_default_str();
  bins_run->add_option("--out", ba.out, "phase CSV path")->required();
  bins_run->callback([&rc, &ba]() { rc = run_bins_cmd(ba); });

  CLI::App* sweep = app.add_subcommand("sweep", "Latency versus n with a scaling fit");
  sweep->add_option("--model", swa.model, "scu|fai|parallel")->required();
  sweep->add_option("--mode", swa.mode, "exact|sim|bins")->required();
  sweep->add_option("--n", swa.n_list, "ascending n list")->required()->delimiter(',');
  sweep->add_option("--q", swa.q, "preamble length / counter modulus");
  sweep->add_option("--s", swa.s, "scan reads per loop iteration")->capture_default_str();
  sweep->add_option("--steps", swa.steps, "steps per point (sim mode)")->capture_default_str();
  sweep->add_option("--phases", swa.phases, "phases per point (bins mode)")
      ->capture_default_str();
  sweep->add_option("--seed", swa.seed, "RNG seed (required for sim and bins)");
  sweep->add_option("--out", swa.out, "sweep CSV path")->required();
  sweep->add_option("--fit-out", swa.fit_out, "fit diagnostics JSON path");
  sweep->add_option("--curve-out", swa.curve_out, "completion-rate curve (gnuplot format)");
  sweep->add_flag("--full-precision", swa.full_precision, "17 significant digits in CSV");
  sweep->callback([&rc, &swa]() { rc = run_sweep(swa); });

  CLI::App* crash = app.add_subcommand("crash-sweep", "Latency with processes crashed at step 0");
  crash->add_option("--n", cra.n, "total processes")->required();
  crash->add_option("--k", cra.k, "correct (never-crashed) processes")->required();
  crash->add_option("--q", cra.q, "preamble length");
  crash->add_option("--s", cra.s, "scan reads per loop iteration")->capture_default_str();
  crash->add_option("--steps", cra.steps, "scheduled steps")->capture_default_str();
  crash->add_option("--seed", cra.seed, "RNG seed")->required();
  crash->add_option("--out", cra.out, "CSV path")->required();
  crash->add_flag("--full-precision", cra.full_precision, "17 significant digits in CSV");
  crash->callback([&rc, &cra]() { rc = run_crash_sweep(cra); });

  try {
    app.parse(argc, argv);
    return rc;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
