#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "common.hpp"

namespace triest::cli {
namespace {

struct EstimatorOptions {
  std::string algo = "base";
  std::size_t memory = 0;
  double prob = 0.0;
  std::uint64_t seed = 1;
  std::uint64_t cadence = 1000;
  bool locals = false;
};

struct OutputOptions {
  std::string format = "csv";
  std::string out;

  bool json() const { return format == "json"; }
};

void add_stream_options(CLI::App* cmd, StreamOptions& s) {
  cmd->add_option("--input,-i", s.input, "Edge stream file (plain or gzip, '-' for stdin)");
  cmd->add_option("--gen", s.gen, "Synthetic stream: clique:N or er:N:P[:SEED]");
  cmd->add_flag("--multigraph", s.multigraph, "Events carry an edge label column");
  cmd->add_flag("--names", s.names, "Vertices are arbitrary names instead of integer ids");
  cmd->add_flag("--skip-invalid", s.skip_invalid, "Drop ineffective events instead of aborting");
  cmd->add_option("--stream-seed", s.stream_seed, "Seed for generators, reordering and deletion models");
  cmd->add_option("--order", s.order, "Edge order: natural, uar or bfs")->check(CLI::IsMember({"natural", "uar", "bfs"}));
  cmd->add_option("--window", s.window, "Sliding window over the last W insertions");
  cmd->add_option("--window-time", s.window_time, "Sliding window of W time units (needs timestamps)");
  cmd->add_option("--mass-q", s.mass_q, "Mass deletion: probability of an event after each insertion");
  cmd->add_option("--mass-d", s.mass_d, "Mass deletion: fraction of live edges removed per event");
}

void add_estimator_options(CLI::App* cmd, EstimatorOptions& e, bool with_algo = true) {
  if (with_algo) {
    cmd->add_option("--algo,-a", e.algo, "base, impr, fd, base-m, impr-m, fd-m, mascot-c, mascot-i or exact");
  }
  cmd->add_option("--memory,-M", e.memory, "Sample capacity M (reservoir algorithms)");
  cmd->add_option("--prob,-p", e.prob, "Edge sampling probability p (fixed-probability algorithms)");
  cmd->add_option("--seed,-s", e.seed, "Random seed");
  cmd->add_option("--cadence,-k", e.cadence, "Query every K events (and at the last one)");
  cmd->add_flag("--locals", e.locals, "Also report per-vertex estimates");
}

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--format,-f", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out,-o", o.out, "Output file (default stdout)");
}

struct ResolvedEstimator {
  AlgoChoice choice;
  std::string canonical;
};

/// Checks the memory / probability combination for the algorithm.
ResolvedEstimator resolve(const EstimatorOptions& e, StreamOptions& s) {
  if (e.cadence == 0) throw UsageError("--cadence must be positive");
  ResolvedEstimator out{parse_algo(e.algo), {}};
  const Algo a = out.choice.algo;
  if (out.choice.multigraph) s.multigraph = true;
  if (uses_memory(a)) {
    if (e.prob != 0.0) throw UsageError("--prob does not apply to " + e.algo);
    if (e.memory == 0) throw UsageError(e.algo + " needs --memory");
    if (e.memory < kMinMemory) throw UsageError("--memory must be at least 6");
  } else if (uses_probability(a)) {
    if (e.memory != 0) throw UsageError("--memory does not apply to " + e.algo);
    if (!(e.prob > 0.0 && e.prob <= 1.0)) throw UsageError(e.algo + " needs --prob in (0, 1]");
  }
  std::ostringstream os;
  os << "algo=" << e.algo << ";memory=" << e.memory << ";prob=" << format_double(e.prob)
     << ";seed=" << e.seed << ";cadence=" << e.cadence << ";locals=" << e.locals;
  out.canonical = os.str();
  return out;
}

void require_supported(Algo a, const StreamSpec& spec) {
  if (a == Algo::Fd || a == Algo::Exact) return;
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    if (spec.events[i].op == Op::Delete) {
      throw InputError("stream violation at event " + std::to_string(i) +
                       ": deletion given to an insertion-only algorithm");
    }
  }
}

GraphMode mode_of(const StreamOptions& s) { return s.multigraph ? GraphMode::Multigraph : GraphMode::Graph; }

Metadata base_metadata(const std::string& command, const std::string& canonical, std::uint64_t seed) {
  return {{"triest_version", TRIEST_VERSION_STRING},
          {"command", command},
          {"config_hash", fnv1a_hex(command + ";" + canonical)},
          {"seed", std::to_string(seed)}};
}

/// Streams events through an estimator, sampling a trace at query points.
template <class Est>
std::vector<TracePoint> trace_of(Est& est, const StreamSpec& spec, std::uint64_t cadence, bool locals,
                                 std::vector<std::uint64_t>* timings = nullptr) {
  std::vector<TracePoint> out;
  const std::uint64_t total = spec.events.size();
  if (timings) timings->reserve(total);
  for (std::uint64_t t = 1; t <= total; ++t) {
    if (timings) {
      const auto start = std::chrono::steady_clock::now();
      est.process(spec.events[t - 1]);
      const auto stop = std::chrono::steady_clock::now();
      timings->push_back(static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()));
    } else {
      est.process(spec.events[t - 1]);
    }
    if (is_query_point(t, total, cadence)) {
      TracePoint p{t, est.global(), {}};
      if (locals) p.locals = est.locals();
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Thin adapter giving ExactCounter the AnyEstimator interface.
struct Oracle {
  ExactCounter counter;
  explicit Oracle(GraphMode mode) : counter(mode) {}
  void process(const EdgeEvent& ev) { counter.process(ev); }
  double global() const { return counter.global_estimate(); }
  std::map<VertexId, double> locals() const { return counter.locals(); }
};

std::vector<TracePoint> truth_trace(const StreamSpec& spec, std::uint64_t cadence, bool locals) {
  Oracle oracle(spec.mode);
  return trace_of(oracle, spec, cadence, locals);
}

void report_timing(std::vector<std::uint64_t> ns) {
  if (ns.empty()) return;
  const double total = std::accumulate(ns.begin(), ns.end(), 0.0);
  auto pct = [&](double q) {
    const auto k = static_cast<std::size_t>(std::min<double>(ns.size() - 1, std::floor(q * static_cast<double>(ns.size()))));
    std::nth_element(ns.begin(), ns.begin() + static_cast<std::ptrdiff_t>(k), ns.end());
    return ns[k];
  };
  const double mean = total / static_cast<double>(ns.size());
  const auto p50 = pct(0.50);
  const auto p99 = pct(0.99);
  std::cerr << "triest: updates=" << ns.size() << " mean_ns=" << format_double(mean) << " p50_ns=" << p50
            << " p99_ns=" << p99 << " events_per_s=" << format_double(total > 0 ? 1e9 * static_cast<double>(ns.size()) / total : 0.0)
            << "\n";
}

// --- run ------------------------------------------------------------------------

int cmd_run(StreamOptions s, const EstimatorOptions& e, const OutputOptions& o) {
  const auto r = resolve(e, s);
  const auto stream = load_stream(s);
  require_supported(r.choice.algo, stream.spec);
  auto est = make_estimator(r.choice.algo, mode_of(s), e.memory, e.prob, e.seed);
  std::vector<std::uint64_t> timings;
  const auto trace = trace_of(est, stream.spec, e.cadence, e.locals, &timings);
  report_timing(std::move(timings));
  auto meta = base_metadata("run", r.canonical + ";" + s.canonical(), e.seed);
  meta.emplace_back("algo", e.algo);
  meta.emplace_back("cadence", std::to_string(e.cadence));
  meta.emplace_back("events", std::to_string(stream.spec.events.size()));
  write_output(o.out, render_trace(trace, e.locals, o.json(), meta, stream));
  return 0;
}

// --- eval -----------------------------------------------------------------------

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

nlohmann::ordered_json opt_json(std::optional<double> x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

std::string opt_text(std::optional<double> x) { return x ? format_double(*x) : ""; }

struct Evaluation {
  std::size_t points = 0;
  std::size_t mape_points = 0;
  std::optional<double> mape;
  std::size_t local_points = 0;
  std::optional<double> pearson;
  std::optional<double> eps;
};

Evaluation evaluate(const std::vector<TracePoint>& est, const std::vector<TracePoint>& truth, bool locals) {
  if (est.size() != truth.size()) {
    throw UsageError("join error: estimate has " + std::to_string(est.size()) + " query points, truth has " +
                     std::to_string(truth.size()));
  }
  Evaluation ev;
  ev.points = est.size();
  std::vector<double> ts, es, pears, epss;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (est[i].t != truth[i].t) {
      throw UsageError("join error: query time " + std::to_string(est[i].t) + " does not match " +
                       std::to_string(truth[i].t) + " at point " + std::to_string(i));
    }
    ts.push_back(truth[i].global);
    es.push_back(est[i].global);
    if (truth[i].global > 0) ++ev.mape_points;
    if (locals) {
      if (auto p = local_pearson(truth[i].locals, est[i].locals)) pears.push_back(*p);
      if (auto x = eps_error(truth[i].locals, est[i].locals)) epss.push_back(*x);
    }
  }
  ev.mape = mape(ts, es);
  ev.local_points = std::max(pears.size(), epss.size());
  ev.pearson = mean_of(pears);
  ev.eps = mean_of(epss);
  return ev;
}

std::vector<TracePoint> read_trace_file(const std::string& path) {
  try {
    return parse_trace(detail::read_text(path));
  } catch (const nlohmann::json::exception& err) {
    throw InputError("bad trace '" + path + "': " + err.what());
  } catch (const UsageError& err) {
    throw InputError("bad trace '" + path + "': " + err.what());
  }
}

int cmd_eval(StreamOptions s, EstimatorOptions e, const OutputOptions& o, const std::string& estimate_path,
             const std::string& truth_path, bool algo_given) {
  if (!estimate_path.empty() && algo_given) throw UsageError("give either --estimate or --algo, not both");
  if (estimate_path.empty() && !algo_given) throw UsageError("eval needs --estimate or --algo");
  const bool need_stream = estimate_path.empty() || truth_path.empty();
  std::string canonical = "estimate=" + estimate_path + ";truth=" + truth_path;

  std::optional<LoadedStream> stream;
  std::optional<ResolvedEstimator> r;
  if (algo_given) {
    r = resolve(e, s);
    canonical += ";" + r->canonical;
  } else if (e.cadence == 0) {
    throw UsageError("--cadence must be positive");
  } else {
    canonical += ";cadence=" + std::to_string(e.cadence) + ";locals=" + std::to_string(e.locals);
  }
  if (need_stream) {
    stream = load_stream(s);
    canonical += ";" + s.canonical();
  }

  std::vector<TracePoint> est;
  if (r) {
    require_supported(r->choice.algo, stream->spec);
    auto any = make_estimator(r->choice.algo, mode_of(s), e.memory, e.prob, e.seed);
    est = trace_of(any, stream->spec, e.cadence, e.locals);
  } else {
    est = read_trace_file(estimate_path);
  }
  const auto truth = truth_path.empty() ? truth_trace(stream->spec, e.cadence, e.locals) : read_trace_file(truth_path);
  const auto ev = evaluate(est, truth, e.locals);

  auto meta = base_metadata("eval", canonical, e.seed);
  meta.emplace_back("cadence", std::to_string(e.cadence));
  if (o.json()) {
    nlohmann::ordered_json doc;
    for (const auto& [k, v] : meta) doc["meta"][k] = v;
    doc["points"] = ev.points;
    doc["mape"] = opt_json(ev.mape);
    doc["mape_points"] = ev.mape_points;
    if (e.locals) {
      doc["local"]["points"] = ev.local_points;
      doc["local"]["pearson"] = opt_json(ev.pearson);
      doc["local"]["eps_error"] = opt_json(ev.eps);
    }
    write_output(o.out, doc.dump(2) + "\n");
  } else {
    std::string text = csv_header(meta) + "metric,value\n";
    text += "points," + std::to_string(ev.points) + "\n";
    text += "mape," + opt_text(ev.mape) + "\n";
    text += "mape_points," + std::to_string(ev.mape_points) + "\n";
    if (e.locals) {
      text += "local_points," + std::to_string(ev.local_points) + "\n";
      text += "pearson," + opt_text(ev.pearson) + "\n";
      text += "eps_error," + opt_text(ev.eps) + "\n";
    }
    write_output(o.out, text);
  }
  return 0;
}

// --- mc -------------------------------------------------------------------------

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : detail::split(text, ',')) out.push_back(detail::parse_number<std::uint64_t>(part, "trial seed"));
  return out;
}

/// Running per-point moments, fed in trial order.
struct PointAccumulator {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
    min = std::min(min, x);
    max = std::max(max, x);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

int cmd_mc(StreamOptions s, const EstimatorOptions& e, const OutputOptions& o, std::size_t trials,
           unsigned threads, const std::string& trial_seeds_text) {
  if (trials < 2) throw UsageError("--trials must be at least 2");
  const auto r = resolve(e, s);
  std::vector<std::uint64_t> seeds;
  if (!trial_seeds_text.empty()) {
    seeds = parse_seed_list(trial_seeds_text);
    if (seeds.size() != trials) throw UsageError("--trial-seeds must list exactly --trials seeds");
  } else {
    for (std::size_t i = 0; i < trials; ++i) seeds.push_back(derive_seed(e.seed, i));
  }
  const auto stream = load_stream(s);
  require_supported(r.choice.algo, stream.spec);
  const auto truth = truth_trace(stream.spec, e.cadence, false);
  const GraphMode mode = mode_of(s);

  std::vector<PointAccumulator> acc(truth.size());
  const std::size_t chunk = 4096;
  for (std::size_t first = 0; first < trials; first += chunk) {
    const std::size_t count = std::min(chunk, trials - first);
    const auto results = run_trials(count, threads, [&](std::size_t i) {
      auto est = make_estimator(r.choice.algo, mode, e.memory, e.prob, seeds[first + i]);
      std::vector<double> out;
      out.reserve(truth.size());
      for (const auto& p : trace_of(est, stream.spec, e.cadence, false)) out.push_back(p.global);
      return out;
    });
    for (const auto& row : results)
      for (std::size_t j = 0; j < row.size(); ++j) acc[j].add(row[j]);
  }

  std::vector<std::string> warnings;
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    warnings.push_back("seed-collision");
  }
  const bool random_algo = r.choice.algo != Algo::Exact;
  const bool all_zero = std::ranges::all_of(acc, [](const PointAccumulator& a) { return a.variance() == 0.0; });
  if (random_algo && all_zero) warnings.push_back("degenerate-variance");
  for (const auto& w : warnings) std::cerr << "triest: warning: " << w << "\n";

  auto meta = base_metadata("mc", r.canonical + ";" + s.canonical() + ";trials=" + std::to_string(trials) +
                                      ";trial_seeds=" + trial_seeds_text,
                            e.seed);
  meta.emplace_back("algo", e.algo);
  meta.emplace_back("trials", std::to_string(trials));
  meta.emplace_back("cadence", std::to_string(e.cadence));
  if (!warnings.empty()) {
    std::string joined;
    for (const auto& w : warnings) joined += (joined.empty() ? "" : ",") + w;
    meta.emplace_back("warning", joined);
  }
  const double rn = static_cast<double>(trials);
  if (o.json()) {
    nlohmann::ordered_json doc;
    for (const auto& [k, v] : meta) doc["meta"][k] = v;
    doc["points"] = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const auto& a = acc[j];
      doc["points"].push_back({{"t", truth[j].t},
                               {"truth", truth[j].global},
                               {"mean", a.mean},
                               {"variance", a.variance()},
                               {"stderr", std::sqrt(a.variance() / rn)},
                               {"min", a.min},
                               {"max", a.max}});
    }
    write_output(o.out, doc.dump(2) + "\n");
  } else {
    std::string text = csv_header(meta) + "t,truth,mean,variance,stderr,min,max\n";
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const auto& a = acc[j];
      text += std::to_string(truth[j].t) + "," + format_double(truth[j].global) + "," + format_double(a.mean) + "," +
              format_double(a.variance()) + "," + format_double(std::sqrt(a.variance() / rn)) + "," +
              format_double(a.min) + "," + format_double(a.max) + "\n";
    }
    write_output(o.out, text);
  }
  return 0;
}

// --- matched --------------------------------------------------------------------

struct MatchedRow {
  std::uint64_t seed = 0;
  std::size_t m_prime = 0;
  std::size_t memory = 0;
  std::optional<double> mape_baseline;
  std::optional<double> mape_triest;
};

int cmd_matched(StreamOptions s, EstimatorOptions e, const OutputOptions& o, std::string triest_algo,
                std::size_t trials, unsigned threads) {
  if (trials < 1) throw UsageError("--trials must be positive");
  if (e.memory != 0) throw UsageError("matched derives the memory from the baseline; drop --memory");
  const auto r = resolve(e, s);
  if (!uses_probability(r.choice.algo)) throw UsageError("matched needs --algo mascot-c or mascot-i");
  if (triest_algo.empty()) triest_algo = r.choice.algo == Algo::MascotC ? "base" : "impr";
  const auto partner = parse_algo(triest_algo);
  if (!uses_memory(partner.algo) || partner.multigraph) throw UsageError("--triest must be base, impr or fd");

  const auto stream = load_stream(s);
  require_supported(r.choice.algo, stream.spec);
  require_supported(partner.algo, stream.spec);
  const auto truth = truth_trace(stream.spec, e.cadence, false);
  std::vector<double> truths;
  for (const auto& p : truth) truths.push_back(p.global);
  const GraphMode mode = mode_of(s);

  auto mape_of = [&](AnyEstimator& est) {
    std::vector<double> ests;
    for (const auto& p : trace_of(est, stream.spec, e.cadence, false)) ests.push_back(p.global);
    return mape(truths, ests);
  };
  const auto rows = run_trials(trials, threads, [&](std::size_t i) {
    MatchedRow row;
    row.seed = derive_seed(e.seed, i);
    auto baseline = make_estimator(r.choice.algo, mode, 0, e.prob, row.seed);
    row.mape_baseline = mape_of(baseline);
    row.m_prime = baseline.sample_size();
    row.memory = std::max(row.m_prime, kMinMemory);
    auto ours = make_estimator(partner.algo, mode, row.memory, 0.0, row.seed);
    row.mape_triest = mape_of(ours);
    return row;
  });

  std::vector<double> base_mapes, ours_mapes;
  for (const auto& row : rows) {
    if (row.mape_baseline) base_mapes.push_back(*row.mape_baseline);
    if (row.mape_triest) ours_mapes.push_back(*row.mape_triest);
  }
  const auto mean_base = mean_of(base_mapes);
  const auto mean_ours = mean_of(ours_mapes);
  std::optional<double> change;
  if (mean_base && mean_ours && *mean_base > 0) change = (*mean_ours - *mean_base) / *mean_base;

  auto meta = base_metadata("matched", r.canonical + ";triest=" + triest_algo + ";trials=" + std::to_string(trials) +
                                           ";" + s.canonical(),
                            e.seed);
  meta.emplace_back("baseline", e.algo);
  meta.emplace_back("triest", triest_algo);
  meta.emplace_back("prob", format_double(e.prob));
  meta.emplace_back("trials", std::to_string(trials));
  meta.emplace_back("cadence", std::to_string(e.cadence));
  if (o.json()) {
    nlohmann::ordered_json doc;
    for (const auto& [k, v] : meta) doc["meta"][k] = v;
    doc["trials"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      doc["trials"].push_back({{"trial", i},
                               {"seed", rows[i].seed},
                               {"M_prime", rows[i].m_prime},
                               {"memory", rows[i].memory},
                               {"mape_baseline", opt_json(rows[i].mape_baseline)},
                               {"mape_triest", opt_json(rows[i].mape_triest)}});
    }
    doc["summary"] = {{"mean_mape_baseline", opt_json(mean_base)},
                      {"mean_mape_triest", opt_json(mean_ours)},
                      {"relative_change", opt_json(change)}};
    write_output(o.out, doc.dump(2) + "\n");
  } else {
    std::string text = csv_header(meta) + "trial,seed,M_prime,memory,mape_baseline,mape_triest\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      text += std::to_string(i) + "," + std::to_string(rows[i].seed) + "," + std::to_string(rows[i].m_prime) + "," +
              std::to_string(rows[i].memory) + "," + opt_text(rows[i].mape_baseline) + "," +
              opt_text(rows[i].mape_triest) + "\n";
    }
    text += "# mean_mape_baseline=" + opt_text(mean_base) + "\n";
    text += "# mean_mape_triest=" + opt_text(mean_ours) + "\n";
    text += "# relative_change=" + opt_text(change) + "\n";
    write_output(o.out, text);
  }
  return 0;
}

// --- oracle ---------------------------------------------------------------------

int cmd_oracle(StreamOptions s, const OutputOptions& o, std::size_t memory, std::size_t prefix, bool locals) {
  const auto stream = load_stream(s);
  const std::size_t n = prefix == 0 ? stream.spec.events.size() : std::min(prefix, stream.spec.events.size());
  ExactCounter counter(stream.spec.mode);
  for (std::size_t i = 0; i < n; ++i) counter.process(stream.spec.events[i]);
  auto st = pair_stats(counter.graph());
  const std::span<const EdgeEvent> head(stream.spec.events.data(), n);
  const bool insertion_only = std::ranges::all_of(head, [](const EdgeEvent& ev) { return ev.op == Op::Insert; });
  if (memory != 0 && insertion_only && stream.spec.mode == GraphMode::Graph) st.z = z_stat(head, memory);

  auto meta = base_metadata("oracle", s.canonical() + ";memory=" + std::to_string(memory) + ";prefix=" +
                                          std::to_string(prefix) + ";locals=" + std::to_string(locals),
                            s.stream_seed);
  nlohmann::ordered_json doc;
  for (const auto& [k, v] : meta) doc["meta"][k] = v;
  doc["t"] = n;
  doc["edges"] = counter.graph().size();
  doc["total"] = st.total;
  doc["r"] = st.r;
  doc["w"] = st.w;
  doc["h"] = st.h;
  doc["r1"] = st.r1;
  doc["r2"] = st.r2;
  doc["q"] = st.q;
  doc["z"] = st.z ? nlohmann::ordered_json(*st.z) : nlohmann::ordered_json(nullptr);
  if (locals) {
    doc["locals"] = nlohmann::ordered_json::object();
    for (const auto& [v, c] : st.locals) doc["locals"][stream.vertex_label(v)] = c;
  }
  if (o.json()) {
    write_output(o.out, doc.dump(2) + "\n");
  } else {
    std::string text = csv_header(meta) + "stat,value\n";
    for (const char* key : {"t", "edges", "total", "r", "w", "h", "r1", "r2", "q", "z"}) {
      text += std::string(key) + "," + (doc[key].is_null() ? std::string() : doc[key].dump()) + "\n";
    }
    write_output(o.out, text);
  }
  return 0;
}

// --- theory ---------------------------------------------------------------------

class Params {
 public:
  explicit Params(const std::vector<std::string>& items) {
    for (const auto& item : items) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      if (!values_.emplace(key, detail::parse_number<double>(item.substr(eq + 1), key)).second) {
        throw UsageError("duplicate parameter '" + key + "'");
      }
    }
  }

  double real(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("missing parameter '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  std::uint64_t count(const std::string& key) {
    const double x = real(key);
    if (!(x >= 0) || std::floor(x) != x || x > 9.007199254740992e15) {
      throw UsageError("parameter '" + key + "' must be a non-negative integer");
    }
    return static_cast<std::uint64_t>(x);
  }

  void finish() const {
    for (const auto& [k, v] : values_) {
      if (!used_.contains(k)) throw UsageError("unknown parameter '" + k + "'");
    }
  }

  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
  std::set<std::string> used_;
};

nlohmann::ordered_json breakdown(const VarianceBreakdown& v, bool multigraph) {
  nlohmann::ordered_json out;
  out["delta_term"] = v.delta_term;
  out["r_term"] = v.r_term;
  if (multigraph) out["r2_term"] = v.r2_term;
  out["w_term"] = v.w_term;
  return out;
}

int cmd_theory(const std::string& quantity, const std::vector<std::string>& items, const OutputOptions& o) {
  Params p(items);
  nlohmann::ordered_json doc;
  doc["quantity"] = quantity;
  nlohmann::ordered_json value;
  nlohmann::ordered_json terms;
  try {
    if (quantity == "xi") {
      value = xi(p.count("a"), p.count("b"), p.count("M"));
    } else if (quantity == "eta") {
      value = eta(p.count("t"), p.count("M"));
    } else if (quantity == "psi") {
      value = psi(p.count("a"), p.real("b"), p.real("c"));
    } else if (quantity == "kappa") {
      value = kappa(p.count("s"), p.count("d_in"), p.count("d_out"), p.count("M"));
    } else if (quantity == "base-variance") {
      const auto v = base_variance(p.real("total"), p.real("r"), p.real("w"), p.count("t"), p.count("M"));
      value = v.total;
      terms = breakdown(v, false);
    } else if (quantity == "multi-variance") {
      const auto v = multi_variance(p.real("total"), p.real("r1"), p.real("r2"), p.real("q"), p.count("t"),
                                    p.count("M"));
      value = v.total;
      terms = breakdown(v, true);
    } else if (quantity == "impr-bound") {
      value = impr_variance_bound(p.real("total"), p.real("z"), p.count("t"), p.count("M"));
    } else if (quantity == "fd-bound") {
      value = fd_variance_bound(p.real("total"), p.real("r"), p.count("s"), p.count("M"), p.real("alpha"),
                                p.real("alpha_prime"), p.real("kappa"));
    } else if (quantity == "mascot-variance") {
      value = mascot_c_variance(p.real("total"), p.real("r"), p.real("p"));
    } else if (quantity == "min-m-base") {
      value = min_M_base(p.real("eps"), p.real("delta"), p.real("h"), p.real("total"), p.real("t"));
    } else if (quantity == "min-m-impr") {
      value = min_M_impr(p.real("eps"), p.real("delta"), p.real("z"), p.real("total"), p.real("t"));
    } else if (quantity == "min-m-fd") {
      value = min_M_fd(p.real("eps"), p.real("delta"), p.real("r"), p.real("total"), p.real("s"), p.real("kappa"),
                       p.real("alpha"), p.real("alpha_prime"));
    } else {
      throw UsageError("unknown quantity '" + quantity +
                       "' (xi, eta, psi, kappa, base-variance, multi-variance, impr-bound, fd-bound, "
                       "mascot-variance, min-m-base, min-m-impr, min-m-fd)");
    }
  } catch (const std::domain_error& err) {
    throw UsageError(err.what());
  }
  p.finish();
  doc["inputs"] = p.values();
  doc["value"] = value;
  if (!terms.is_null()) doc["terms"] = terms;
  if (o.format == "csv") {
    std::string text = "quantity,value\n" + quantity + "," + value.dump() + "\n";
    write_output(o.out, text);
  } else {
    write_output(o.out, doc.dump(2) + "\n");
  }
  return 0;
}

// --- transform ------------------------------------------------------------------

int cmd_transform(StreamOptions s, const std::string& out) {
  const auto stream = load_stream(s);
  std::string text;
  for (const auto& ev : stream.spec.events) {
    if (!stream.names) {
      text += format_event(ev);
    } else {
      text += ev.op == Op::Insert ? "+ " : "- ";
      text += stream.vertex_label(ev.edge.u) + " " + stream.vertex_label(ev.edge.v);
      if (ev.has_label) text += " " + std::to_string(ev.edge.label);
      if (ev.ts) text += " " + std::to_string(*ev.ts);
    }
    text += "\n";
  }
  write_output(out, text);
  return 0;
}

}  // namespace
}  // namespace triest::cli

int main(int argc, char** argv) {
  using namespace triest::cli;
  CLI::App app{"Streaming triangle counting with fixed memory"};
  app.set_version_flag("--version", std::string(TRIEST_VERSION_STRING));
  app.require_subcommand(1);

  StreamOptions stream;
  EstimatorOptions est;
  OutputOptions out;
  std::string estimate_path, truth_path, trial_seeds, triest_algo, quantity;
  std::vector<std::string> params;
  std::size_t trials = 100, oracle_memory = 0, prefix = 0;
  unsigned threads = triest::default_threads();

  auto* run = app.add_subcommand("run", "Stream events through one estimator and write its trace");
  add_stream_options(run, stream);
  add_estimator_options(run, est);
  add_output_options(run, out);

  auto* eval = app.add_subcommand("eval", "Compare an estimate trace with the exact counts");
  add_stream_options(eval, stream);
  auto* eval_algo = eval->add_option("--algo,-a", est.algo, "Run this algorithm instead of reading --estimate");
  add_estimator_options(eval, est, false);
  eval->add_option("--estimate", estimate_path, "Estimate trace (csv or json)");
  eval->add_option("--truth", truth_path, "Truth trace (csv or json); default: exact counts of the stream");
  add_output_options(eval, out);

  auto* mc = app.add_subcommand("mc", "Monte-Carlo moments of an estimator over independent seeds");
  add_stream_options(mc, stream);
  add_estimator_options(mc, est);
  mc->add_option("--trials,-R", trials, "Number of trials");
  mc->add_option("--threads,-j", threads, "Worker threads (default: TRIEST_THREADS or all cores)");
  mc->add_option("--trial-seeds", trial_seeds, "Comma-separated seeds, one per trial");
  add_output_options(mc, out);

  auto* matched = app.add_subcommand("matched", "Fixed-probability baseline against a reservoir estimator of equal memory");
  add_stream_options(matched, stream);
  add_estimator_options(matched, est);
  matched->add_option("--triest", triest_algo, "Reservoir algorithm: base, impr or fd");
  matched->add_option("--trials,-R", trials, "Number of paired trials");
  matched->add_option("--threads,-j", threads, "Worker threads (default: TRIEST_THREADS or all cores)");
  add_output_options(matched, out);

  auto* oracle = app.add_subcommand("oracle", "Exact triangle statistics of the stream");
  add_stream_options(oracle, stream);
  oracle->add_option("--memory,-M", oracle_memory, "Memory used for the insertion-order pair count z");
  oracle->add_option("--prefix", prefix, "Only the first N events (default all)");
  oracle->add_flag("--locals", est.locals, "Include per-vertex counts");
  add_output_options(oracle, out);

  auto* theory = app.add_subcommand("theory", "Evaluate a closed-form quantity");
  theory->add_option("quantity", quantity, "Quantity name")->required();
  theory->add_option("params", params, "key=value arguments");
  add_output_options(theory, out);

  auto* transform = app.add_subcommand("transform", "Apply ordering and deletion models and print the stream");
  add_stream_options(transform, stream);
  transform->add_option("--out,-o", out.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 1;
  }

  // oracle and theory default to JSON unless --format was given
  auto default_json = [&](CLI::App* cmd) {
    if (cmd->count("--format") == 0) out.format = "json";
  };

  try {
    if (run->parsed()) return cmd_run(stream, est, out);
    if (eval->parsed()) {
      if (eval->count("--format") == 0) out.format = "json";
      return cmd_eval(stream, est, out, estimate_path, truth_path, eval_algo->count() > 0);
    }
    if (mc->parsed()) return cmd_mc(stream, est, out, trials, threads, trial_seeds);
    if (matched->parsed()) {
      if (matched->count("--algo") == 0) throw UsageError("matched needs --algo mascot-c or mascot-i");
      return cmd_matched(stream, est, out, triest_algo, trials, threads);
    }
    if (oracle->parsed()) {
      default_json(oracle);
      return cmd_oracle(stream, out, oracle_memory, prefix, est.locals);
    }
    if (theory->parsed()) {
      default_json(theory);
      return cmd_theory(quantity, params, out);
    }
    if (transform->parsed()) return cmd_transform(stream, out.out);
  } catch (const UsageError& err) {
    std::cerr << "triest: " << err.what() << "\n";
    return 1;
  } catch (const InputError& err) {
    std::cerr << "triest: " << err.what() << "\n";
    return 2;
  } catch (const triest::StreamViolation& err) {
    std::cerr << "triest: " << err.what() << "\n";
    return 2;
  } catch (const triest::UnsupportedEvent& err) {
    std::cerr << "triest: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "triest: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
