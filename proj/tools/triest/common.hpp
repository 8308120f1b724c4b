#pragma once

#include <zlib.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "triest/triest.hpp"

#ifndef TRIEST_VERSION_STRING
#define TRIEST_VERSION_STRING "unknown"
#endif

namespace triest::cli {

/// Bad flags or inconsistent options (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that is not a valid stream for the requested processing (exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  auto [ptr, ec] = std::to_chars(buf, buf + 16, h, 16);
  std::string out(buf, ptr);
  return std::string(16 - out.size(), '0') + out;
}

// --- algorithms ---------------------------------------------------------------

enum class Algo : std::uint8_t { Base, Impr, Fd, MascotC, MascotI, Exact };

struct AlgoChoice {
  Algo algo;
  bool multigraph;
};

inline AlgoChoice parse_algo(const std::string& name) {
  static const std::map<std::string, AlgoChoice> table{
      {"base", {Algo::Base, false}},       {"impr", {Algo::Impr, false}},
      {"fd", {Algo::Fd, false}},           {"base-m", {Algo::Base, true}},
      {"impr-m", {Algo::Impr, true}},      {"fd-m", {Algo::Fd, true}},
      {"mascot-c", {Algo::MascotC, false}}, {"mascot-i", {Algo::MascotI, false}},
      {"exact", {Algo::Exact, false}},
  };
  auto it = table.find(name);
  if (it == table.end()) throw UsageError("unknown algorithm '" + name + "'");
  return it->second;
}

inline bool uses_memory(Algo a) { return a == Algo::Base || a == Algo::Impr || a == Algo::Fd; }
inline bool uses_probability(Algo a) { return a == Algo::MascotC || a == Algo::MascotI; }

/// Any estimator behind one interface.
class AnyEstimator {
 public:
  using Variant = std::variant<TriestBase, TriestImpr, TriestFd, Mascot, ExactCounter>;

  explicit AnyEstimator(Variant v) : v_(std::move(v)) {}

  void process(const EdgeEvent& ev) {
    std::visit([&](auto& est) { est.process(ev); }, v_);
  }
  double global() const {
    return std::visit([](const auto& est) { return est.global_estimate(); }, v_);
  }
  std::map<VertexId, double> locals() const {
    return std::visit([](const auto& est) { return est.locals(); }, v_);
  }
  std::size_t sample_size() const {
    return std::visit(
        [](const auto& est) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(est)>, ExactCounter>) {
            return est.graph().size();
          } else {
            return est.sample().size();
          }
        },
        v_);
  }

 private:
  Variant v_;
};

inline AnyEstimator make_estimator(Algo algo, GraphMode mode, std::size_t memory, double prob,
                                   std::uint64_t seed) {
  switch (algo) {
    case Algo::Base:
      return AnyEstimator(TriestBase(memory, seed, mode));
    case Algo::Impr:
      return AnyEstimator(TriestImpr(memory, seed, mode));
    case Algo::Fd:
      return AnyEstimator(TriestFd(memory, seed, mode));
    case Algo::MascotC:
      return AnyEstimator(Mascot(MascotVariant::Conditional, prob, seed, mode));
    case Algo::MascotI:
      return AnyEstimator(Mascot(MascotVariant::Improved, prob, seed, mode));
    case Algo::Exact:
      return AnyEstimator(ExactCounter(mode));
  }
  throw UsageError("unknown algorithm");
}

// --- stream input ---------------------------------------------------------------

struct StreamOptions {
  std::string input;
  std::string gen;
  bool multigraph = false;
  bool names = false;
  bool skip_invalid = false;
  std::uint64_t stream_seed = 1;
  std::string order = "natural";
  std::int64_t window = 0;
  std::int64_t window_time = 0;
  double mass_q = -1.0;
  double mass_d = 0.5;

  std::string canonical() const {
    std::ostringstream os;
    os << "input=" << input << ";gen=" << gen << ";multigraph=" << multigraph << ";names=" << names
       << ";skip_invalid=" << skip_invalid << ";stream_seed=" << stream_seed << ";order=" << order
       << ";window=" << window << ";window_time=" << window_time << ";mass_q=" << format_double(mass_q)
       << ";mass_d=" << format_double(mass_d);
    return os.str();
  }
};

struct LoadedStream {
  StreamSpec spec;
  std::optional<VertexDictionary> names;

  std::string vertex_label(VertexId v) const { return names ? names->name(v) : std::to_string(v); }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("bad " + what + " '" + text + "'");
  }
  return value;
}

inline StreamSpec generate(const std::string& spec, std::uint64_t default_seed) {
  const auto parts = split(spec, ':');
  if (parts[0] == "clique" && parts.size() == 2) {
    return clique_stream(parse_number<std::uint64_t>(parts[1], "clique size"));
  }
  if (parts[0] == "er" && (parts.size() == 3 || parts.size() == 4)) {
    const auto n = parse_number<std::uint64_t>(parts[1], "vertex count");
    const auto p = parse_number<double>(parts[2], "edge probability");
    const auto seed = parts.size() == 4 ? parse_number<std::uint64_t>(parts[3], "seed") : default_seed;
    return erdos_renyi_stream(n, p, seed);
  }
  throw UsageError("bad generator '" + spec + "' (expected clique:N or er:N:P[:SEED])");
}

/// Reads a plain or gzip-compressed text stream ("-" is standard input).
inline std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw UsageError("cannot open '" + path + "'");
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  int err = 0;
  const char* msg = gzerror(f, &err);
  const std::string message = msg ? msg : "";
  gzclose(f);
  if (n < 0 || err < 0) throw InputError("error reading '" + path + "': " + message);
  return out;
}

}  // namespace detail

/// Loads, validates and transforms the input stream. Parse errors and stream
/// violations are raised as InputError.
inline LoadedStream load_stream(const StreamOptions& opt) {
  if (opt.input.empty() == opt.gen.empty()) throw UsageError("give exactly one of --input and --gen");
  LoadedStream out;
  const GraphMode mode = opt.multigraph ? GraphMode::Multigraph : GraphMode::Graph;
  try {
    if (!opt.input.empty()) {
      std::istringstream in(detail::read_text(opt.input));
      if (opt.names) out.names.emplace();
      out.spec = read_stream(in, mode, out.names ? &*out.names : nullptr);
    } else {
      out.spec = detail::generate(opt.gen, opt.stream_seed);
      out.spec.mode = mode;
      if (opt.multigraph)
        for (auto& ev : out.spec.events) ev.has_label = true;
    }
  } catch (const ParseError& e) {
    throw InputError(std::string("parse error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  auto report = validate_stream(out.spec, opt.skip_invalid ? ValidityPolicy::SkipInvalid : ValidityPolicy::Strict);
  if (!report.ok()) {
    throw InputError("stream violation at event " + std::to_string(*report.first_violation) + ": " +
                     report.reason);
  }
  if (report.dropped) {
    std::cerr << "triest: dropped " << report.dropped << " ineffective events\n";
  }
  out.spec = std::move(report.filtered);

  const bool deletes = opt.window > 0 || opt.window_time > 0 || opt.mass_q >= 0.0;
  if ((opt.window > 0) + (opt.window_time > 0) + (opt.mass_q >= 0.0) > 1) {
    throw UsageError("--window, --window-time and --mass-q are mutually exclusive");
  }
  if ((opt.order != "natural" || deletes) && !out.spec.insertion_only()) {
    throw InputError("reordering and deletion models need an insertion-only input stream");
  }
  Order order = Order::Natural;
  if (opt.order == "uar") {
    order = Order::Uar;
  } else if (opt.order == "bfs") {
    order = Order::Bfs;
  } else if (opt.order != "natural") {
    throw UsageError("unknown order '" + opt.order + "'");
  }
  const std::uint64_t transform_seed = derive_seed(opt.stream_seed, 0x5eed);
  if (order != Order::Natural) out.spec = reorder(out.spec, order, transform_seed);
  try {
    if (opt.window > 0) out.spec = apply_sliding_window(out.spec, Window::by_count(opt.window));
    if (opt.window_time > 0) out.spec = apply_sliding_window(out.spec, Window::by_time(opt.window_time));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (opt.mass_q >= 0.0) {
    if (opt.mass_q > 1.0 || opt.mass_d < 0.0 || opt.mass_d > 1.0) {
      throw UsageError("--mass-q and --mass-d must lie in [0, 1]");
    }
    out.spec = apply_mass_deletion(out.spec, opt.mass_q, opt.mass_d, derive_seed(transform_seed, 1));
  }
  return out;
}

// --- traces ---------------------------------------------------------------------

struct TracePoint {
  std::uint64_t t = 0;
  double global = 0.0;
  std::map<VertexId, double> locals;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string csv_header(const Metadata& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  return out;
}

inline std::string render_trace(const std::vector<TracePoint>& trace, bool locals, bool json,
                                const Metadata& meta, const LoadedStream& stream) {
  if (json) {
    nlohmann::ordered_json doc;
    for (const auto& [k, v] : meta) doc["meta"][k] = v;
    doc["points"] = nlohmann::ordered_json::array();
    for (const auto& p : trace) {
      nlohmann::ordered_json row;
      row["t"] = p.t;
      row["estimate_global"] = p.global;
      if (locals) {
        row["locals"] = nlohmann::ordered_json::object();
        for (const auto& [v, x] : p.locals) row["locals"][stream.vertex_label(v)] = x;
      }
      doc["points"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
  }
  std::string out = csv_header(meta);
  out += locals ? "t,estimate_global,vertex,estimate_local\n" : "t,estimate_global\n";
  for (const auto& p : trace) {
    const std::string prefix = std::to_string(p.t) + "," + format_double(p.global);
    if (!locals) {
      out += prefix + "\n";
    } else if (p.locals.empty()) {
      out += prefix + ",,\n";
    } else {
      for (const auto& [v, x] : p.locals) out += prefix + "," + stream.vertex_label(v) + "," + format_double(x) + "\n";
    }
  }
  return out;
}

/// Parses a trace written by render_trace (CSV or JSON, auto-detected).
/// Vertex columns must be numeric ids.
inline std::vector<TracePoint> parse_trace(const std::string& text) {
  std::vector<TracePoint> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& row : doc.at("points")) {
      TracePoint p;
      p.t = row.at("t").get<std::uint64_t>();
      p.global = row.at("estimate_global").get<double>();
      if (row.contains("locals")) {
        for (const auto& [k, v] : row["locals"].items()) {
          p.locals[detail::parse_number<VertexId>(k, "vertex")] = v.get<double>();
        }
      }
      out.push_back(std::move(p));
    }
    return out;
  }
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (cells.size() != 2 && cells.size() != 4) throw InputError("bad trace row '" + line + "'");
    const auto t = detail::parse_number<std::uint64_t>(cells[0], "trace time");
    const auto g = detail::parse_number<double>(cells[1], "trace estimate");
    if (out.empty() || out.back().t != t) out.push_back({t, g, {}});
    if (cells.size() == 4 && !cells[2].empty()) {
      out.back().locals[detail::parse_number<VertexId>(cells[2], "vertex")] =
          detail::parse_number<double>(cells[3], "local estimate");
    }
  }
  return out;
}

inline void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

}  // namespace triest::cli
