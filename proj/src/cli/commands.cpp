#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "formats.hpp"
#include "rangesel/cascade_tree.hpp"
#include "rangesel/compact_tree.hpp"
#include "rangesel/dynamic_rmp.hpp"
#include "rangesel/median_filter.hpp"
#include "rangesel/pgm.hpp"

namespace rangesel::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for a single bad operation; the stream continues.
class OpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SelectionStrategy parse_strategy(const RunConfig& cfg) {
  SelectionStrategy s;
  s.seed = cfg.seed;
  if (cfg.strategy == "randomized" || cfg.strategy == "random") {
    s.kind = SelectionStrategy::Kind::randomized;
  } else if (cfg.strategy == "mom" || cfg.strategy == "deterministic" || cfg.strategy == "median-of-medians") {
    s.kind = SelectionStrategy::Kind::deterministic;
  } else {
    throw UsageError("unknown strategy '" + cfg.strategy + "' (randomized|mom)");
  }
  return s;
}

bool eager_mode(const RunConfig& cfg) {
  if (cfg.mode == "lazy") return false;
  if (cfg.mode == "eager") return true;
  throw UsageError("unknown mode '" + cfg.mode + "' (lazy|eager)");
}

std::string structure_or(const RunConfig& cfg, const std::string& fallback) {
  const std::string s = cfg.structure.empty() ? fallback : cfg.structure;
  if (s != "cascade" && s != "compact" && s != "dynamic" && s != "oracle")
    throw UsageError("unknown structure '" + s + "' (cascade|compact|dynamic|oracle)");
  return s;
}

std::string range_error(std::int64_t l, std::int64_t r, std::size_t n) {
  return "invalid range [" + std::to_string(l) + ", " + std::to_string(r) + "] for n=" + std::to_string(n);
}

std::string rank_error(std::int64_t p, std::size_t len) {
  return "rank " + std::to_string(p) + " outside 1.." + std::to_string(len);
}

// ---- static arrays ----

template <class T>
int serve_static(const RunConfig& cfg, const std::string& structure, std::vector<T> values, LineReader& reader,
                 std::ostream& out, std::ostream& err) {
  const SelectionStrategy strategy = parse_strategy(cfg);
  const bool eager = eager_mode(cfg);
  const std::span<const T> span(values);
  std::optional<CascadeTree<T>> cascade;
  std::optional<CompactTree<T>> compact;
  if (structure == "cascade") {
    cascade.emplace(span, strategy);
    if (eager) cascade->build_eager();
  } else if (structure == "compact") {
    compact.emplace(span, strategy);
    if (eager) compact->build_eager();
  }

  const std::size_t n = values.size();
  std::string line;
  while (reader.next(line)) {
    QueryLine ql;
    try {
      ql = parse_query_line(line, reader.line_number());
    } catch (const ParseError& e) {
      out.flush();
      err << "error: " << e.what() << '\n';
      return kInputFormat;
    }
    const std::size_t ln = reader.line_number();
    if (ql.left < 1 || ql.right < ql.left || ql.right > static_cast<std::int64_t>(n)) {
      out << "error: line " << ln << ": " << range_error(ql.left, ql.right, n) << std::endl;
      continue;
    }
    RangeQuery q{static_cast<std::size_t>(ql.left), static_cast<std::size_t>(ql.right), std::nullopt};
    if (ql.rank) {
      if (*ql.rank < 1 || *ql.rank > static_cast<std::int64_t>(q.length())) {
        out << "error: line " << ln << ": " << rank_error(*ql.rank, q.length()) << std::endl;
        continue;
      }
      q.rank = static_cast<std::size_t>(*ql.rank);
    }
    Element<T> e;
    if (cascade) {
      e = cascade->query(q);
    } else if (compact) {
      e = compact->query(q);
    } else {
      e = oracle_select<T>(span, q);
    }
    out << format_value(e.value) << '\t' << e.index << std::endl;
  }
  return kOk;
}

// ---- op streams ----

class DynamicEngine {
 public:
  void insert(std::int64_t after, double value) {
    std::optional<ElementHandle> pos;
    if (after != 0) pos = lookup(after);
    ids_.push_back(rmp_.insert_after(pos, value));
  }
  void erase(std::int64_t id) {
    rmp_.erase(lookup(id));
    ids_[static_cast<std::size_t>(id - 1)] = ElementHandle{};
  }
  double query(std::int64_t a, std::int64_t b, std::optional<std::int64_t> rank) {
    const ElementHandle from = lookup(a);
    const ElementHandle to = lookup(b);
    if (rmp_.compare_positions(from, to) > 0) throw OpError("range endpoints reversed");
    const std::size_t len = rmp_.count_in_range(from, to);
    if (rank && (*rank < 1 || *rank > static_cast<std::int64_t>(len))) throw OpError(rank_error(*rank, len));
    return rmp_.query(from, to, rank ? std::optional<std::size_t>(static_cast<std::size_t>(*rank)) : std::nullopt);
  }

 private:
  ElementHandle lookup(std::int64_t id) const {
    if (id < 1 || id > static_cast<std::int64_t>(ids_.size()) || !rmp_.live(ids_[static_cast<std::size_t>(id - 1)]))
      throw OpError("unknown element id " + std::to_string(id));
    return ids_[static_cast<std::size_t>(id - 1)];
  }

  DynamicRmp<double> rmp_;
  std::vector<ElementHandle> ids_;
};

class OracleEngine {
 public:
  void insert(std::int64_t after, double value) {
    const std::size_t at = after == 0 ? 0 : position(after) + 1;
    list_.insert(list_.begin() + static_cast<std::ptrdiff_t>(at), {next_id_++, value});
  }
  void erase(std::int64_t id) { list_.erase(list_.begin() + static_cast<std::ptrdiff_t>(position(id))); }
  double query(std::int64_t a, std::int64_t b, std::optional<std::int64_t> rank) {
    const std::size_t pa = position(a);
    const std::size_t pb = position(b);
    if (pa > pb) throw OpError("range endpoints reversed");
    std::vector<double> vals;
    for (std::size_t i = pa; i <= pb; ++i) vals.push_back(list_[i].second);
    const std::size_t len = vals.size();
    if (rank && (*rank < 1 || *rank > static_cast<std::int64_t>(len))) throw OpError(rank_error(*rank, len));
    const std::size_t p = rank ? static_cast<std::size_t>(*rank) : median_rank(len);
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(p - 1), vals.end());
    return vals[p - 1];
  }

 private:
  std::size_t position(std::int64_t id) const {
    for (std::size_t i = 0; i < list_.size(); ++i)
      if (list_[i].first == id) return i;
    throw OpError("unknown element id " + std::to_string(id));
  }

  std::vector<std::pair<std::int64_t, double>> list_;
  std::int64_t next_id_ = 1;
};

template <class Engine>
int serve_ops(LineReader& reader, std::string line, std::ostream& out, std::ostream& err) {
  Engine engine;
  do {
    OpLine op;
    try {
      op = parse_op_line(line, reader.line_number());
    } catch (const ParseError& e) {
      out.flush();
      err << "error: " << e.what() << '\n';
      return kInputFormat;
    }
    try {
      if (op.kind == 'I') {
        engine.insert(op.a, op.value);
      } else if (op.kind == 'D') {
        engine.erase(op.a);
      } else {
        out << format_value(engine.query(op.a, op.b, op.rank)) << std::endl;
      }
    } catch (const OpError& e) {
      out << "error: line " << reader.line_number() << ": " << e.what() << std::endl;
    }
  } while (reader.next(line));
  return kOk;
}

// ---- bench ----

struct BenchRow {
  std::string structure;
  std::string mode;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t rep = 0;
  double wall_ms = 0;
  Stats stats;
  std::size_t payload_bits = 0;
  std::size_t peak_bytes = 0;
};

BenchRow bench_one(const std::string& structure, bool eager, SelectionStrategy strategy, std::size_t n,
                   std::size_t k, std::size_t rep, std::uint64_t seed) {
  BenchRow row{structure, eager ? "eager" : "lazy", n, k, rep, 0, {}, 0, 0};
  std::mt19937_64 rng(mix_seed(seed ^ mix_seed(n) ^ mix_seed(mix_seed(k) + rep)));
  std::uniform_real_distribution<double> val(0.0, 1.0);
  std::vector<double> data(n);
  for (auto& v : data) v = val(rng);
  std::uniform_int_distribution<std::size_t> pos(1, n);
  std::vector<RangeQuery> queries(k);
  for (auto& q : queries) {
    std::size_t a = pos(rng);
    std::size_t b = pos(rng);
    if (a > b) std::swap(a, b);
    q = RangeQuery{a, b, std::nullopt};
  }
  strategy.seed = mix_seed(seed + rep);

  const auto start = std::chrono::steady_clock::now();
  double sink = 0;
  if (structure == "cascade") {
    CascadeTree<double> t(data, strategy);
    if (eager) t.build_eager();
    for (const auto& q : queries) sink += t.query(q).value;
    row.stats = t.stats();
    row.peak_bytes = t.memory_bytes();
  } else if (structure == "compact") {
    CompactTree<double> t(data, strategy);
    if (eager) t.build_eager();
    for (const auto& q : queries) sink += t.query(q).value;
    row.stats = t.stats();
    const auto rep_space = t.space_report();
    row.payload_bits = rep_space.payload_bits();
    row.peak_bytes = rep_space.total_bytes;
  } else if (structure == "dynamic") {
    DynamicRmp<double> t;
    const auto handles = t.assign(data);
    for (const auto& q : queries) sink += t.query(handles[q.left - 1], handles[q.right - 1]);
    row.stats = t.stats();
    row.peak_bytes = t.memory_bytes();
  } else {
    for (const auto& q : queries) sink += oracle_select<double>(data, q).value;
    row.peak_bytes = n * sizeof(double);
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (sink == -1.0) row.wall_ms += 0.0;  // keeps the answers observable
  return row;
}

std::size_t parse_size(const std::string& tok) {
  const auto caret = tok.find('^');
  std::int64_t base = 0;
  std::int64_t exp = 1;
  if (!parse_int(std::string_view(tok).substr(0, caret), base) ||
      (caret != std::string::npos && !parse_int(std::string_view(tok).substr(caret + 1), exp)) || base < 0 ||
      exp < 0 || exp > 62)
    throw UsageError("bad grid value '" + tok + "'");
  std::size_t v = 1;
  for (std::int64_t i = 0; i < exp; ++i) v *= static_cast<std::size_t>(base);
  return caret == std::string::npos ? static_cast<std::size_t>(base) : v;
}

}  // namespace

std::vector<GridPoint> parse_grid(const std::string& text) {
  std::vector<std::size_t> ns;
  std::vector<std::size_t> ks;
  std::vector<std::size_t>* current = nullptr;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    std::stringstream parts(tok);
    std::string part;
    while (std::getline(parts, part, ';')) {
      part.erase(std::remove_if(part.begin(), part.end(), [](char c) { return c == ' '; }), part.end());
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq != std::string::npos) {
        const std::string key = part.substr(0, eq);
        if (key == "n") {
          current = &ns;
        } else if (key == "k") {
          current = &ks;
        } else {
          throw UsageError("unknown grid key '" + key + "'");
        }
        part = part.substr(eq + 1);
      }
      if (!current) throw UsageError("grid must start with n= or k=");
      current->push_back(parse_size(part));
    }
  }
  if (ns.empty() || ks.empty()) throw UsageError("grid needs both n= and k= lists");
  std::vector<GridPoint> grid;
  for (auto n : ns)
    for (auto k : ks) grid.push_back({n, k});
  return grid;
}

int cmd_query(const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  LineReader reader(in);
  std::string first;
  if (!reader.next(first)) {
    err << "error: empty input\n";
    return kInputFormat;
  }
  if (detect_format(first) == InputFormat::op_stream) {
    const std::string s = structure_or(cfg, "dynamic");
    if (s == "dynamic") return serve_ops<DynamicEngine>(reader, first, out, err);
    if (s == "oracle") return serve_ops<OracleEngine>(reader, first, out, err);
    throw UsageError("op-stream input needs --structure dynamic or oracle");
  }
  const std::string s = structure_or(cfg, "cascade");
  if (s == "dynamic") throw UsageError("--structure dynamic needs op-stream input");
  ValueArray values;
  try {
    values = read_static_values(reader, first);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputFormat;
  }
  return std::visit([&](auto& v) { return serve_static(cfg, s, std::move(v), reader, out, err); }, values);
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string s = structure_or(cfg, "cascade");
  const bool eager = eager_mode(cfg);
  const SelectionStrategy strategy = parse_strategy(cfg);
  const auto grid = parse_grid(cfg.grid);
  if (cfg.reps == 0) throw UsageError("--reps must be positive");
  for (const auto& g : grid)
    if (g.n == 0 || g.n >= (std::size_t{1} << 32) - 1) throw UsageError("grid n must lie in 1..2^32-2");

  std::ofstream dat;
  std::string dat_path = cfg.gnuplot;
  if (dat_path.empty() && cfg.output != "-") dat_path = cfg.output + ".dat";
  if (!dat_path.empty()) {
    dat.open(dat_path);
    if (!dat) {
      err << "error: cannot open " << dat_path << '\n';
      return kUsage;
    }
    dat << "# n k rep wall_ms comparisons elements_partitioned cascade_steps nodes_visited splits "
           "payload_bits peak_bits peak_words rebuild_elements\n";
  }
  out << "structure,mode,n,k,rep,wall_ms,comparisons,elements_partitioned,cascade_steps,nodes_visited,splits,"
         "payload_bits,peak_bits,peak_words,rebuild_elements\n";
  for (const auto& g : grid) {
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const BenchRow r = bench_one(s, eager, strategy, g.n, g.k, rep, cfg.seed);
      const std::size_t words = (r.peak_bytes + 7) / 8;
      out << r.structure << ',' << r.mode << ',' << r.n << ',' << r.k << ',' << r.rep << ',' << r.wall_ms << ','
          << r.stats.comparisons << ',' << r.stats.elements_partitioned << ',' << r.stats.cascade_steps << ','
          << r.stats.nodes_visited << ',' << r.stats.total_splits() << ',' << r.payload_bits << ','
          << r.peak_bytes * 8 << ',' << words << ',' << r.stats.rebuild_elements << '\n';
      if (dat) {
        dat << r.n << ' ' << r.k << ' ' << r.rep << ' ' << r.wall_ms << ' ' << r.stats.comparisons << ' '
            << r.stats.elements_partitioned << ' ' << r.stats.cascade_steps << ' ' << r.stats.nodes_visited << ' '
            << r.stats.total_splits() << ' ' << r.payload_bits << ' ' << r.peak_bytes * 8 << ' ' << words << ' '
            << r.stats.rebuild_elements << '\n';
      }
    }
    if (dat) dat << '\n';
  }
  out.flush();
  return kOk;
}

int cmd_filter(const RunConfig& cfg, std::ostream& err) {
  const std::string s = structure_or(cfg, "dynamic");
  if (s != "dynamic" && s != "oracle") throw UsageError("filter supports --structure dynamic or oracle");
  GrayImage img;
  try {
    if (cfg.input == "-") {
      img = read_pgm(std::cin);
    } else {
      img = read_pgm_file(cfg.input);
    }
  } catch (const PgmError& e) {
    err << "error: " << e.what() << '\n';
    return kInputFormat;
  }
  GrayImage result;
  try {
    if (s == "oracle") {
      result = naive_median_filter(img, cfg.radius);
    } else {
      FilterOptions opt;
      opt.threads = cfg.threads;
      opt.seed = cfg.seed;
      result = median_filter(img, cfg.radius, opt);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (cfg.output == "-") {
    write_pgm(std::cout, result);
    std::cout.flush();
  } else {
    write_pgm_file(cfg.output, result);
  }
  return kOk;
}

int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::mt19937_64 rng(cfg.seed);
  if (cfg.kind == "static") {
    if (cfg.n == 0) throw UsageError("--n must be positive");
    std::uniform_int_distribution<std::int64_t> val(0, static_cast<std::int64_t>(10 * cfg.n) - 1);
    std::uniform_int_distribution<std::size_t> pos(1, cfg.n);
    out << cfg.n << '\n';
    for (std::size_t i = 0; i < cfg.n; ++i) out << (i ? " " : "") << val(rng);
    out << '\n';
    for (std::size_t q = 0; q < cfg.k; ++q) {
      std::size_t a = pos(rng);
      std::size_t b = pos(rng);
      if (a > b) std::swap(a, b);
      out << a << ' ' << b;
      if (cfg.ranks) out << ' ' << std::uniform_int_distribution<std::size_t>(1, b - a + 1)(rng);
      out << '\n';
    }
  } else if (cfg.kind == "ops") {
    // Shadow list of live ids in list order so generated queries are ordered.
    std::vector<std::int64_t> list;
    std::int64_t next_id = 1;
    std::uniform_int_distribution<std::int64_t> val(0, 999);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::size_t cap = std::max<std::size_t>(cfg.n, 1);
    for (std::size_t i = 0; i < cfg.k; ++i) {
      const double c = coin(rng);
      if (list.empty() || (list.size() < cap && c < 0.5)) {
        const std::size_t at = std::uniform_int_distribution<std::size_t>(0, list.size())(rng);
        out << "I " << (at == 0 ? 0 : list[at - 1]) << ' ' << val(rng) << '\n';
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(at), next_id++);
      } else if (c < 0.75) {
        const std::size_t at = std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng);
        out << "D " << list[at] << '\n';
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(at));
      } else {
        std::uniform_int_distribution<std::size_t> pos(0, list.size() - 1);
        std::size_t a = pos(rng);
        std::size_t b = pos(rng);
        if (a > b) std::swap(a, b);
        out << "Q " << list[a] << ' ' << list[b];
        if (cfg.ranks) out << ' ' << std::uniform_int_distribution<std::size_t>(1, b - a + 1)(rng);
        out << '\n';
      }
    }
  } else if (cfg.kind == "pgm") {
    if (cfg.width == 0 || cfg.height == 0) throw UsageError("--width and --height must be positive");
    if (cfg.maxval == 0 || cfg.maxval > 65535) throw UsageError("--maxval must lie in 1..65535");
    GrayImage img(cfg.width, cfg.height, static_cast<std::uint16_t>(cfg.maxval));
    std::uniform_int_distribution<unsigned> val(0, static_cast<unsigned>(cfg.maxval));
    for (auto& p : img.pixels) p = static_cast<std::uint16_t>(val(rng));
    write_pgm(out, img);
  } else {
    err << "error: unknown kind '" << cfg.kind << "' (static|ops|pgm)\n";
    return kUsage;
  }
  out.flush();
  return out ? kOk : kUsage;
}

int run(const std::string& command, const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    if (command == "filter") return cmd_filter(cfg, err);

    std::ofstream file_out;
    std::ostream* dst = &out;
    if (cfg.output != "-") {
      file_out.open(cfg.output, std::ios::binary);
      if (!file_out) {
        err << "error: cannot open " << cfg.output << " for writing\n";
        return kUsage;
      }
      dst = &file_out;
    }
    if (command == "query") {
      std::ifstream file_in;
      std::istream* src = &in;
      if (cfg.input != "-") {
        file_in.open(cfg.input);
        if (!file_in) {
          err << "error: cannot open " << cfg.input << '\n';
          return kUsage;
        }
        src = &file_in;
      }
      return cmd_query(cfg, *src, *dst, err);
    }
    if (command == "bench") return cmd_bench(cfg, *dst, err);
    if (command == "gen") return cmd_gen(cfg, *dst, err);
    err << "error: unknown command '" << command << "'\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace rangesel::cli
