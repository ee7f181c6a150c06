#include "gloran/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gloran/engine.hpp"
#include "gloran/oracle.hpp"

namespace gloran {

void WorkloadSpec::validate() const {
  double sum = update_fraction + point_lookup_fraction +
               range_delete_fraction + range_lookup_fraction;
  if (update_fraction < 0 || point_lookup_fraction < 0 ||
      range_delete_fraction < 0 || range_lookup_fraction < 0)
    throw StoreError("workload: negative fraction");
  if (std::abs(sum - 1.0) > 1e-9)
    throw StoreError("workload: fractions must sum to 1");
  if (op_count == 0) throw StoreError("workload: op_count must be positive");
  if (range_delete_length < 1 || range_lookup_length < 1)
    throw StoreError("workload: range lengths must be >= 1");
  if (key_universe < 2) throw StoreError("workload: key_universe too small");
  if (distribution == KeyDistribution::kZipfian &&
      (zipf_theta <= 0 || zipf_theta >= 1))
    throw StoreError("workload: zipf_theta must be in (0,1)");
}

WorkloadSpec parse_workload_text(const std::string& text) {
  WorkloadSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw StoreError("workload line " + std::to_string(line_no) +
                       ": expected key = value");
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "op_count") {
        spec.op_count = std::stoull(val);
      } else if (key == "update_fraction") {
        spec.update_fraction = std::stod(val);
      } else if (key == "point_lookup_fraction") {
        spec.point_lookup_fraction = std::stod(val);
      } else if (key == "range_delete_fraction") {
        spec.range_delete_fraction = std::stod(val);
      } else if (key == "range_lookup_fraction") {
        spec.range_lookup_fraction = std::stod(val);
      } else if (key == "range_delete_length") {
        spec.range_delete_length = std::stoull(val);
      } else if (key == "range_lookup_length") {
        spec.range_lookup_length = std::stoull(val);
      } else if (key == "distribution") {
        if (val == "uniform") {
          spec.distribution = KeyDistribution::kUniform;
        } else if (val == "zipfian") {
          spec.distribution = KeyDistribution::kZipfian;
        } else {
          throw StoreError("unknown distribution: " + val);
        }
      } else if (key == "zipf_theta") {
        spec.zipf_theta = std::stod(val);
      } else if (key == "key_universe") {
        spec.key_universe = std::stoull(val);
      } else if (key == "value_size") {
        spec.value_size = std::stoull(val);
      } else if (key == "seed") {
        spec.seed = std::stoull(val);
      } else {
        throw StoreError("unknown workload key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw StoreError("workload line " + std::to_string(line_no) +
                       ": bad value for " + key);
    }
  }
  spec.validate();
  return spec;
}

WorkloadSpec load_workload_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError("cannot open workload spec: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_workload_text(buf.str());
}

// ---------------------------------------------------------------------------
// Zipfian generator (standard zeta construction with hash scrambling).

namespace {

double zeta(std::uint64_t n, double theta) {
  double sum = 0;
  for (std::uint64_t i = 1; i <= n; ++i) sum += 1.0 / std::pow(i, theta);
  return sum;
}

std::uint64_t scramble(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ull;
  x ^= x >> 33;
  return x;
}

std::uint64_t xorshift_next(std::uint64_t& s) {
  s ^= s << 13;
  s ^= s >> 7;
  s ^= s << 17;
  return s;
}

}  // namespace

ZipfianGenerator::ZipfianGenerator(std::uint64_t n, double theta)
    : n_(n), theta_(theta) {
  // Cap the exact zeta summation; beyond the cap the tail contribution is
  // extrapolated by the integral, which is ample for skew sampling.
  const std::uint64_t cap = 10'000'000;
  if (n <= cap) {
    zetan_ = zeta(n, theta);
  } else {
    double head = zeta(cap, theta);
    double tail = (std::pow(static_cast<double>(n), 1 - theta) -
                   std::pow(static_cast<double>(cap), 1 - theta)) /
                  (1 - theta);
    zetan_ = head + tail;
  }
  zeta2_ = zeta(2, theta);
  alpha_ = 1.0 / (1.0 - theta);
  eta_ = (1 - std::pow(2.0 / static_cast<double>(n), 1 - theta)) /
         (1 - zeta2_ / zetan_);
}

std::uint64_t ZipfianGenerator::next(std::uint64_t& rng_state) const {
  double u = static_cast<double>(xorshift_next(rng_state) >> 11) *
             (1.0 / 9007199254740992.0);
  double uz = u * zetan_;
  std::uint64_t rank;
  if (uz < 1.0) {
    rank = 0;
  } else if (uz < 1.0 + std::pow(0.5, theta_)) {
    rank = 1;
  } else {
    rank = static_cast<std::uint64_t>(
        static_cast<double>(n_) * std::pow(eta_ * u - eta_ + 1.0, alpha_));
    if (rank >= n_) rank = n_ - 1;
  }
  return scramble(rank) % n_;
}

std::vector<Operation> generate_workload(const WorkloadSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::uint64_t> ukey(0, spec.key_universe - 1);
  ZipfianGenerator zipf(spec.key_universe, spec.zipf_theta);
  std::uint64_t zstate = spec.seed * 0x9e3779b97f4a7c15ull + 1;

  auto draw_key = [&]() -> Key {
    if (spec.distribution == KeyDistribution::kZipfian)
      return zipf.next(zstate);
    return ukey(rng);
  };

  std::vector<Operation> ops;
  ops.reserve(spec.op_count);
  const double c1 = spec.update_fraction;
  const double c2 = c1 + spec.point_lookup_fraction;
  const double c3 = c2 + spec.range_delete_fraction;
  for (std::uint64_t i = 0; i < spec.op_count; ++i) {
    double r = unit(rng);
    Operation op;
    if (r < c1) {
      op.kind = OpKind::kUpdate;
      op.key = draw_key();
      op.value.resize(spec.value_size);
      for (char& c : op.value)
        c = static_cast<char>(rng() & 0xff);
    } else if (r < c2) {
      op.kind = OpKind::kGet;
      op.key = draw_key();
    } else if (r < c3) {
      op.kind = OpKind::kRangeDelete;
      op.key = draw_key();
      if (op.key > spec.key_universe - spec.range_delete_length)
        op.key = spec.key_universe - spec.range_delete_length;
      op.key2 = op.key + spec.range_delete_length;
    } else {
      op.kind = OpKind::kScan;
      op.key = draw_key();
      if (op.key > spec.key_universe - spec.range_lookup_length)
        op.key = spec.key_universe - spec.range_lookup_length;
      op.key2 = op.key + spec.range_lookup_length;
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

// ---------------------------------------------------------------------------
// Trace execution

namespace {

LatencyAgg aggregate_latency(std::vector<double>& ns) {
  LatencyAgg agg;
  agg.count = ns.size();
  if (ns.empty()) return agg;
  double sum = 0;
  for (double v : ns) sum += v;
  agg.mean_ns = sum / static_cast<double>(ns.size());
  std::sort(ns.begin(), ns.end());
  auto pct = [&](double p) {
    std::size_t idx = static_cast<std::size_t>(
        p * static_cast<double>(ns.size() - 1) + 0.5);
    return ns[std::min(idx, ns.size() - 1)];
  };
  agg.p50_ns = pct(0.50);
  agg.p95_ns = pct(0.95);
  agg.p99_ns = pct(0.99);
  return agg;
}

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kUpdate:
      return "update";
    case OpKind::kGet:
      return "get";
    case OpKind::kDelete:
      return "delete";
    case OpKind::kRangeDelete:
      return "range_delete";
    case OpKind::kScan:
      return "scan";
  }
  return "?";
}

std::string normalize_value(const std::string& v, std::uint64_t width) {
  std::string out = v;
  out.resize(width, '\0');
  return out;
}

}  // namespace

Metrics run_trace(const std::vector<Operation>& trace, const StoreConfig& cfg,
                  const std::string& store_dir, const RunOptions& opts) {
  std::error_code ec;
  std::filesystem::remove_all(store_dir, ec);
  auto stats = std::make_shared<IoStats>();
  std::unique_ptr<KvStore> store = create_store(cfg, store_dir, stats);
  ShadowOracle oracle;

  Metrics m;
  m.strategy = to_string(cfg.strategy);
  m.op_count = trace.size();
  std::map<std::string, std::vector<double>> lat;
  const std::uint64_t vw = cfg.value_size();

  auto wall_start = std::chrono::steady_clock::now();
  for (const Operation& op : trace) {
    auto t0 = std::chrono::steady_clock::now();
    switch (op.kind) {
      case OpKind::kUpdate:
        store->put(op.key, op.value);
        break;
      case OpKind::kGet: {
        LookupResult r = store->get(op.key);
        ++m.point_lookups;
        if (opts.check_oracle) {
          auto exp = oracle.get(op.key);
          bool ok = exp.has_value()
                        ? (r.found() &&
                           r.value == normalize_value(*exp, vw))
                        : !r.found();
          if (!ok) ++m.oracle_mismatches;
        }
        break;
      }
      case OpKind::kDelete:
        store->delete_key(op.key);
        break;
      case OpKind::kRangeDelete:
        store->range_delete(op.key, op.key2);
        ++m.range_deletes;
        break;
      case OpKind::kScan: {
        std::vector<ScanEntry> got = store->scan(op.key, op.key2);
        if (opts.check_oracle) {
          auto exp = oracle.scan(op.key, op.key2);
          bool ok = got.size() == exp.size();
          for (std::size_t i = 0; ok && i < got.size(); ++i) {
            ok = got[i].key == exp[i].first &&
                 got[i].value == normalize_value(exp[i].second, vw);
          }
          if (!ok) ++m.oracle_mismatches;
        }
        break;
      }
    }
    auto t1 = std::chrono::steady_clock::now();
    lat[op_name(op.kind)].push_back(
        std::chrono::duration<double, std::nano>(t1 - t0).count());
    if (opts.check_oracle) oracle.apply(op);
  }

  if (opts.force_bottom_gc_at_end) {
    if (auto* g = dynamic_cast<GloranStore*>(store.get())) {
      g->compact_to_bottom_and_gc();
    } else {
      store->lsm().force_flush_and_compact_to_bottom();
    }
  }
  if (opts.recheck_gets > 0) {
    std::mt19937_64 rng(opts.recheck_seed);
    std::uniform_int_distribution<std::uint64_t> ukey(0,
                                                      cfg.key_universe - 1);
    for (std::uint64_t i = 0; i < opts.recheck_gets; ++i) {
      Key key = ukey(rng);
      LookupResult r = store->get(key);
      auto exp = oracle.get(key);
      bool ok = exp.has_value()
                    ? (r.found() && r.value == normalize_value(*exp, vw))
                    : !r.found();
      if (!ok) ++m.oracle_mismatches;
    }
  }
  store->flush_all();
  auto wall_end = std::chrono::steady_clock::now();
  m.wall_seconds =
      std::chrono::duration<double>(wall_end - wall_start).count();

  for (auto& [name, v] : lat) m.latency[name] = aggregate_latency(v);

  m.data_block_reads = stats->data_block_reads;
  m.data_block_writes = stats->data_block_writes;
  m.tombstone_block_reads = stats->tombstone_block_reads;
  m.index_node_reads = stats->index_node_reads;
  m.index_node_writes = stats->index_node_writes;

  const LsmCounters& lc = store->lsm().counters();
  std::uint64_t true_pos = lc.bloom_positives - lc.bloom_false_positives;
  if (lc.bloom_probes > true_pos) {
    m.measured_bloom_fpr =
        static_cast<double>(lc.bloom_false_positives) /
        static_cast<double>(lc.bloom_probes - true_pos);
  }
  if (m.point_lookups > 0) {
    m.tombstone_reads_per_lookup =
        static_cast<double>(m.tombstone_block_reads) /
        static_cast<double>(m.point_lookups);
    m.tombstone_records_per_lookup =
        static_cast<double>(lc.tombstone_records_examined) /
        static_cast<double>(m.point_lookups);
  }
  if (const EngineCounters* e = store->engine_counters()) {
    if (m.point_lookups > 0) {
      m.index_accesses_per_lookup =
          static_cast<double>(e->index_node_accesses) /
          static_cast<double>(m.point_lookups);
    }
    std::uint64_t truly_deleted = e->eve_maybe_deleted - e->eve_false_positives;
    if (e->eve_probes > truly_deleted) {
      m.measured_eve_fpr = static_cast<double>(e->eve_false_positives) /
                           static_cast<double>(e->eve_probes - truly_deleted);
    }
    m.gc_purged_leaves = e->gc_purged_leaves;
  }
  if (m.range_deletes > 0) {
    m.index_write_blocks_per_range_delete =
        static_cast<double>(m.index_node_writes) /
        static_cast<double>(m.range_deletes);
  }
  m.disk_bytes = store->disk_bytes();
  if (const LsmDRtreeIndex* idx = store->index()) {
    m.index_node_count = idx->total_node_count();
    m.index_leaf_count = idx->total_leaf_count();
    m.access_bound_violations = idx->access_bound_violations();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Cost model

CostPrediction cost_model(const CostParams& p) {
  CostPrediction c;
  auto logb = [](double base, double x) {
    return std::log(x) / std::log(base);
  };
  double L = std::max(1.0, std::ceil(logb(p.T, p.N / p.F)));
  double Q = p.N / p.lambda;
  double Lp = std::max(1.0, std::ceil(logb(p.Tp, std::max(1.0, Q / p.Fp))));
  c.lsm_levels = L;
  c.index_levels = Lp;

  c.lrr_lookup_absent = Q * (p.k / p.B) + L * (p.phi + 1.0);
  c.lrr_lookup_valid = Q * (p.k / p.B) + L * p.phi + 1.0;
  c.lrr_range_delete = (p.k / p.B) * p.T * logb(p.T, p.N / p.F);
  c.gloran_range_delete =
      (p.k / p.B) * p.Tp * std::max(1.0, logb(p.Tp, Q / p.Fp));
  c.gloran_lookup_absent = p.phi * L;

  double sum = 0;
  for (double i = 1; i <= Lp; ++i) {
    double qi = p.Fp * std::pow(p.Tp, i);
    sum += logb(p.D, std::max(p.D, qi)) + 1.0;
  }
  c.index_check_sum = sum;
  c.gloran_lookup_obsolete = sum + std::ceil(p.phi * L);
  c.gloran_lookup_valid = p.eps * sum + std::ceil(p.phi * L);
  c.node_bound_bottom =
      (p.D / (p.D - 1.0)) * 2.0 * p.Fp * std::pow(p.Tp, Lp);
  c.update = p.T * L * p.e / p.B;
  return c;
}

CostParams parse_cost_params_text(const std::string& text) {
  CostParams p;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::string key, eq;
    double val;
    if (!(ls >> key >> eq >> val) || eq != "=")
      throw StoreError("cost params line " + std::to_string(line_no) +
                       ": expected key = value");
    if (key == "N") {
      p.N = val;
    } else if (key == "F") {
      p.F = val;
    } else if (key == "T") {
      p.T = val;
    } else if (key == "B") {
      p.B = val;
    } else if (key == "k") {
      p.k = val;
    } else if (key == "e") {
      p.e = val;
    } else if (key == "lambda") {
      p.lambda = val;
    } else if (key == "phi") {
      p.phi = val;
    } else if (key == "eps") {
      p.eps = val;
    } else if (key == "D") {
      p.D = val;
    } else if (key == "Fp") {
      p.Fp = val;
    } else if (key == "Tp") {
      p.Tp = val;
    } else {
      throw StoreError("unknown cost param: " + key);
    }
  }
  if (p.N <= 0 || p.F <= 0 || p.T <= 1 || p.B <= 0 || p.k <= 0 ||
      p.lambda <= 0 || p.D <= 1 || p.Fp <= 0 || p.Tp <= 1)
    throw StoreError("cost params must be positive (T, T', D above 1)");
  return p;
}

CostParams load_cost_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError("cannot open cost params: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cost_params_text(buf.str());
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string metrics_machine_text(const Metrics& m, const CostPrediction* pred) {
  std::ostringstream os;
  os << "run.strategy = " << m.strategy << "\n";
  os << "run.op_count = " << m.op_count << "\n";
  os << "run.wall_seconds = " << fmt_double(m.wall_seconds) << "\n";
  os << "io.data_block_reads = " << m.data_block_reads << "\n";
  os << "io.data_block_writes = " << m.data_block_writes << "\n";
  os << "io.tombstone_block_reads = " << m.tombstone_block_reads << "\n";
  os << "io.index_node_reads = " << m.index_node_reads << "\n";
  os << "io.index_node_writes = " << m.index_node_writes << "\n";
  os << "lookup.point_lookups = " << m.point_lookups << "\n";
  os << "lookup.range_deletes = " << m.range_deletes << "\n";
  os << "lookup.tombstone_reads_per_lookup = "
     << fmt_double(m.tombstone_reads_per_lookup) << "\n";
  os << "lookup.tombstone_records_per_lookup = "
     << fmt_double(m.tombstone_records_per_lookup) << "\n";
  os << "lookup.index_accesses_per_lookup = "
     << fmt_double(m.index_accesses_per_lookup) << "\n";
  os << "lookup.index_write_blocks_per_range_delete = "
     << fmt_double(m.index_write_blocks_per_range_delete) << "\n";
  os << "measured.bloom_fpr = " << fmt_double(m.measured_bloom_fpr) << "\n";
  os << "measured.eve_fpr = " << fmt_double(m.measured_eve_fpr) << "\n";
  os << "store.disk_bytes = " << m.disk_bytes << "\n";
  os << "index.node_count = " << m.index_node_count << "\n";
  os << "index.leaf_count = " << m.index_leaf_count << "\n";
  os << "index.access_bound_violations = " << m.access_bound_violations
     << "\n";
  os << "check.oracle_mismatches = " << m.oracle_mismatches << "\n";
  os << "gc.purged_leaves = " << m.gc_purged_leaves << "\n";
  for (const auto& [name, agg] : m.latency) {
    os << "latency." << name << ".count = " << agg.count << "\n";
    os << "latency." << name << ".mean_ns = " << fmt_double(agg.mean_ns)
       << "\n";
    os << "latency." << name << ".p50_ns = " << fmt_double(agg.p50_ns) << "\n";
    os << "latency." << name << ".p95_ns = " << fmt_double(agg.p95_ns) << "\n";
    os << "latency." << name << ".p99_ns = " << fmt_double(agg.p99_ns) << "\n";
  }
  if (pred) {
    os << "model.lsm_levels = " << fmt_double(pred->lsm_levels) << "\n";
    os << "model.index_levels = " << fmt_double(pred->index_levels) << "\n";
    os << "model.lrr_lookup_absent = " << fmt_double(pred->lrr_lookup_absent)
       << "\n";
    os << "model.lrr_lookup_valid = " << fmt_double(pred->lrr_lookup_valid)
       << "\n";
    os << "model.lrr_range_delete = " << fmt_double(pred->lrr_range_delete)
       << "\n";
    os << "model.gloran_range_delete = "
       << fmt_double(pred->gloran_range_delete) << "\n";
    os << "model.gloran_lookup_absent = "
       << fmt_double(pred->gloran_lookup_absent) << "\n";
    os << "model.gloran_lookup_obsolete = "
       << fmt_double(pred->gloran_lookup_obsolete) << "\n";
    os << "model.gloran_lookup_valid = "
       << fmt_double(pred->gloran_lookup_valid) << "\n";
    os << "model.index_check_sum = " << fmt_double(pred->index_check_sum)
       << "\n";
    os << "model.node_bound_bottom = " << fmt_double(pred->node_bound_bottom)
       << "\n";
    os << "model.update = " << fmt_double(pred->update) << "\n";
  }
  return os.str();
}

void write_report_file(const std::string& path, const Metrics& m,
                       const CostPrediction* pred) {
  std::ofstream out(path);
  if (!out) throw StoreError("cannot write report: " + path);
  out << metrics_machine_text(m, pred);
}

Metrics load_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError("cannot open report: " + path);
  Metrics m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, eq, val;
    if (!(ls >> key >> eq >> val) || eq != "=") continue;
    auto u64 = [&] { return std::stoull(val); };
    auto f64 = [&] { return std::stod(val); };
    if (key == "run.strategy") {
      m.strategy = val;
    } else if (key == "run.op_count") {
      m.op_count = u64();
    } else if (key == "run.wall_seconds") {
      m.wall_seconds = f64();
    } else if (key == "io.data_block_reads") {
      m.data_block_reads = u64();
    } else if (key == "io.data_block_writes") {
      m.data_block_writes = u64();
    } else if (key == "io.tombstone_block_reads") {
      m.tombstone_block_reads = u64();
    } else if (key == "io.index_node_reads") {
      m.index_node_reads = u64();
    } else if (key == "io.index_node_writes") {
      m.index_node_writes = u64();
    } else if (key == "lookup.point_lookups") {
      m.point_lookups = u64();
    } else if (key == "lookup.range_deletes") {
      m.range_deletes = u64();
    } else if (key == "lookup.tombstone_reads_per_lookup") {
      m.tombstone_reads_per_lookup = f64();
    } else if (key == "lookup.tombstone_records_per_lookup") {
      m.tombstone_records_per_lookup = f64();
    } else if (key == "lookup.index_accesses_per_lookup") {
      m.index_accesses_per_lookup = f64();
    } else if (key == "lookup.index_write_blocks_per_range_delete") {
      m.index_write_blocks_per_range_delete = f64();
    } else if (key == "measured.bloom_fpr") {
      m.measured_bloom_fpr = f64();
    } else if (key == "measured.eve_fpr") {
      m.measured_eve_fpr = f64();
    } else if (key == "store.disk_bytes") {
      m.disk_bytes = u64();
    } else if (key == "index.node_count") {
      m.index_node_count = u64();
    } else if (key == "index.leaf_count") {
      m.index_leaf_count = u64();
    } else if (key == "index.access_bound_violations") {
      m.access_bound_violations = u64();
    } else if (key == "check.oracle_mismatches") {
      m.oracle_mismatches = u64();
    } else if (key == "gc.purged_leaves") {
      m.gc_purged_leaves = u64();
    }
    // latency.* and model.* lines are plot fodder, skipped on load.
  }
  return m;
}

std::string metrics_report_text(const std::vector<Metrics>& runs) {
  std::ostringstream os;
  os << "strategy        ops        reads      writes     tomb_rd    "
        "idx_rd     idx_wr     mismatches  norm_tput\n";
  double base_tput = -1;
  for (const Metrics& m : runs) {
    double tput = m.wall_seconds > 0
                      ? static_cast<double>(m.op_count) / m.wall_seconds
                      : -1;
    if (base_tput < 0 && tput > 0) base_tput = tput;
    auto col = [&](const std::string& s) {
      os << s;
      for (std::size_t i = s.size(); i < 11; ++i) os << ' ';
    };
    col(m.strategy.empty() ? "n/a" : m.strategy);
    col(std::to_string(m.op_count));
    col(std::to_string(m.data_block_reads));
    col(std::to_string(m.data_block_writes));
    col(std::to_string(m.tombstone_block_reads));
    col(std::to_string(m.index_node_reads));
    col(std::to_string(m.index_node_writes));
    col(std::to_string(m.oracle_mismatches));
    if (tput > 0 && base_tput > 0) {
      std::ostringstream t;
      t.precision(3);
      t << (tput / base_tput) << "x";
      os << t.str();
    } else {
      os << "n/a";
    }
    os << "\n";
  }
  return os.str();
}

LinearFit linear_fit(const std::vector<double>& x,
                     const std::vector<double>& y) {
  LinearFit fit;
  if (x.size() != y.size() || x.size() < 2)
    throw StoreError("linear_fit: need at least two matching points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw StoreError("linear_fit: degenerate x values");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double mean_y = sy / n;
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pred = fit.slope * x[i] + fit.intercept;
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    ss_res += (y[i] - pred) * (y[i] - pred);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("GLORAN_DATA_DIR")) return env;
  return "./gloran_data";
}

}  // namespace gloran
