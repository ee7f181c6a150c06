#ifndef GLORAN_BENCH_HPP
#define GLORAN_BENCH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gloran/trace.hpp"
#include "gloran/types.hpp"

namespace gloran {

enum class KeyDistribution { kUniform, kZipfian };

struct WorkloadSpec {
  std::uint64_t op_count = 100000;
  double update_fraction = 0.5;
  double point_lookup_fraction = 0.5;
  double range_delete_fraction = 0.0;
  double range_lookup_fraction = 0.0;
  std::uint64_t range_delete_length = 128;
  std::uint64_t range_lookup_length = 100;
  KeyDistribution distribution = KeyDistribution::kUniform;
  double zipf_theta = 0.99;
  std::uint64_t key_universe = 1ull << 26;
  std::uint64_t value_size = 47;
  std::uint64_t seed = 1;

  void validate() const;
};

WorkloadSpec parse_workload_text(const std::string& text);
WorkloadSpec load_workload_file(const std::string& path);

std::vector<Operation> generate_workload(const WorkloadSpec& spec);

// Skewed key generator over [0, n) with the usual zeta-based construction;
// items are scrambled across the universe by a hash.
class ZipfianGenerator {
 public:
  ZipfianGenerator(std::uint64_t n, double theta);
  std::uint64_t next(std::uint64_t& rng_state) const;

 private:
  std::uint64_t n_;
  double theta_;
  double zetan_;
  double alpha_;
  double eta_;
  double zeta2_;
};

struct LatencyAgg {
  std::uint64_t count = 0;
  double mean_ns = 0;
  double p50_ns = 0;
  double p95_ns = 0;
  double p99_ns = 0;
};

struct Metrics {
  std::string strategy;
  std::uint64_t op_count = 0;
  double wall_seconds = 0;
  std::map<std::string, LatencyAgg> latency;  // by op kind name

  std::uint64_t data_block_reads = 0;
  std::uint64_t data_block_writes = 0;
  std::uint64_t tombstone_block_reads = 0;
  std::uint64_t index_node_reads = 0;
  std::uint64_t index_node_writes = 0;

  std::uint64_t point_lookups = 0;
  std::uint64_t range_deletes = 0;
  double tombstone_reads_per_lookup = 0;
  double tombstone_records_per_lookup = 0;
  double index_accesses_per_lookup = 0;
  double index_write_blocks_per_range_delete = 0;

  double measured_bloom_fpr = -1;  // phi; -1 when unmeasurable
  double measured_eve_fpr = -1;    // epsilon
  std::uint64_t disk_bytes = 0;
  std::uint64_t index_node_count = 0;
  std::uint64_t index_leaf_count = 0;
  std::uint64_t access_bound_violations = 0;
  std::uint64_t oracle_mismatches = 0;
  std::uint64_t gc_purged_leaves = 0;
};

struct RunOptions {
  bool check_oracle = true;
  bool force_bottom_gc_at_end = false;
  std::uint64_t recheck_gets = 0;  // random gets vs oracle after the trace
  std::uint64_t recheck_seed = 7;
};

Metrics run_trace(const std::vector<Operation>& trace, const StoreConfig& cfg,
                  const std::string& store_dir, const RunOptions& opts = {});

// Closed forms from the cost analysis, without big-O constants.
struct CostParams {
  double N = 1e6;     // entries
  double F = 4096;    // memtable capacity
  double T = 10;      // LSM size ratio
  double B = 4096;    // block bytes
  double k = 8;       // key bytes
  double e = 64;      // entry bytes
  double lambda = 10; // inverse range-delete ratio; Q = N / lambda
  double phi = 0.01;  // LSM Bloom FPR
  double eps = 0.05;  // EVE FPR
  double D = 10;      // DR-tree fanout
  double Fp = 256;    // index buffer capacity
  double Tp = 10;     // index size ratio
};

struct CostPrediction {
  double lsm_levels = 0;           // L
  double index_levels = 0;         // L'
  double lrr_lookup_absent = 0;    // (N/lambda)(k/B) + L(phi+1)
  double lrr_lookup_valid = 0;
  double lrr_range_delete = 0;     // (k/B) T log_T(N/F)
  double gloran_range_delete = 0;  // (k/B) T' log_T'(Q/F')
  double gloran_lookup_absent = 0; // phi * L, no index term
  double gloran_lookup_obsolete = 0;  // sum_i(log_D Q_i + 1) + ceil(phi L)
  double gloran_lookup_valid = 0;     // eps * index sum + ceil(phi L)
  double index_check_sum = 0;         // sum_i (log_D Q_i + 1)
  double node_bound_bottom = 0;       // (D/(D-1)) * 2 Q_L'
  double update = 0;                  // T L e / B
};

CostPrediction cost_model(const CostParams& p);
CostParams parse_cost_params_text(const std::string& text);
CostParams load_cost_params_file(const std::string& path);

std::string metrics_report_text(const std::vector<Metrics>& runs);
std::string metrics_machine_text(const Metrics& m,
                                 const CostPrediction* pred = nullptr);
void write_report_file(const std::string& path, const Metrics& m,
                       const CostPrediction* pred = nullptr);
Metrics load_report_file(const std::string& path);

// Least-squares helpers for the trend checks.
struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};
LinearFit linear_fit(const std::vector<double>& x,
                     const std::vector<double>& y);

std::string default_data_dir();

}  // namespace gloran

#endif
