#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "liftcomp/factor_graph.hpp"

namespace liftcomp {

/// Seeded draws that do not depend on the standard library's distribution
/// implementations, so runs are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in {0, .., n-1}; n must be positive.
  std::uint64_t index(std::uint64_t n);
  /// Uniform in [0, 1).
  double unit();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

struct GenConfig {
  std::size_t k = 2;
  double x = 1.0;
  double eps = 0.001;
  std::uint64_t seed = 0;
  bool guarantee_pairwise = false;
  /// Accept values outside the published grids.
  bool free = false;
  /// Fixes the chain length instead of drawing it.
  std::optional<std::size_t> chain_length;
};

inline const std::vector<std::size_t> kGridK{2, 4, 8, 16, 32, 64, 128};
inline const std::vector<double> kGridX{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
inline const std::vector<double> kGridEps{0.001, 0.01, 0.1};

/// Throws ModelError for values outside the grids unless `free` is set
/// (which still requires k >= 1, 0 <= x <= 1 and 0 <= eps < 1).
void validate(const GenConfig& cfg);

/// Hub RV `H` plus k chains B<b>_1 .. B<b>_l of Boolean RVs. Each chain has
/// one factor to the hub and one per chain edge, all chains sharing one set
/// of base tables drawn from U(0.1, 1.0). l = 2 + U{0..floor(log2 k)} is
/// drawn once per model.
FactorGraph generate_fg(const GenConfig& cfg);

/// Multiplies every entry of ceil(x·|Φ|) seeded factors by an independent
/// u ~ U[1−ε, 1+ε]. With guarantee_pairwise, u ~ U[(1+ε)^−½, (1+ε)^½], so
/// any two perturbed copies of one table stay ε-equivalent.
FactorGraph perturb(const FactorGraph& fg, const GenConfig& cfg);

struct QueryRecord {
  std::size_t index = 0;
  std::string target;
  std::string target_value;
  std::size_t n_evidence = 0;
  double p = 0.0;
  double p_prime = 0.0;
  double quotient = 1.0;
  /// p'/p range implied by the tight bound at this p.
  double band_lo = 1.0;
  double band_hi = 1.0;
};

struct ExperimentRecord {
  GenConfig config;
  std::size_t n_rvs = 0;
  std::size_t n_factors = 0;
  std::size_t n_groups = 0;
  std::size_t n_groups_acp = 0;
  double compression_ratio = 1.0;
  std::vector<QueryRecord> queries;
  std::optional<double> d_exact;
  double bound_tight = 0.0;
  double t_acp_ms = 0.0;
  double t_eacp_ms = 0.0;
  /// Hub marginal by VE on the grounded exact-ACP model.
  double t_ground_query_ms = 0.0;
  /// Hub marginal by star evaluation on the ε-compressed model.
  double t_lifted_query_ms = 0.0;
  std::uint64_t ground_work = 0;
  std::uint64_t lifted_work = 0;
  /// (t_eacp − t_acp) / (t_ground_query − t_lifted_query); unset when the
  /// denominator is not positive.
  std::optional<double> alpha_substitute;
};

struct ExperimentOptions {
  bool skip_exact = false;
};

ExperimentRecord run_experiment(const GenConfig& cfg, std::size_t n_queries, const ExperimentOptions& options = {});

/// Runs every config on up to `jobs` threads; records keep the input order.
std::vector<ExperimentRecord> run_experiments(const std::vector<GenConfig>& configs, std::size_t n_queries,
                                              const ExperimentOptions& options = {}, unsigned jobs = 1);

/// Column names in output order.
const std::vector<std::string>& csv_columns();
/// One row per (record, query), header first.
std::string emit_csv(const std::vector<ExperimentRecord>& records);

}  // namespace liftcomp
