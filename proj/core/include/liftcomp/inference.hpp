#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftcomp/factor_graph.hpp"
#include "liftcomp/pfg.hpp"

namespace liftcomp {

struct Query {
  std::string target;
  Evidence evidence;
  std::optional<std::string> value;
};

enum class QueryMethod { enumeration, variable_elimination, lifted_star };

const char* to_string(QueryMethod m);

struct QueryResult {
  /// (label, probability) in the target's range order.
  std::vector<std::pair<std::string, double>> distribution;
  QueryMethod method = QueryMethod::enumeration;
  /// Multiply-add operations spent on table products and sums.
  std::uint64_t work = 0;

  /// Throws ModelError for a label outside the target's range.
  double probability(const std::string& label) const;
};

/// Sums ψ over all completions of the evidence.
QueryResult query_enumerate(const FactorGraph& fg, const Query& q, std::uint64_t cap = enumeration_cap());

/// Sum-product variable elimination. Without an explicit order, RVs are
/// eliminated greedily by fewest current neighbours, ties by name.
/// Intermediate tables are rescaled to their maximum.
QueryResult query_ve(const FactorGraph& fg, const Query& q,
                     const std::optional<std::vector<std::string>>& order = std::nullopt);

/// Star evaluation: removing the hub must leave tree-shaped branches, each
/// attached to the hub by a single factor. Structurally identical branches
/// share one message, raised to the branch count. The target must be the hub
/// and there must be no evidence. Throws UnsupportedTopologyError otherwise.
QueryResult query_lifted_star(const ParfactorGraph& pfg, const std::string& hub, const Query& q);

/// P_M'(q.value | e) / P_M(q.value | e) by variable elimination.
double quotient(const Query& q, const FactorGraph& m, const FactorGraph& m_prime);

}  // namespace liftcomp
