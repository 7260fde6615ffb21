#pragma once

#include <cstddef>
#include <utility>

#include "liftcomp/equivalence.hpp"
#include "liftcomp/factor_graph.hpp"

namespace liftcomp {

/// Extremes of ψ'(r)/ψ(r) over all joint assignments. Assignments are in
/// the first model's RV order.
struct DistanceReport {
  double d_exact = 0.0;
  Assignment argmax_assignment;
  Assignment argmin_assignment;
  double max_ratio = 1.0;
  double min_ratio = 1.0;
};

struct BoundSet {
  std::size_t m = 0;
  Epsilon eps;
  double d_general = 0.0;
  double d_tight = 0.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
};

/// ln max ψ2/ψ1 − ln min ψ2/ψ1 by enumeration. Both models must declare the
/// same RVs with the same ranges (order may differ). `threads` > 1 shards the
/// joint space; the result is identical to the sequential scan, ties going to
/// the lowest assignment index.
DistanceReport distance_exact(const FactorGraph& m1, const FactorGraph& m2, unsigned threads = 1,
                              std::uint64_t cap = enumeration_cap());

/// m·(ln(1+ε) − ln(1−ε)).
double bound_general(std::size_t m, Epsilon eps);
/// m·ln(α2/α1) with α1 = (1+ε/m)/(1+ε) and α2 = 1+(m−1)ε/m.
double bound_tight(std::size_t m, Epsilon eps);
BoundSet bound_set(std::size_t m, Epsilon eps);

using Interval = std::pair<double, double>;

/// (e^−d, e^d). Throws ModelError for d < 0.
Interval odds_envelope(double d);
/// Range of p' = P_M'(r|e) given p = P_M(r|e) and distance d. Throws
/// ModelError unless 0 < p < 1 and d >= 0.
Interval prob_envelope(double p, double d);

struct CorollaryEnvelopes {
  Interval general;  // from bound_general
  Interval tight;    // from bound_tight
};
CorollaryEnvelopes corollary_envelopes(std::size_t m, Epsilon eps);

/// m unary factors over RVs R1..Rm with range 1..2m on which averaging all
/// factors attains bound_tight exactly. Row j of φ_i is j, inflated by
/// (1+ε) at j = i for the first m rows and everywhere except j = m+i for the
/// last m rows. Throws ModelError for m < 2.
FactorGraph worst_case_fg(std::size_t m, Epsilon eps);

}  // namespace liftcomp
