#include "liftcomp/grouping.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "liftcomp/error.hpp"

namespace liftcomp {

std::size_t Grouping::num_factors() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

std::vector<std::size_t> Grouping::group_index(std::size_t num_factors) const {
  std::vector<std::size_t> out(num_factors, std::numeric_limits<std::size_t>::max());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& m : groups[g].members) out.at(m.factor) = g;
  }
  return out;
}

std::vector<std::vector<std::size_t>> Grouping::member_sets() const {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<std::size_t> s;
    for (const auto& m : g.members) s.push_back(m.factor);
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<double>> aligned_tables(std::span<const Factor> factors, const Group& group) {
  const Factor& anchor = factors[group.anchor()];
  std::vector<std::vector<double>> out;
  out.reserve(group.size());
  for (const auto& m : group.members) out.push_back(to_reference_frame(factors[m.factor], m.alignment, anchor.shape()));
  return out;
}

namespace {

struct WorkingGroup {
  Group group;
  std::vector<std::vector<double>> tables;  // aligned to the anchor
};

bool all_equivalent(const std::vector<double>& candidate, const std::vector<std::vector<double>>& members, Epsilon eps) {
  for (const auto& t : members) {
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (!eps_equiv_potentials(candidate[r], t[r], eps)) return false;
    }
  }
  return true;
}

double summed_error(const std::vector<double>& candidate, const std::vector<std::vector<double>>& members) {
  double sum = 0.0;
  for (const auto& t : members) {
    for (std::size_t r = 0; r < t.size(); ++r) {
      const double d = candidate[r] - t[r];
      sum += d * d;
    }
  }
  return sum;
}

struct Admission {
  Alignment alignment;
  std::vector<double> table;
  double error = 0.0;
};

// First alignment (lexicographic) under which the factor is ε-equivalent to
// every member of the group.
std::optional<Admission> admit(const Factor& f, const Factor& anchor, const WorkingGroup& wg, Epsilon eps) {
  if (f.arity() != anchor.arity()) return std::nullopt;
  if (f.arity() > kMaxAlignmentArity) {
    throw CapExceededError("alignment search: arity " + std::to_string(f.arity()) + " exceeds the cap of " +
                           std::to_string(kMaxAlignmentArity));
  }
  Alignment align = Alignment::identity(f.arity());
  do {
    if (!shapes_compatible(anchor.shape(), f.shape(), align)) continue;
    auto table = to_reference_frame(f, align, anchor.shape());
    if (all_equivalent(table, wg.tables, eps)) {
      const double e = summed_error(table, wg.tables);
      return Admission{align, std::move(table), e};
    }
  } while (std::next_permutation(align.perm.begin(), align.perm.end()));
  return std::nullopt;
}

}  // namespace

Grouping phase1_group(std::span<const Factor> factors, Epsilon eps) {
  std::vector<WorkingGroup> working;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Factor& f = factors[i];
    std::optional<std::size_t> best;
    Admission best_admission;
    for (std::size_t g = 0; g < working.size(); ++g) {
      const Factor& anchor = factors[working[g].group.anchor()];
      auto adm = admit(f, anchor, working[g], eps);
      if (!adm) continue;
      if (!best || adm->error < best_admission.error) {
        best = g;
        best_admission = std::move(*adm);
      }
    }
    if (best) {
      auto& wg = working[*best];
      wg.group.members.push_back({i, std::move(best_admission.alignment)});
      wg.tables.push_back(std::move(best_admission.table));
    } else {
      WorkingGroup wg;
      wg.group.members.push_back({i, Alignment::identity(f.arity())});
      wg.tables.push_back(f.table());
      working.push_back(std::move(wg));
    }
  }
  Grouping out;
  out.groups.reserve(working.size());
  for (auto& wg : working) out.groups.push_back(std::move(wg.group));
  return out;
}

std::vector<double> mean_table(std::span<const std::vector<double>> tables) {
  if (tables.empty()) throw ModelError("mean of an empty group");
  const std::size_t n = tables.front().size();
  for (const auto& t : tables) {
    if (t.size() != n) throw ModelError("mean: tables differ in length");
  }
  std::vector<double> out(n);
  const double k = static_cast<double>(tables.size());
  for (std::size_t r = 0; r < n; ++r) {
    double lo = tables.front()[r];
    double hi = lo;
    double sum = 0.0;
    for (const auto& t : tables) {
      lo = std::min(lo, t[r]);
      hi = std::max(hi, t[r]);
      sum += t[r];
    }
    out[r] = lo == hi ? lo : std::clamp(sum / k, lo, hi);
  }
  return out;
}

Factor mean_factor(std::span<const Factor> factors, const Group& group) {
  const auto tables = aligned_tables(factors, group);
  return factors[group.anchor()].with_table(mean_table(tables));
}

bool pairwise_equivalent(std::span<const Factor> factors, const Group& group, Epsilon eps) {
  const auto tables = aligned_tables(factors, group);
  for (std::size_t a = 0; a < tables.size(); ++a) {
    for (std::size_t b = a + 1; b < tables.size(); ++b) {
      for (std::size_t r = 0; r < tables[a].size(); ++r) {
        if (!eps_equiv_potentials(tables[a][r], tables[b][r], eps)) return false;
      }
    }
  }
  return true;
}

}  // namespace liftcomp
