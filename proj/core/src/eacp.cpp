#include "liftcomp/eacp.hpp"

#include <algorithm>
#include <cmath>

#include "liftcomp/error.hpp"

namespace liftcomp {

namespace {

void check_refinement(const Grouping& phase1, const Grouping& final_groups, std::size_t n) {
  const auto p1 = phase1.group_index(n);
  for (const auto& g : final_groups.groups) {
    for (const auto& m : g.members) {
      if (p1[m.factor] != p1[g.anchor()]) throw InvariantViolation("colour passing merged factors across ε-groups");
    }
  }
}

bool same_structure(const FactorGraph& a, const FactorGraph& b) {
  if (a.rvs() != b.rvs() || a.num_factors() != b.num_factors()) return false;
  for (std::size_t f = 0; f < a.num_factors(); ++f) {
    const auto& x = a.factors()[f];
    const auto& y = b.factors()[f];
    if (x.name() != y.name() || x.args() != y.args() || x.shape() != y.shape()) return false;
  }
  return true;
}

}  // namespace

CompressionResult run_eacp(const FactorGraph& fg, Epsilon eps, const Evidence& evidence, const EacpOptions& options) {
  const auto& factors = fg.factors();
  CompressionResult out;
  out.phase1 = phase1_group(factors, eps);

  const Epsilon comm_eps{options.commutative_eps.value_or(0.0)};
  const bool relaxed = options.detect_commutative && comm_eps.value() > 0.0;

  FactorColouring initial;
  initial.colours.resize(factors.size());
  initial.alignments.resize(factors.size());
  initial.commutative.resize(factors.size());
  for (std::size_t g = 0; g < out.phase1.groups.size(); ++g) {
    const Group& group = out.phase1.groups[g];
    CommutativeSpec spec;
    if (options.detect_commutative) {
      spec = group_commutative_blocks(factors, group, comm_eps);
    } else {
      for (std::size_t p = 0; p < factors[group.anchor()].arity(); ++p) spec.blocks.push_back({p});
    }
    for (const auto& m : group.members) {
      initial.colours[m.factor] = g;
      initial.alignments[m.factor] = m.alignment;
      initial.commutative[m.factor] = spec;
    }
  }

  out.colours = colour_pass(fg, initial, evidence);
  out.grouping = out.colours.factor_groups;
  check_refinement(out.phase1, out.grouping, factors.size());

  std::vector<std::vector<double>> tables(factors.size());
  std::vector<std::optional<CommutativeSpec>> crv;
  out.per_group_max_rel_dev.reserve(out.grouping.groups.size());
  for (const auto& g : out.grouping.groups) {
    const Factor& anchor = factors[g.anchor()];
    const CommutativeSpec spec = remap_commutative(initial.commutative[g.anchor()], initial.alignments[g.anchor()]);
    std::vector<double> mean = mean_table(aligned_tables(factors, g));
    if (relaxed && spec.has_nontrivial()) mean = expand(compact(mean, anchor.shape(), spec), anchor.shape());
    double dev = 0.0;
    for (const auto& m : g.members) {
      const Factor& f = factors[m.factor];
      auto own = from_reference_frame(mean, m.alignment, anchor.shape(), f.shape());
      for (std::size_t r = 0; r < own.size(); ++r) {
        if (!relaxed && !eps_equiv_potentials(own[r], f.table()[r], eps)) {
          throw InvariantViolation("updated potential of '" + f.name() + "' is not ε-equivalent to its original");
        }
        dev = std::max(dev, std::abs(own[r] - f.table()[r]) / f.table()[r]);
      }
      tables[m.factor] = std::move(own);
    }
    out.per_group_max_rel_dev.push_back(dev);
    if (options.detect_commutative && options.counting_compaction) crv.push_back(spec);
  }

  out.m_prime = fg.with_tables(tables);
  if (!same_structure(fg, out.m_prime)) throw InvariantViolation("updated model changed structure");
  if (eps.value() == 0.0 && !relaxed && !(out.m_prime == fg)) {
    throw InvariantViolation("ε = 0 changed a potential");
  }
  out.pfg = construct_pfg(out.m_prime, out.grouping, out.colours.rv_classes, crv);
  return out;
}

}  // namespace liftcomp
