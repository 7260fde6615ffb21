#include "liftcomp/acp.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "liftcomp/error.hpp"

namespace liftcomp {

namespace {

template <typename Key>
std::vector<std::size_t> renumber(const std::vector<Key>& keys) {
  std::map<Key, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(keys.size());
  for (const auto& k : keys) {
    auto [it, inserted] = ids.emplace(k, ids.size());
    out.push_back(it->second);
  }
  return out;
}

std::size_t count_distinct(const std::vector<std::size_t>& colours) {
  return std::set<std::size_t>(colours.begin(), colours.end()).size();
}

// Frame position -> own argument position, plus the frame block id of each
// frame position (positions of a non-trivial block share an id).
struct FrameView {
  std::vector<std::size_t> own_of_frame;
  std::vector<bool> commutative;
  std::vector<std::vector<std::size_t>> blocks;
};

FrameView frame_view(const Alignment& align, const CommutativeSpec& spec) {
  FrameView v;
  v.own_of_frame = align.inverse().perm;
  v.commutative.assign(align.perm.size(), false);
  for (const auto& b : spec.nontrivial()) {
    for (std::size_t p : b) v.commutative.at(p) = true;
    v.blocks.push_back(b);
  }
  return v;
}

struct CanonicalForm {
  Shape shape;
  std::vector<double> table;
  bool operator<(const CanonicalForm& o) const {
    return std::tie(shape, table) < std::tie(o.shape, o.table);
  }
};

}  // namespace

std::vector<std::size_t> initial_rv_colours(const FactorGraph& fg, const Evidence& evidence) {
  std::vector<std::optional<std::size_t>> observed(fg.num_rvs());
  for (const auto& [r, v] : fg.resolve(evidence)) observed[r] = v;
  std::vector<std::pair<std::vector<std::string>, std::optional<std::size_t>>> keys;
  keys.reserve(fg.num_rvs());
  for (std::size_t r = 0; r < fg.num_rvs(); ++r) keys.emplace_back(fg.rvs()[r].range, observed[r]);
  return renumber(keys);
}

ColourPassResult colour_pass(const FactorGraph& fg, const FactorColouring& initial, const Evidence& evidence) {
  const std::size_t nf = fg.num_factors();
  if (initial.colours.size() != nf || initial.alignments.size() != nf ||
      (!initial.commutative.empty() && initial.commutative.size() != nf)) {
    throw ModelError("colour_pass: initial colouring does not cover every factor");
  }
  std::vector<FrameView> views;
  views.reserve(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& align = initial.alignments[f];
    if (!align.is_valid() || align.perm.size() != fg.factors()[f].arity()) {
      throw ModelError("colour_pass: invalid alignment for factor '" + fg.factors()[f].name() + "'");
    }
    const CommutativeSpec none{};
    views.push_back(frame_view(align, initial.commutative.empty() ? none : initial.commutative[f]));
  }

  ColourState st;
  st.rv_colours = initial_rv_colours(fg, evidence);
  st.factor_colours = renumber(initial.colours);
  std::size_t n_rv = count_distinct(st.rv_colours);
  std::size_t n_f = count_distinct(st.factor_colours);

  while (true) {
    ++st.iterations;
    std::vector<std::vector<std::size_t>> fsig(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& scope = fg.scope(f);
      const auto& v = views[f];
      auto& sig = fsig[f];
      sig.reserve(scope.size() + 1);
      for (std::size_t p = 0; p < scope.size(); ++p) sig.push_back(st.rv_colours[scope[v.own_of_frame[p]]]);
      for (const auto& b : v.blocks) {
        std::vector<std::size_t> vals;
        for (std::size_t p : b) vals.push_back(sig[p]);
        std::sort(vals.begin(), vals.end());
        for (std::size_t k = 0; k < b.size(); ++k) sig[b[k]] = vals[k];
      }
      sig.push_back(st.factor_colours[f]);
    }
    auto new_f = renumber(fsig);

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rsig(fg.num_rvs());
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& scope = fg.scope(f);
      const auto& v = views[f];
      for (std::size_t p = 0; p < scope.size(); ++p) {
        rsig[scope[v.own_of_frame[p]]].emplace_back(new_f[f], v.commutative[p] ? 0 : p + 1);
      }
    }
    for (std::size_t r = 0; r < fg.num_rvs(); ++r) {
      std::sort(rsig[r].begin(), rsig[r].end());
      rsig[r].emplace_back(st.rv_colours[r], SIZE_MAX);
    }
    auto new_r = renumber(rsig);

    const std::size_t nf2 = count_distinct(new_f);
    const std::size_t nr2 = count_distinct(new_r);
    st.factor_colours = std::move(new_f);
    st.rv_colours = std::move(new_r);
    if (nf2 == n_f && nr2 == n_rv) break;
    n_f = nf2;
    n_rv = nr2;
  }

  ColourPassResult out;
  std::map<std::size_t, std::size_t> group_of_colour;
  for (std::size_t f = 0; f < nf; ++f) {
    auto [it, inserted] = group_of_colour.emplace(st.factor_colours[f], out.factor_groups.groups.size());
    if (inserted) out.factor_groups.groups.emplace_back();
    auto& g = out.factor_groups.groups[it->second];
    const Alignment& a = initial.alignments[f];
    Alignment rel = g.members.empty() ? Alignment::identity(a.perm.size())
                                      : initial.alignments[g.anchor()].inverse().compose(a);
    g.members.push_back({f, std::move(rel)});
  }
  std::map<std::size_t, std::size_t> class_of_colour;
  for (std::size_t r = 0; r < fg.num_rvs(); ++r) {
    auto [it, inserted] = class_of_colour.emplace(st.rv_colours[r], out.rv_classes.size());
    if (inserted) out.rv_classes.emplace_back();
    out.rv_classes[it->second].push_back(r);
  }
  out.state = std::move(st);
  return out;
}

FactorColouring exact_factor_colouring(const FactorGraph& fg, bool detect_commutative) {
  const auto& factors = fg.factors();
  FactorColouring out;
  std::vector<CanonicalForm> forms;
  forms.reserve(factors.size());
  for (const auto& f : factors) {
    if (f.arity() > kMaxAlignmentArity) {
      throw CapExceededError("canonical form: arity " + std::to_string(f.arity()) + " exceeds the cap of " +
                             std::to_string(kMaxAlignmentArity));
    }
    std::optional<CanonicalForm> best;
    Alignment s = Alignment::identity(f.arity());
    do {
      CanonicalForm c;
      c.shape.resize(f.arity());
      for (std::size_t j = 0; j < f.arity(); ++j) c.shape[s.perm[j]] = f.shape()[j];
      if (best && best->shape < c.shape) continue;
      c.table = to_reference_frame(f, s, c.shape);
      if (!best || c < *best) {
        best = std::move(c);
      }
    } while (std::next_permutation(s.perm.begin(), s.perm.end()));
    forms.push_back(std::move(*best));
  }
  out.colours = renumber(forms);
  std::map<std::size_t, std::size_t> anchor_of;
  for (std::size_t f = 0; f < factors.size(); ++f) anchor_of.emplace(out.colours[f], f);
  for (std::size_t f = 0; f < factors.size(); ++f) {
    // The first matching alignment in lexicographic order, so that the result
    // coincides with ε-grouping at ε = 0 even for self-symmetric tables.
    const std::size_t a = anchor_of.at(out.colours[f]);
    auto align = eps_equiv_factors(factors[a], factors[f], Epsilon{});
    if (!align) throw InvariantViolation("canonical forms agree but no alignment matches");
    out.alignments.push_back(std::move(*align));
  }
  out.commutative.resize(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const std::size_t a = anchor_of.at(out.colours[f]);
    if (detect_commutative) {
      out.commutative[f] = a == f ? commutative_blocks(factors[f], Epsilon{}) : out.commutative[a];
    } else {
      out.commutative[f].blocks.clear();
      for (std::size_t p = 0; p < factors[f].arity(); ++p) out.commutative[f].blocks.push_back({p});
    }
  }
  return out;
}

CommutativeSpec group_commutative_blocks(std::span<const Factor> factors, const Group& group, Epsilon eps) {
  const auto tables = aligned_tables(factors, group);
  return commutative_blocks(tables, factors[group.anchor()].shape(), eps);
}

CommutativeSpec remap_commutative(const CommutativeSpec& spec, const Alignment& align) {
  const auto own_of_frame = align.inverse().perm;
  CommutativeSpec out;
  for (const auto& b : spec.blocks) {
    std::vector<std::size_t> mapped;
    for (std::size_t p : b) mapped.push_back(own_of_frame.at(p));
    std::sort(mapped.begin(), mapped.end());
    out.blocks.push_back(std::move(mapped));
  }
  std::sort(out.blocks.begin(), out.blocks.end());
  return out;
}

AcpResult run_acp(const FactorGraph& fg, const Evidence& evidence, const AcpOptions& options) {
  const auto initial = exact_factor_colouring(fg, options.detect_commutative);
  AcpResult out;
  out.colours = colour_pass(fg, initial, evidence);
  std::vector<std::optional<CommutativeSpec>> crv;
  if (options.detect_commutative && options.counting_compaction) {
    for (const auto& g : out.colours.factor_groups.groups) {
      const std::size_t a = g.anchor();
      crv.push_back(remap_commutative(initial.commutative[a], initial.alignments[a]));
    }
  }
  out.pfg = construct_pfg(fg, out.colours.factor_groups, out.colours.rv_classes, crv);
  return out;
}

}  // namespace liftcomp
