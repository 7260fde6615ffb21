#include "liftcomp/pfg.hpp"

#include <algorithm>
#include <map>

#include "liftcomp/error.hpp"

namespace liftcomp {

namespace {

std::vector<std::size_t> histogram_of(std::span<const std::size_t> index, const std::vector<std::size_t>& positions,
                                      std::size_t cardinality) {
  std::vector<std::size_t> h(cardinality, 0);
  for (std::size_t p : positions) ++h[index[p]];
  return h;
}

}  // namespace

std::vector<std::size_t> CountingCompaction::cell_of_entry(const Shape& full_shape) const {
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> hist_lookup(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t h = 0; h < blocks[b].histograms.size(); ++h) hist_lookup[b][blocks[b].histograms[h]] = h;
  }
  const auto strides = row_major_strides(shape);
  std::vector<std::size_t> out;
  out.reserve(table_size(full_shape));
  std::vector<std::size_t> idx(full_shape.size(), 0);
  do {
    std::size_t flat = 0;
    for (std::size_t d = 0; d < dims.size(); ++d) {
      std::size_t coord;
      if (dims[d].counting) {
        const auto& block = blocks[dims[d].index];
        coord = hist_lookup[dims[d].index].at(histogram_of(idx, block.positions, full_shape[block.positions.front()]));
      } else {
        coord = idx[dims[d].index];
      }
      flat += coord * strides[d];
    }
    out.push_back(flat);
  } while (next_index(idx, full_shape));
  return out;
}

CountingCompaction compact(std::span<const double> table, const Shape& full_shape, const CommutativeSpec& spec) {
  CountingCompaction c;
  std::vector<std::size_t> block_of_pos(full_shape.size(), SIZE_MAX);
  for (const auto& positions : spec.nontrivial()) {
    const std::size_t card = full_shape[positions.front()];
    for (std::size_t p : positions) {
      if (full_shape[p] != card) throw ModelError("counting block mixes ranges of different size");
      block_of_pos[p] = c.blocks.size();
    }
    CountingBlock block;
    block.positions = positions;
    // Histograms in order of first appearance over the block's own assignments.
    Shape sub(positions.size(), card);
    std::vector<std::size_t> sub_idx(positions.size(), 0);
    std::vector<std::size_t> full_idx(full_shape.size(), 0);
    do {
      for (std::size_t k = 0; k < positions.size(); ++k) full_idx[positions[k]] = sub_idx[k];
      auto h = histogram_of(full_idx, positions, card);
      if (std::find(block.histograms.begin(), block.histograms.end(), h) == block.histograms.end()) {
        block.histograms.push_back(std::move(h));
      }
    } while (next_index(sub_idx, sub));
    c.blocks.push_back(std::move(block));
  }
  for (std::size_t p = 0; p < full_shape.size(); ++p) {
    if (block_of_pos[p] == SIZE_MAX) {
      c.dims.push_back({false, p});
      c.shape.push_back(full_shape[p]);
    } else if (c.blocks[block_of_pos[p]].positions.front() == p) {
      c.dims.push_back({true, block_of_pos[p]});
      c.shape.push_back(c.blocks[block_of_pos[p]].histograms.size());
    }
  }
  const auto cells = c.cell_of_entry(full_shape);
  const std::size_t n_cells = table_size(c.shape);
  std::vector<double> sum(n_cells, 0.0), lo(n_cells, 0.0), hi(n_cells, 0.0);
  std::vector<std::size_t> n(n_cells, 0);
  for (std::size_t r = 0; r < cells.size(); ++r) {
    const std::size_t cell = cells[r];
    if (n[cell] == 0) {
      lo[cell] = hi[cell] = table[r];
    } else {
      lo[cell] = std::min(lo[cell], table[r]);
      hi[cell] = std::max(hi[cell], table[r]);
    }
    sum[cell] += table[r];
    ++n[cell];
  }
  c.table.resize(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    c.table[cell] = lo[cell] == hi[cell] ? lo[cell] : std::clamp(sum[cell] / static_cast<double>(n[cell]), lo[cell], hi[cell]);
  }
  return c;
}

std::vector<double> expand(const CountingCompaction& compaction, const Shape& full_shape) {
  const auto cells = compaction.cell_of_entry(full_shape);
  std::vector<double> out(cells.size());
  for (std::size_t r = 0; r < cells.size(); ++r) out[r] = compaction.table.at(cells[r]);
  return out;
}

std::size_t ParfactorGraph::num_ground_factors() const {
  std::size_t n = 0;
  for (const auto& p : parfactors) n += p.count();
  return n;
}

std::size_t ParfactorGraph::num_ground_rvs() const {
  std::size_t n = 0;
  for (const auto& c : rv_classes) n += c.members.size();
  return n;
}

ParfactorGraph construct_pfg(const FactorGraph& fg_updated, const Grouping& groups,
                             const std::vector<std::vector<std::size_t>>& rv_classes,
                             const std::vector<std::optional<CommutativeSpec>>& crv_specs) {
  if (!crv_specs.empty() && crv_specs.size() != groups.groups.size()) {
    throw ModelError("construct_pfg: one counting spec per group required");
  }
  ParfactorGraph pfg;
  for (const auto& cls : rv_classes) {
    RvClass out;
    for (std::size_t r : cls) out.members.push_back(fg_updated.rvs().at(r).name);
    out.representative = out.members.at(0);
    out.range = fg_updated.rvs()[cls.front()].range;
    pfg.rv_classes.push_back(std::move(out));
  }
  const auto& factors = fg_updated.factors();
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    const Group& group = groups.groups[g];
    const auto tables = aligned_tables(factors, group);
    for (std::size_t m = 1; m < tables.size(); ++m) {
      if (tables[m] != tables.front()) {
        throw ModelError("construct_pfg: factor '" + factors[group.members[m].factor].name() +
                         "' does not share its group's table");
      }
    }
    Parfactor pf;
    pf.representative = factors[group.anchor()];
    for (const auto& m : group.members) {
      pf.members.push_back({factors[m.factor].name(), factors[m.factor].args(), m.alignment});
    }
    if (!crv_specs.empty() && crv_specs[g] && crv_specs[g]->has_nontrivial()) {
      pf.crv = compact(pf.representative.table(), pf.representative.shape(), *crv_specs[g]);
    }
    pfg.parfactors.push_back(std::move(pf));
  }
  return pfg;
}

FactorGraph ground(const ParfactorGraph& pfg) {
  std::vector<RandomVariable> rvs;
  for (const auto& cls : pfg.rv_classes) {
    for (const auto& name : cls.members) rvs.push_back({name, cls.range});
  }
  std::map<std::string, std::size_t> card;
  for (const auto& rv : rvs) card[rv.name] = rv.range.size();
  std::vector<Factor> factors;
  for (const auto& pf : pfg.parfactors) {
    const Shape& rep_shape = pf.representative.shape();
    const std::vector<double> rep_table = pf.crv ? expand(*pf.crv, rep_shape) : pf.representative.table();
    for (const auto& m : pf.members) {
      Shape own;
      for (const auto& a : m.args) {
        auto it = card.find(a);
        if (it == card.end()) throw ModelError("ground: member '" + m.name + "' references unknown rv '" + a + "'");
        own.push_back(it->second);
      }
      auto table = from_reference_frame(rep_table, m.alignment, rep_shape, own);
      factors.emplace_back(m.name, m.args, std::move(own), std::move(table));
    }
  }
  return FactorGraph(std::move(rvs), std::move(factors));
}

}  // namespace liftcomp
