// liftcomp: compress, query and bound factor graphs from the command line.
//
// Machine-readable output goes to stdout, diagnostics to stderr.
// Exit codes: 0 success, 1 bad input or usage, 2 invariant violation.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "liftcomp/acp.hpp"
#include "liftcomp/bench.hpp"
#include "liftcomp/bounds.hpp"
#include "liftcomp/eacp.hpp"
#include "liftcomp/error.hpp"
#include "liftcomp/inference.hpp"
#include "liftcomp/model_io.hpp"

namespace {

using nlohmann::json;
using namespace liftcomp;

Evidence parse_pairs(const std::vector<std::string>& pairs) {
  Evidence ev;
  for (const auto& p : pairs) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size()) {
      throw ParseError("--evidence", "expected rv=value, got '" + p + "'");
    }
    ev.push_back({p.substr(0, eq), p.substr(eq + 1)});
  }
  return ev;
}

Evidence gather_evidence(const std::vector<std::string>& pairs, const std::string& file) {
  Evidence ev = file.empty() ? Evidence{} : load_evidence_file(file);
  for (auto& o : parse_pairs(pairs)) ev.push_back(std::move(o));
  return ev;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("", "cannot write '" + path + "'");
  out << text;
}

void warn_isolated(const FactorGraph& fg) {
  for (const auto& name : fg.isolated_rvs()) std::cerr << "warning: rv '" << name << "' appears in no factor\n";
}

json distribution_json(const QueryResult& r) {
  json d = json::object();
  json order = json::array();
  for (const auto& [label, p] : r.distribution) {
    d[label] = p;
    order.push_back(label);
  }
  return {{"distribution", d}, {"labels", order}, {"method", to_string(r.method)}, {"work", r.work}};
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& v, const std::vector<T>& fallback) {
  return v.empty() ? fallback : v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate lifting of factor graphs by ε-equivalent colour passing"};
  app.require_subcommand(1);

  std::string model, evidence_file, target, value, method = "ve", pfg_out, model_out, compare;
  std::vector<std::string> evidence;
  double eps = 0.0;
  std::optional<double> comm_eps;
  bool no_commutative = false;
  bool no_compaction = false;

  auto* compress = app.add_subcommand("compress", "Group ε-equivalent factors and write the lifted model");
  compress->add_option("--model", model, "Factor graph JSON")->required()->check(CLI::ExistingFile);
  compress->add_option("--eps", eps, "Relative tolerance in [0, 1)")->required();
  compress->add_option("--evidence", evidence, "Observation as rv=value (repeatable)");
  compress->add_option("--evidence-file", evidence_file, "Evidence JSON")->check(CLI::ExistingFile);
  compress->add_option("--pfg-out", pfg_out, "Write the parfactor graph here");
  compress->add_option("--model-out", model_out, "Write the updated ground model here");
  compress->add_option("--commutative-eps", comm_eps, "Tolerance of the commutativity test (default exact)");
  compress->add_flag("--no-commutative", no_commutative, "Disable commutative argument detection");
  compress->add_flag("--no-counting", no_compaction, "Keep full tables for commutative blocks");

  auto* query = app.add_subcommand("query", "Answer P(target | evidence)");
  query->add_option("--model", model, "Factor graph JSON")->required()->check(CLI::ExistingFile);
  query->add_option("--target", target, "Query RV")->required();
  query->add_option("--value", value, "Report only this label's probability as well");
  query->add_option("--evidence", evidence, "Observation as rv=value (repeatable)");
  query->add_option("--evidence-file", evidence_file, "Evidence JSON")->check(CLI::ExistingFile);
  query->add_option("--method", method, "enum | ve | lifted")->check(CLI::IsMember({"enum", "ve", "lifted"}));
  query->add_option("--eps", eps, "Compression tolerance used before lifted evaluation");

  std::size_t m = 1;
  auto* bound = app.add_subcommand("bound", "Closed-form distance bounds, optionally with the exact distance");
  bound->add_option("--m", m, "Number of factors")->check(CLI::PositiveNumber);
  bound->add_option("--eps", eps, "Relative tolerance in [0, 1)")->required();
  bound->add_option("--model", model, "First model; with --compare, the exact distance is reported")
      ->check(CLI::ExistingFile);
  bound->add_option("--compare", compare, "Second model")->check(CLI::ExistingFile);
  bool worst_case = false;
  bound->add_flag("--worst-case", worst_case, "Report the bound-attaining model for --m");

  std::vector<std::size_t> ks;
  std::vector<double> xs, epss;
  std::uint64_t seed = 0;
  std::size_t n_queries = 10;
  std::string out;
  bool pairwise = false, skip_exact = false, free_grid = false;
  unsigned jobs = 1;
  auto* bench = app.add_subcommand("bench", "Quotient and timing study on generated star models (CSV)");
  bench->add_option("--k", ks, "Branch counts (default 2 4 8 16)");
  bench->add_option("--x", xs, "Perturbed proportions (default full grid)");
  bench->add_option("--eps", epss, "Tolerances (default full grid)");
  bench->add_option("--seed", seed, "Base seed");
  bench->add_option("--queries", n_queries, "Queries per model");
  bench->add_option("--out", out, "CSV path (default stdout)");
  bench->add_flag("--guarantee-pairwise", pairwise, "Keep perturbed copies pairwise ε-equivalent");
  bench->add_flag("--skip-exact", skip_exact, "Do not compute the exact distance");
  bench->add_flag("--free", free_grid, "Allow values outside the published grids");
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* inspect = app.add_subcommand("inspect", "Summarise a model file");
  inspect->add_option("--model", model, "Factor graph JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*compress) {
      const FactorGraph fg = load_fg_file(model);
      warn_isolated(fg);
      EacpOptions opts;
      opts.detect_commutative = !no_commutative;
      opts.commutative_eps = comm_eps;
      opts.counting_compaction = !no_compaction;
      const auto res = run_eacp(fg, Epsilon{eps}, gather_evidence(evidence, evidence_file), opts);
      json groups = json::array();
      for (std::size_t g = 0; g < res.grouping.groups.size(); ++g) {
        json members = json::array();
        for (const auto& mem : res.grouping.groups[g].members) members.push_back(fg.factors()[mem.factor].name());
        groups.push_back({{"size", res.grouping.groups[g].size()},
                          {"members", members},
                          {"max_rel_dev", res.per_group_max_rel_dev[g]}});
      }
      json report = {{"eps", eps},
                     {"n_factors", fg.num_factors()},
                     {"n_groups", res.grouping.groups.size()},
                     {"n_rv_classes", res.pfg.rv_classes.size()},
                     {"groups", groups}};
      if (pfg_out.empty()) {
        report["pfg"] = json::parse(save_pfg(res.pfg));
      } else {
        write_file(pfg_out, save_pfg(res.pfg));
      }
      if (model_out.empty()) {
        report["m_prime"] = json::parse(save_fg(res.m_prime));
      } else {
        write_file(model_out, save_fg(res.m_prime));
      }
      std::cout << report.dump(2) << "\n";
      std::cerr << fg.num_factors() << " factors -> " << res.grouping.groups.size() << " groups\n";
      return 0;
    }
    if (*query) {
      const FactorGraph fg = load_fg_file(model);
      warn_isolated(fg);
      Query q{target, gather_evidence(evidence, evidence_file), std::nullopt};
      if (!value.empty()) q.value = value;
      QueryResult r;
      if (method == "enum") {
        r = query_enumerate(fg, q);
      } else if (method == "ve") {
        r = query_ve(fg, q);
      } else {
        r = query_lifted_star(run_eacp(fg, Epsilon{eps}).pfg, target, q);
      }
      json outj = distribution_json(r);
      outj["target"] = target;
      if (q.value) outj["p"] = r.probability(*q.value);
      std::cout << outj.dump(2) << "\n";
      return 0;
    }
    if (*bound) {
      const Epsilon e{eps};
      json outj;
      std::optional<FactorGraph> a, b;
      if (!model.empty()) {
        a = load_fg_file(model);
        if (bound->count("--m") == 0) m = a->num_factors();
      }
      const BoundSet bs = bound_set(m, e);
      outj["bounds"] = {{"m", bs.m},          {"eps", bs.eps.value()}, {"d_general", bs.d_general},
                        {"d_tight", bs.d_tight}, {"alpha1", bs.alpha1},   {"alpha2", bs.alpha2}};
      const auto env = corollary_envelopes(m, e);
      outj["odds_envelopes"] = {{"general", {env.general.first, env.general.second}},
                                {"tight", {env.tight.first, env.tight.second}}};
      if (!compare.empty()) {
        if (!a) throw ParseError("--compare", "requires --model");
        b = load_fg_file(compare);
        const auto rep = distance_exact(*a, *b);
        outj["distance"] = {{"d_exact", rep.d_exact},
                            {"max_ratio", rep.max_ratio},
                            {"min_ratio", rep.min_ratio},
                            {"argmax", a->labels(rep.argmax_assignment)},
                            {"argmin", a->labels(rep.argmin_assignment)}};
      }
      if (worst_case) outj["worst_case_model"] = json::parse(save_fg(worst_case_fg(m, e)));
      std::cout << outj.dump(2) << "\n";
      return 0;
    }
    if (*bench) {
      std::vector<GenConfig> configs;
      std::uint64_t s = seed;
      for (std::size_t k : or_default(ks, {2, 4, 8, 16})) {
        for (double x : or_default(xs, kGridX)) {
          for (double ep : or_default(epss, kGridEps)) {
            GenConfig c;
            c.k = k;
            c.x = x;
            c.eps = ep;
            c.seed = s++;
            c.guarantee_pairwise = pairwise;
            c.free = free_grid;
            validate(c);
            configs.push_back(c);
          }
        }
      }
      ExperimentOptions opts;
      opts.skip_exact = skip_exact;
      const auto records = run_experiments(configs, n_queries, opts, jobs);
      const std::string csv = emit_csv(records);
      if (out.empty()) {
        std::cout << csv;
      } else {
        write_file(out, csv);
      }
      std::cerr << records.size() << " experiments, " << n_queries << " queries each\n";
      return 0;
    }
    if (*inspect) {
      const FactorGraph fg = load_fg_file(model);
      json factors = json::array();
      for (const auto& f : fg.factors()) {
        factors.push_back({{"name", f.name()}, {"args", f.args()}, {"table_size", f.table().size()}});
      }
      json rvs = json::array();
      for (const auto& rv : fg.rvs()) rvs.push_back({{"name", rv.name}, {"range_size", rv.range.size()}});
      json outj = {{"n_rvs", fg.num_rvs()},
                   {"n_factors", fg.num_factors()},
                   {"joint_states", fg.joint_state_count()},
                   {"isolated_rvs", fg.isolated_rvs()},
                   {"rvs", rvs},
                   {"factors", factors}};
      std::cout << outj.dump(2) << "\n";
      std::cerr << fg.num_rvs() << " rvs, " << fg.num_factors() << " factors\n";
      return 0;
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
