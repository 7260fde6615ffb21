#include "liftcomp/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "liftcomp/error.hpp"

namespace liftcomp {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  return v;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double as_potential(const json& v, const std::string& path) {
  double x;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ParseError(path, "not a decimal number: '" + s + "'");
    }
    if (used != s.size()) throw ParseError(path, "not a decimal number: '" + s + "'");
  } else {
    throw ParseError(path, "expected a number");
  }
  if (!std::isfinite(x)) throw ParseError(path, "potential must be finite");
  if (!(x > 0.0)) throw ParseError(path, "potential must be strictly positive");
  return x;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

FactorGraph load_fg(std::string_view json_text) {
  const json doc = parse(json_text);
  std::vector<RandomVariable> rvs;
  std::map<std::string, std::size_t> card;
  const json& jrvs = as_array(field(doc, "rvs", ""), "rvs");
  for (std::size_t i = 0; i < jrvs.size(); ++i) {
    const std::string p = at("rvs", i);
    RandomVariable rv;
    rv.name = as_string(field(jrvs[i], "name", p), p + ".name");
    const json& range = as_array(field(jrvs[i], "range", p), p + ".range");
    for (std::size_t j = 0; j < range.size(); ++j) rv.range.push_back(as_string(range[j], at(p + ".range", j)));
    if (rv.range.size() < 2) throw ParseError(p + ".range", "needs at least two labels");
    for (std::size_t j = 0; j < rv.range.size(); ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        if (rv.range[j] == rv.range[k]) throw ParseError(at(p + ".range", j), "duplicate label '" + rv.range[j] + "'");
      }
    }
    if (!card.emplace(rv.name, rv.range.size()).second) throw ParseError(p + ".name", "duplicate rv '" + rv.name + "'");
    rvs.push_back(std::move(rv));
  }
  std::vector<Factor> factors;
  const json& jf = as_array(field(doc, "factors", ""), "factors");
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const std::string p = at("factors", i);
    const std::string name = as_string(field(jf[i], "name", p), p + ".name");
    const json& jargs = as_array(field(jf[i], "args", p), p + ".args");
    std::vector<std::string> args;
    Shape shape;
    for (std::size_t j = 0; j < jargs.size(); ++j) {
      const std::string ap = at(p + ".args", j);
      args.push_back(as_string(jargs[j], ap));
      auto it = card.find(args.back());
      if (it == card.end()) throw ParseError(ap, "undeclared rv '" + args.back() + "'");
      for (std::size_t k = 0; k < j; ++k) {
        if (args[k] == args[j]) throw ParseError(ap, "rv '" + args[j] + "' appears twice");
      }
      shape.push_back(it->second);
    }
    const json& jt = as_array(field(jf[i], "table", p), p + ".table");
    const std::size_t expected = table_size(shape);
    if (jt.size() != expected) {
      throw ParseError(p + ".table", "length " + std::to_string(jt.size()) + " does not match the expected " +
                                         std::to_string(expected));
    }
    std::vector<double> table;
    table.reserve(jt.size());
    for (std::size_t j = 0; j < jt.size(); ++j) table.push_back(as_potential(jt[j], at(p + ".table", j)));
    try {
      factors.emplace_back(name, std::move(args), std::move(shape), std::move(table));
    } catch (const ModelError& e) {
      throw ParseError(p, e.what());
    }
  }
  try {
    return FactorGraph(std::move(rvs), std::move(factors));
  } catch (const ModelError& e) {
    throw ParseError("", e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("", "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FactorGraph load_fg_file(const std::filesystem::path& path) { return load_fg(read_text_file(path)); }

std::string save_fg(const FactorGraph& fg) {
  json doc;
  doc["rvs"] = json::array();
  for (const auto& rv : fg.rvs()) doc["rvs"].push_back({{"name", rv.name}, {"range", rv.range}});
  doc["factors"] = json::array();
  for (const auto& f : fg.factors()) {
    doc["factors"].push_back({{"name", f.name()}, {"args", f.args()}, {"table", f.table()}});
  }
  return doc.dump(2) + "\n";
}

Evidence load_evidence(std::string_view json_text) {
  const json doc = parse(json_text);
  const json& arr = as_array(field(doc, "evidence", ""), "evidence");
  Evidence ev;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = at("evidence", i);
    ev.push_back({as_string(field(arr[i], "rv", p), p + ".rv"), as_string(field(arr[i], "value", p), p + ".value")});
  }
  return ev;
}

Evidence load_evidence_file(const std::filesystem::path& path) { return load_evidence(read_text_file(path)); }

std::string save_evidence(const Evidence& evidence) {
  json doc;
  doc["evidence"] = json::array();
  for (const auto& o : evidence) doc["evidence"].push_back({{"rv", o.rv}, {"value", o.value}});
  return doc.dump(2) + "\n";
}

std::string save_pfg(const ParfactorGraph& pfg) {
  json doc;
  doc["rv_classes"] = json::array();
  for (const auto& c : pfg.rv_classes) {
    doc["rv_classes"].push_back({{"representative", c.representative}, {"members", c.members}, {"range", c.range}});
  }
  doc["parfactors"] = json::array();
  for (const auto& pf : pfg.parfactors) {
    json members = json::array();
    for (const auto& m : pf.members) {
      members.push_back({{"name", m.name}, {"args", m.args}, {"alignment", m.alignment.perm}});
    }
    json jpf = {{"representative",
                 {{"name", pf.representative.name()},
                  {"args", pf.representative.args()},
                  {"table", pf.representative.table()}}},
                {"count", pf.count()},
                {"members", members},
                {"crv", nullptr}};
    if (pf.crv) {
      json blocks = json::array();
      for (const auto& b : pf.crv->blocks) blocks.push_back({{"positions", b.positions}, {"histograms", b.histograms}});
      json dims = json::array();
      for (const auto& d : pf.crv->dims) dims.push_back({{"counting", d.counting}, {"index", d.index}});
      jpf["crv"] = {{"blocks", blocks}, {"dims", dims}, {"shape", pf.crv->shape}, {"table", pf.crv->table}};
    }
    doc["parfactors"].push_back(std::move(jpf));
  }
  return doc.dump(2) + "\n";
}

}  // namespace liftcomp
