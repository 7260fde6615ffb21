#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "liftcomp/factor_graph.hpp"
#include "liftcomp/pfg.hpp"

namespace liftcomp {

/// Parses {"rvs": [...], "factors": [...]}. Throws ParseError naming the
/// offending field, e.g. `factors[1].table[3]`.
FactorGraph load_fg(std::string_view json_text);
FactorGraph load_fg_file(const std::filesystem::path& path);
/// Pretty-printed JSON. Doubles are written in shortest round-trip form.
std::string save_fg(const FactorGraph& fg);

/// Parses {"evidence": [{"rv": .., "value": ..}, ...]}.
Evidence load_evidence(std::string_view json_text);
Evidence load_evidence_file(const std::filesystem::path& path);
std::string save_evidence(const Evidence& evidence);

/// {"rv_classes": [...], "parfactors": [...]} with member alignments and
/// counting tables.
std::string save_pfg(const ParfactorGraph& pfg);

/// Reads a whole file. Throws ParseError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace liftcomp
