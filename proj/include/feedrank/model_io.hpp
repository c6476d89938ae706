#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "feedrank/index_engine.hpp"
#include "feedrank/state_space.hpp"
#include "feedrank/transition_model.hpp"

namespace feedrank {

// Everything fitting produces, plus the index table once computed.
struct ModelFile {
  std::vector<std::pair<std::string, std::string>> header;
  BinSpec bins;
  RewardFactors factors;
  TransitionModel model;
  std::optional<IndexTable> indices;

  const std::string* header_value(const std::string& key) const;
  void set_header(const std::string& key, std::string value);
};

// Sectioned text format; all reals written with 17 significant digits so
// read_model(write_model(m)) reproduces m exactly.
void write_model(std::ostream& out, const ModelFile& file);
ModelFile read_model(std::istream& in);

// Extraction ranks laid out as a novelty x popularity grid plus state 0.
void write_rank_grid(std::ostream& out, const IndexTable& table, const BinSpec& bins);

}  // namespace feedrank
