#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mvsg {

// Entities x attributes, each cell a set of value tokens. Cells are stored
// column-major (one column per attribute) with tokens sorted and unique.
class AttributeTable {
 public:
  using Cell = std::vector<std::string>;

  AttributeTable() = default;
  AttributeTable(std::vector<std::string> entity_ids,
                 std::vector<std::string> attributes);

  std::size_t num_entities() const { return entity_ids_.size(); }
  std::size_t num_attributes() const { return attributes_.size(); }

  const std::vector<std::string>& entity_ids() const { return entity_ids_; }
  const std::vector<std::string>& attributes() const { return attributes_; }

  const Cell& cell(std::size_t entity, std::size_t attribute) const {
    return columns_[attribute][entity];
  }
  // Replaces the cell, sorting and collapsing duplicate tokens.
  void set_cell(std::size_t entity, std::size_t attribute, Cell tokens);

  // Index of a named attribute, or num_attributes() when absent.
  std::size_t attribute_index(const std::string& name) const;

  friend bool operator==(const AttributeTable&, const AttributeTable&) = default;

 private:
  std::vector<std::string> entity_ids_;
  std::vector<std::string> attributes_;
  std::vector<std::vector<Cell>> columns_;
};

struct LoadOptions {
  std::string id_column = "id";
  char field_delimiter = ',';
  std::string value_delimiter = "|";
  // Optional normalization pre-pass; off by default so tokens compare
  // case-sensitively after whitespace trimming.
  bool lowercase = false;
};

// Reads a delimited text table with a header row. Fields may be quoted with
// '"' (doubled quotes escape). Throws InputError on a missing id column,
// duplicate entity ids or attribute names, and rows with the wrong number of
// fields (the message carries the 1-based line number).
AttributeTable load_attribute_table(std::istream& in, const LoadOptions& options = {});
AttributeTable load_attribute_table_file(const std::string& path,
                                         const LoadOptions& options = {});

// Writes the table in the format load_attribute_table reads back.
void write_attribute_table(std::ostream& out, const AttributeTable& table,
                           const LoadOptions& options = {});

// attribute name -> tokens to drop from that attribute only.
using Blacklist = std::map<std::string, std::set<std::string>>;

// Stopword file: "[attribute]" section headers followed by one token per
// line. Blank lines and lines starting with '#' are skipped.
Blacklist load_stopwords(std::istream& in);
Blacklist load_stopwords_file(const std::string& path);

AttributeTable apply_stopwords(const AttributeTable& table, const Blacklist& blacklist);

// Inverse entity frequency weights, (N / ln(1 + carriers))^2 per surviving
// token. Tokens not present in an attribute (blacklisted or unseen) weigh 0.
class IefWeights {
 public:
  IefWeights() = default;

  double weight(std::size_t attribute, const std::string& token) const;
  const std::map<std::string, double>& attribute_weights(std::size_t attribute) const {
    return weights_[attribute];
  }
  std::size_t num_attributes() const { return weights_.size(); }
  std::size_t num_entities() const { return num_entities_; }

  friend bool operator==(const IefWeights&, const IefWeights&) = default;

 private:
  friend IefWeights compute_ief(const AttributeTable& table);

  std::size_t num_entities_ = 0;
  std::vector<std::map<std::string, double>> weights_;
};

// Weight of a token carried by `carriers` of `num_entities` entities.
double ief_weight(std::size_t num_entities, std::size_t carriers);

IefWeights compute_ief(const AttributeTable& table);

}  // namespace mvsg
