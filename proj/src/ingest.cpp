#include "mvsg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "mvsg/error.hpp"

namespace mvsg {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Splits one logical record. Returns false at end of input. A quoted field may
// span physical lines; `line_no` tracks the line the record started on.
bool read_record(std::istream& in, char delim, std::vector<std::string>& fields,
                 std::size_t& line_no, std::size_t& next_line) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  line_no = next_line++;

  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (quoted) {
        std::string more;
        if (!std::getline(in, more)) {
          throw InputError("line " + std::to_string(line_no) + ": unterminated quoted field");
        }
        ++next_line;
        field.push_back('\n');
        line = std::move(more);
        i = 0;
        continue;
      }
      break;
    }
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delim) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
    ++i;
  }
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(std::move(field));
  return true;
}

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

AttributeTable::Cell split_cell(const std::string& raw, const LoadOptions& options) {
  AttributeTable::Cell tokens;
  std::string_view rest(raw);
  const std::string& sep = options.value_delimiter;
  while (true) {
    std::size_t pos = sep.empty() ? std::string_view::npos : rest.find(sep);
    std::string token = trim(rest.substr(0, pos));
    if (options.lowercase) {
      std::transform(token.begin(), token.end(), token.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    if (!token.empty()) tokens.push_back(std::move(token));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + sep.size());
  }
  return tokens;
}

std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find_first_of(std::string{delim, '"', '\n', '\r'}) == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

AttributeTable::AttributeTable(std::vector<std::string> entity_ids,
                               std::vector<std::string> attributes)
    : entity_ids_(std::move(entity_ids)), attributes_(std::move(attributes)) {
  std::unordered_set<std::string> seen;
  for (const auto& id : entity_ids_) {
    if (!seen.insert(id).second) throw InputError("duplicate entity id '" + id + "'");
  }
  seen.clear();
  for (const auto& name : attributes_) {
    if (!seen.insert(name).second) throw InputError("duplicate attribute name '" + name + "'");
  }
  columns_.assign(attributes_.size(), std::vector<Cell>(entity_ids_.size()));
}

void AttributeTable::set_cell(std::size_t entity, std::size_t attribute, Cell tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  columns_.at(attribute).at(entity) = std::move(tokens);
}

std::size_t AttributeTable::attribute_index(const std::string& name) const {
  auto it = std::find(attributes_.begin(), attributes_.end(), name);
  return static_cast<std::size_t>(it - attributes_.begin());
}

AttributeTable load_attribute_table(std::istream& in, const LoadOptions& options) {
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  std::size_t next_line = 1;
  if (!read_record(in, options.field_delimiter, fields, line_no, next_line)) {
    throw InputError("input is empty: expected a header row");
  }
  std::vector<std::string> header;
  for (auto& f : fields) header.push_back(trim(f));
  auto id_it = std::find(header.begin(), header.end(), options.id_column);
  if (id_it == header.end()) {
    throw InputError("id column '" + options.id_column + "' not found in header");
  }
  const std::size_t id_col = static_cast<std::size_t>(id_it - header.begin());

  std::vector<std::string> attributes;
  std::vector<std::size_t> attribute_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == id_col) continue;
    attributes.push_back(header[c]);
    attribute_cols.push_back(c);
  }

  std::vector<std::string> ids;
  std::vector<std::vector<AttributeTable::Cell>> rows;
  std::unordered_set<std::string> seen;
  while (read_record(in, options.field_delimiter, fields, line_no, next_line)) {
    if (blank_record(fields)) continue;
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    std::string id = trim(fields[id_col]);
    if (!seen.insert(id).second) {
      throw InputError("line " + std::to_string(line_no) + ": duplicate entity id '" + id + "'");
    }
    ids.push_back(std::move(id));
    std::vector<AttributeTable::Cell> row;
    row.reserve(attribute_cols.size());
    for (std::size_t c : attribute_cols) row.push_back(split_cell(fields[c], options));
    rows.push_back(std::move(row));
  }

  AttributeTable table(std::move(ids), std::move(attributes));
  for (std::size_t e = 0; e < rows.size(); ++e) {
    for (std::size_t a = 0; a < rows[e].size(); ++a) table.set_cell(e, a, std::move(rows[e][a]));
  }
  return table;
}

AttributeTable load_attribute_table_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input '" + path + "'");
  return load_attribute_table(in, options);
}

void write_attribute_table(std::ostream& out, const AttributeTable& table,
                           const LoadOptions& options) {
  const char d = options.field_delimiter;
  out << quote_if_needed(options.id_column, d);
  for (const auto& name : table.attributes()) out << d << quote_if_needed(name, d);
  out << '\n';
  for (std::size_t e = 0; e < table.num_entities(); ++e) {
    out << quote_if_needed(table.entity_ids()[e], d);
    for (std::size_t a = 0; a < table.num_attributes(); ++a) {
      std::string joined;
      for (const auto& token : table.cell(e, a)) {
        if (!joined.empty()) joined += options.value_delimiter;
        joined += token;
      }
      out << d << quote_if_needed(joined, d);
    }
    out << '\n';
  }
}

Blacklist load_stopwords(std::istream& in) {
  Blacklist blacklist;
  std::string line;
  std::string section;
  bool have_section = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string token = trim(line);
    if (token.empty() || token.front() == '#') continue;
    if (token.front() == '[' && token.back() == ']') {
      section = trim(std::string_view(token).substr(1, token.size() - 2));
      have_section = true;
      blacklist[section];
      continue;
    }
    if (!have_section) {
      throw InputError("stopwords line " + std::to_string(line_no) +
                       ": token before any [attribute] header");
    }
    blacklist[section].insert(std::move(token));
  }
  return blacklist;
}

Blacklist load_stopwords_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open stopwords file '" + path + "'");
  return load_stopwords(in);
}

AttributeTable apply_stopwords(const AttributeTable& table, const Blacklist& blacklist) {
  AttributeTable out = table;
  for (std::size_t a = 0; a < table.num_attributes(); ++a) {
    auto it = blacklist.find(table.attributes()[a]);
    if (it == blacklist.end() || it->second.empty()) continue;
    const auto& stop = it->second;
    for (std::size_t e = 0; e < table.num_entities(); ++e) {
      AttributeTable::Cell kept;
      for (const auto& token : table.cell(e, a)) {
        if (!stop.count(token)) kept.push_back(token);
      }
      out.set_cell(e, a, std::move(kept));
    }
  }
  return out;
}

double IefWeights::weight(std::size_t attribute, const std::string& token) const {
  const auto& m = weights_.at(attribute);
  auto it = m.find(token);
  return it == m.end() ? 0.0 : it->second;
}

double ief_weight(std::size_t num_entities, std::size_t carriers) {
  const double r = static_cast<double>(num_entities) / std::log1p(static_cast<double>(carriers));
  return r * r;
}

IefWeights compute_ief(const AttributeTable& table) {
  if (table.num_entities() == 0) throw PreconditionError("compute_ief: table has no entities");
  IefWeights ief;
  ief.num_entities_ = table.num_entities();
  ief.weights_.resize(table.num_attributes());
  for (std::size_t a = 0; a < table.num_attributes(); ++a) {
    std::map<std::string, std::size_t> carriers;
    for (std::size_t e = 0; e < table.num_entities(); ++e) {
      for (const auto& token : table.cell(e, a)) ++carriers[token];
    }
    auto& weights = ief.weights_[a];
    for (const auto& [token, count] : carriers) {
      weights.emplace_hint(weights.end(), token, ief_weight(table.num_entities(), count));
    }
  }
  return ief;
}

}  // namespace mvsg
