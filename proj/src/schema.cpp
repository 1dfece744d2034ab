#include "recourse/schema.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "recourse/csv.hpp"
#include "recourse/errors.hpp"

namespace recourse {

namespace {

const char* kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::numeric: return "numeric";
    case FeatureKind::categorical: return "categorical";
    case FeatureKind::binary: return "binary";
  }
  return "?";
}

const char* actionability_name(Actionability a) {
  switch (a) {
    case Actionability::free: return "free";
    case Actionability::immutable: return "immutable";
    case Actionability::increase_only: return "increase_only";
    case Actionability::decrease_only: return "decrease_only";
  }
  return "?";
}

FeatureKind parse_kind(const std::string& s) {
  if (s == "numeric") return FeatureKind::numeric;
  if (s == "categorical") return FeatureKind::categorical;
  if (s == "binary") return FeatureKind::binary;
  throw ConfigError("schema: unknown feature kind '" + s + "'");
}

Actionability parse_actionability(const std::string& s) {
  if (s == "free") return Actionability::free;
  if (s == "immutable") return Actionability::immutable;
  if (s == "increase_only") return Actionability::increase_only;
  if (s == "decrease_only") return Actionability::decrease_only;
  throw ConfigError("schema: unknown actionability '" + s + "'");
}

double parse_numeric_cell(const std::string& cell, std::size_t row, const std::string& col) {
  double v = 0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    std::ostringstream oss;
    oss << "row " << row << ", column '" << col << "': cannot parse numeric value '" << cell << "'";
    throw ConfigError(oss.str());
  }
  return v;
}

}  // namespace

int FeatureSchema::feature_index(const std::string& name) const {
  for (std::size_t j = 0; j < features.size(); ++j)
    if (features[j].name == name) return static_cast<int>(j);
  return -1;
}

void FeatureSchema::validate() const {
  if (features.empty()) throw ConfigError("schema: no features");
  std::set<std::string> names;
  for (const auto& f : features) {
    if (f.name.empty()) throw ConfigError("schema: empty feature name");
    if (!names.insert(f.name).second)
      throw ConfigError("schema: duplicate feature name '" + f.name + "'");
    if (f.kind == FeatureKind::numeric) {
      if (f.bins < 2)
        throw ConfigError("schema: feature '" + f.name + "': bins must be >= 2");
      if (f.max_bin_shift < -1 || f.max_bin_shift > f.bins - 1)
        throw ConfigError("schema: feature '" + f.name + "': max_bin_shift out of range");
    } else {
      if (f.actionability == Actionability::increase_only ||
          f.actionability == Actionability::decrease_only)
        throw ConfigError("schema: feature '" + f.name +
                          "': directional actionability requires a numeric feature");
      if (f.kind == FeatureKind::categorical) {
        if (f.categories.empty())
          throw ConfigError("schema: feature '" + f.name + "': empty category set");
        std::set<std::string> cats(f.categories.begin(), f.categories.end());
        if (cats.size() != f.categories.size())
          throw ConfigError("schema: feature '" + f.name + "': duplicate categories");
      }
    }
  }
  if (!label_column.empty() && names.count(label_column))
    throw ConfigError("schema: label column '" + label_column + "' collides with a feature");
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
  FeatureSchema s;
  if (!j.is_object() || !j.contains("features") || !j["features"].is_array())
    throw ConfigError("schema: expected an object with a 'features' array");
  s.label_column = j.value("label_column", std::string());
  for (const auto& jf : j["features"]) {
    FeatureSpec f;
    if (!jf.contains("name")) throw ConfigError("schema: feature without a name");
    f.name = jf["name"].get<std::string>();
    f.kind = parse_kind(jf.value("kind", std::string("numeric")));
    f.actionability = parse_actionability(jf.value("actionability", std::string("free")));
    if (jf.contains("bins")) {
      f.bins = jf["bins"].get<int>();
      f.bins_explicit = true;
    }
    if (jf.contains("max_bin_shift")) f.max_bin_shift = jf["max_bin_shift"].get<int>();
    if (jf.contains("categories"))
      f.categories = jf["categories"].get<std::vector<std::string>>();
    s.features.push_back(std::move(f));
  }
  s.validate();
  return s;
}

FeatureSchema FeatureSchema::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schema: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("schema: " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json FeatureSchema::to_json() const {
  nlohmann::ordered_json j;
  if (!label_column.empty()) j["label_column"] = label_column;
  j["features"] = nlohmann::ordered_json::array();
  for (const auto& f : features) {
    nlohmann::ordered_json jf;
    jf["name"] = f.name;
    jf["kind"] = kind_name(f.kind);
    jf["actionability"] = actionability_name(f.actionability);
    if (f.kind == FeatureKind::numeric) {
      jf["bins"] = f.bins;
      jf["max_bin_shift"] = f.effective_max_shift();
    } else if (f.kind == FeatureKind::categorical) {
      jf["categories"] = f.categories;
    }
    j["features"].push_back(std::move(jf));
  }
  return j;
}

Dataset load_dataset(const std::string& csv_path, const FeatureSchema& schema) {
  schema.validate();
  CsvTable t = read_csv_file(csv_path);

  std::vector<int> col_of_feature(schema.features.size(), -1);
  int label_col = -1;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& h = t.header[c];
    int j = schema.feature_index(h);
    if (j >= 0) {
      if (col_of_feature[static_cast<std::size_t>(j)] != -1)
        throw ConfigError(csv_path + ": duplicate column '" + h + "'");
      col_of_feature[static_cast<std::size_t>(j)] = static_cast<int>(c);
    } else if (!schema.label_column.empty() && h == schema.label_column) {
      label_col = static_cast<int>(c);
    } else {
      throw ConfigError(csv_path + ": column '" + h + "' is not in the schema");
    }
  }
  for (std::size_t j = 0; j < schema.features.size(); ++j)
    if (col_of_feature[j] == -1)
      throw ConfigError(csv_path + ": missing column '" + schema.features[j].name + "'");

  Dataset ds;
  ds.schema = schema;
  ds.rows.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& cells = t.rows[r];
    Instance x(schema.features.size(), 0.0);
    for (std::size_t j = 0; j < schema.features.size(); ++j) {
      const FeatureSpec& f = schema.features[j];
      const std::string& cell = cells[static_cast<std::size_t>(col_of_feature[j])];
      switch (f.kind) {
        case FeatureKind::numeric:
          x[j] = parse_numeric_cell(cell, r + 2, f.name);
          break;
        case FeatureKind::categorical: {
          auto it = std::find(f.categories.begin(), f.categories.end(), cell);
          if (it == f.categories.end()) {
            std::ostringstream oss;
            oss << "row " << r + 2 << ", column '" << f.name << "': unknown category '" << cell
                << "'";
            throw ConfigError(oss.str());
          }
          x[j] = static_cast<double>(it - f.categories.begin());
          break;
        }
        case FeatureKind::binary: {
          if (cell != "0" && cell != "1") {
            std::ostringstream oss;
            oss << "row " << r + 2 << ", column '" << f.name << "': binary value must be 0 or 1, got '"
                << cell << "'";
            throw ConfigError(oss.str());
          }
          x[j] = cell == "1" ? 1.0 : 0.0;
          break;
        }
      }
    }
    ds.rows.push_back(std::move(x));
    if (label_col >= 0) {
      const std::string& cell = cells[static_cast<std::size_t>(label_col)];
      if (cell != "0" && cell != "1") {
        std::ostringstream oss;
        oss << "row " << r + 2 << ", column '" << schema.label_column
            << "': label must be 0 or 1, got '" << cell << "'";
        throw ConfigError(oss.str());
      }
      ds.labels.push_back(cell == "1" ? 1 : 0);
    }
  }
  return ds;
}

std::string render_value(const FeatureSpec& f, double v) {
  switch (f.kind) {
    case FeatureKind::numeric:
      return format_double(v);
    case FeatureKind::categorical: {
      auto idx = static_cast<std::size_t>(v);
      if (idx >= f.categories.size())
        throw RuntimeError("render: category index out of range for '" + f.name + "'");
      return f.categories[idx];
    }
    case FeatureKind::binary:
      return v != 0.0 ? "1" : "0";
  }
  return "";
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path);
  std::vector<std::string> header;
  for (const auto& f : ds.schema.features) header.push_back(f.name);
  if (ds.has_labels()) {
    if (ds.schema.label_column.empty())
      throw RuntimeError("write_dataset_csv: labeled dataset but schema has no label column name");
    header.push_back(ds.schema.label_column);
  }
  out << csv_join(header) << "\n";
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    std::vector<std::string> cells;
    cells.reserve(header.size());
    for (std::size_t j = 0; j < ds.schema.features.size(); ++j)
      cells.push_back(render_value(ds.schema.features[j], ds.rows[r][j]));
    if (ds.has_labels()) cells.push_back(ds.labels[r] ? "1" : "0");
    out << csv_join(cells) << "\n";
  }
}

std::uint64_t schema_fingerprint(const FeatureSchema& schema) {
  std::string s = schema.to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace recourse
