#include "recourse/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "recourse/errors.hpp"

namespace recourse {

namespace {

// Parses one logical CSV record starting at `pos`. Returns false at end of
// input. Quoted fields may contain embedded newlines and escaped quotes.
bool parse_record(const std::string& text, std::size_t& pos, std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
        } else {
          in_quotes = false;
          ++pos;
        }
      } else {
        field.push_back(c);
        ++pos;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      saw_any = true;
      ++pos;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      saw_any = true;
      ++pos;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      break;
    } else {
      field.push_back(c);
      saw_any = true;
      ++pos;
    }
  }
  if (in_quotes) throw ConfigError("csv: unterminated quoted field");
  fields.push_back(std::move(field));
  return saw_any || fields.size() > 1;
}

}  // namespace

CsvTable read_csv_string(const std::string& text) {
  CsvTable t;
  std::size_t pos = 0;
  std::vector<std::string> fields;
  if (!parse_record(text, pos, fields)) throw ConfigError("csv: missing header row");
  t.header = fields;
  std::size_t line = 1;
  while (parse_record(text, pos, fields)) {
    ++line;
    if (fields.size() != t.header.size()) {
      std::ostringstream oss;
      oss << "csv: row " << line << " has " << fields.size() << " fields, header has "
          << t.header.size();
      throw ConfigError(oss.str());
    }
    t.rows.push_back(fields);
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return read_csv_string(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string csv_escape(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace recourse
