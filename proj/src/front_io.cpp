#include "recourse/front_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "recourse/errors.hpp"

namespace recourse {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16) throw RuntimeError("front file: malformed fingerprint");
  std::uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9')
      v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f')
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else
      throw RuntimeError("front file: malformed fingerprint");
  }
  return v;
}

}  // namespace

std::string solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::complete: return "complete";
    case SolveStatus::timed_out: return "timed_out";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

SolveStatus solve_status_from_name(const std::string& name) {
  if (name == "complete") return SolveStatus::complete;
  if (name == "timed_out") return SolveStatus::timed_out;
  if (name == "infeasible") return SolveStatus::infeasible;
  throw RuntimeError("front file: unknown status '" + name + "'");
}

nlohmann::ordered_json front_to_json(const FrontDocument& doc) {
  nlohmann::ordered_json j;
  j["format_version"] = doc.format_version;
  j["schema"] = doc.schema.to_json();
  j["schema_fingerprint"] = hex64(doc.schema_fp);
  j["predictor"] = doc.predictor;
  j["status"] = solve_status_name(doc.status);
  j["n_affected"] = doc.n_affected;

  nlohmann::ordered_json cm;
  cm["cdf_n"] = doc.cdf_n;
  cm["cdf_columns"] = doc.cdf_columns;
  cm["binning"] = nlohmann::ordered_json::array();
  for (const auto& b : doc.binning)
    cm["binning"].push_back({{"lo", b.lo}, {"width", b.width}, {"bins", b.bins}});
  j["cost_model"] = cm;

  j["front"] = nlohmann::ordered_json::array();
  for (const auto& e : doc.front) {
    nlohmann::ordered_json entry;
    entry["cost"] = e.value.cost;
    entry["loss"] = e.value.loss;
    entry["tree"] = tree_to_json(e.tree, doc.schema);
    j["front"].push_back(entry);
  }
  return j;
}

FrontDocument front_from_json(const nlohmann::ordered_json& j) {
  try {
    FrontDocument doc;
    doc.format_version = j.at("format_version").get<int>();
    if (doc.format_version != 1)
      throw RuntimeError("front file: unsupported format version " +
                         std::to_string(doc.format_version));
    doc.schema = FeatureSchema::from_json(j.at("schema"));
    doc.schema_fp = parse_hex64(j.at("schema_fingerprint").get<std::string>());
    if (doc.schema_fp != schema_fingerprint(doc.schema))
      throw RuntimeError("front file: fingerprint does not match the embedded schema");
    doc.predictor = j.at("predictor");
    doc.status = solve_status_from_name(j.at("status").get<std::string>());
    doc.n_affected = j.at("n_affected").get<std::size_t>();

    const auto& cm = j.at("cost_model");
    doc.cdf_n = cm.at("cdf_n").get<std::size_t>();
    doc.cdf_columns = cm.at("cdf_columns").get<std::vector<std::vector<double>>>();
    for (const auto& b : cm.at("binning")) {
      FeatureBinning fb;
      fb.lo = b.at("lo").get<double>();
      fb.width = b.at("width").get<double>();
      fb.bins = b.at("bins").get<int>();
      doc.binning.push_back(fb);
    }
    if (doc.cdf_columns.size() != doc.schema.features.size() ||
        doc.binning.size() != doc.schema.features.size())
      throw RuntimeError("front file: cost model does not cover every schema feature");

    for (const auto& entry : j.at("front")) {
      PortableFrontEntry e;
      e.value.cost = entry.at("cost").get<double>();
      e.value.loss = entry.at("loss").get<std::int64_t>();
      e.tree = tree_from_json(entry.at("tree"), doc.schema);
      doc.front.push_back(std::move(e));
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeError(std::string("front file: ") + e.what());
  }
}

void write_front_file(const std::string& path, const FrontDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write front file: " + path);
  out << front_to_json(doc).dump(2) << "\n";
  if (!out) throw RuntimeError("short write on front file: " + path);
}

FrontDocument read_front_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot read front file: " + path);
  // Parsed order-preserving so a reloaded document re-serializes byte for
  // byte (the embedded predictor is carried verbatim).
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeError("front file '" + path + "': " + e.what());
  }
  return front_from_json(j);
}

}  // namespace recourse
