#include "recourse/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "recourse/errors.hpp"
#include "recourse/rng.hpp"

namespace recourse {

namespace {

// Dense design-matrix encoding shared by training and prediction:
// numeric -> (v - mean) / sd, binary -> raw 0/1, categorical -> one-hot.
struct Encoding {
  struct Column {
    int feature;
    int category;     // -1 for numeric/binary
    double mean = 0;  // numeric standardization
    double sd = 1;
  };
  std::vector<Column> columns;

  static Encoding build(const FeatureSchema& schema) {
    Encoding enc;
    for (std::size_t j = 0; j < schema.features.size(); ++j) {
      const FeatureSpec& f = schema.features[j];
      if (f.kind == FeatureKind::categorical) {
        for (std::size_t c = 0; c < f.categories.size(); ++c)
          enc.columns.push_back({static_cast<int>(j), static_cast<int>(c), 0, 1});
      } else {
        enc.columns.push_back({static_cast<int>(j), -1, 0, 1});
      }
    }
    return enc;
  }

  void fit_standardization(const Dataset& ds) {
    for (auto& col : columns) {
      if (col.category >= 0) continue;
      if (ds.schema.features[static_cast<std::size_t>(col.feature)].kind != FeatureKind::numeric)
        continue;
      double sum = 0;
      for (const auto& row : ds.rows) sum += row[static_cast<std::size_t>(col.feature)];
      col.mean = sum / static_cast<double>(ds.rows.size());
      double ss = 0;
      for (const auto& row : ds.rows) {
        double d = row[static_cast<std::size_t>(col.feature)] - col.mean;
        ss += d * d;
      }
      double var = ss / static_cast<double>(ds.rows.size());
      col.sd = var > 0 ? std::sqrt(var) : 1.0;
    }
  }

  void encode(const Instance& x, std::vector<double>& out) const {
    out.resize(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const Column& col = columns[c];
      double v = x[static_cast<std::size_t>(col.feature)];
      if (col.category >= 0)
        out[c] = static_cast<int>(v) == col.category ? 1.0 : 0.0;
      else
        out[c] = (v - col.mean) / col.sd;
    }
  }
};

class LogisticPredictor : public Predictor {
 public:
  LogisticPredictor(Encoding enc, std::vector<double> weights, double bias)
      : enc_(std::move(enc)), w_(std::move(weights)), b_(bias) {}

  std::vector<int> predict(const std::vector<Instance>& batch) const override {
    std::vector<int> out(batch.size());
    std::vector<double> phi;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      enc_.encode(batch[i], phi);
      double z = b_;
      for (std::size_t c = 0; c < phi.size(); ++c) z += w_[c] * phi[c];
      out[i] = z >= 0 ? 1 : 0;
    }
    return out;
  }

  std::string name() const override { return "logistic"; }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["type"] = "logistic";
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& col : enc_.columns)
      j["columns"].push_back({{"feature", col.feature},
                              {"category", col.category},
                              {"mean", col.mean},
                              {"sd", col.sd}});
    j["weights"] = w_;
    j["bias"] = b_;
    return j;
  }

 private:
  Encoding enc_;
  std::vector<double> w_;
  double b_;
};

enum class RuleOp { lt, le, gt, ge, eq, ne };

struct RuleCond {
  int feature;
  RuleOp op;
  double value;  // category index for categorical ==/!=

  bool holds(const Instance& x) const {
    double v = x[static_cast<std::size_t>(feature)];
    switch (op) {
      case RuleOp::lt: return v < value;
      case RuleOp::le: return v <= value;
      case RuleOp::gt: return v > value;
      case RuleOp::ge: return v >= value;
      case RuleOp::eq: return v == value;
      case RuleOp::ne: return v != value;
    }
    return false;
  }
};

struct Rule {
  std::vector<RuleCond> conds;
  int then;
};

class RulePredictor : public Predictor {
 public:
  RulePredictor(std::vector<Rule> rules, int fallback, nlohmann::json source)
      : rules_(std::move(rules)), fallback_(fallback), source_(std::move(source)) {}

  std::vector<int> predict(const std::vector<Instance>& batch) const override {
    std::vector<int> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out[i] = fallback_;
      for (const Rule& r : rules_) {
        bool all = true;
        for (const RuleCond& c : r.conds)
          if (!c.holds(batch[i])) {
            all = false;
            break;
          }
        if (all) {
          out[i] = r.then;
          break;
        }
      }
    }
    return out;
  }

  std::string name() const override { return "rules"; }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["type"] = "rules";
    j["spec"] = source_;
    return j;
  }

 private:
  std::vector<Rule> rules_;
  int fallback_;
  nlohmann::json source_;
};

RuleOp parse_op(const std::string& s) {
  if (s == "<") return RuleOp::lt;
  if (s == "<=") return RuleOp::le;
  if (s == ">") return RuleOp::gt;
  if (s == ">=") return RuleOp::ge;
  if (s == "==") return RuleOp::eq;
  if (s == "!=") return RuleOp::ne;
  throw ConfigError("rules: unknown op '" + s + "'");
}

}  // namespace

std::unique_ptr<Predictor> train_logistic(const Dataset& ds, const LogisticConfig& cfg) {
  if (!ds.has_labels()) throw ConfigError("logistic: dataset has no labels");
  if (ds.rows.empty()) throw ConfigError("logistic: empty dataset");
  int ones = 0;
  for (int y : ds.labels) ones += y;
  if (ones == 0 || ones == static_cast<int>(ds.labels.size()))
    throw ConfigError("logistic: degenerate labels (single class)");

  Encoding enc = Encoding::build(ds.schema);
  enc.fit_standardization(ds);

  std::vector<std::vector<double>> phi(ds.rows.size());
  for (std::size_t i = 0; i < ds.rows.size(); ++i) enc.encode(ds.rows[i], phi[i]);

  std::size_t dim = enc.columns.size();
  SplitMix64 rng(cfg.seed);
  std::vector<double> w(dim);
  for (auto& wi : w) wi = 0.01 * rng.normal();
  double b = 0;

  double n = static_cast<double>(ds.rows.size());
  std::vector<double> grad(dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      double z = b;
      for (std::size_t c = 0; c < dim; ++c) z += w[c] * phi[i][c];
      double p = 1.0 / (1.0 + std::exp(-z));
      double err = p - static_cast<double>(ds.labels[i]);
      for (std::size_t c = 0; c < dim; ++c) grad[c] += err * phi[i][c];
      gb += err;
    }
    for (std::size_t c = 0; c < dim; ++c) w[c] -= cfg.learning_rate * grad[c] / n;
    b -= cfg.learning_rate * gb / n;
  }
  return std::make_unique<LogisticPredictor>(std::move(enc), std::move(w), b);
}

std::unique_ptr<Predictor> rule_predictor_from_json(const nlohmann::json& j,
                                                    const FeatureSchema& schema) {
  if (!j.is_object() || !j.contains("rules"))
    throw ConfigError("rules: expected an object with a 'rules' array");
  int fallback = j.value("default", 1);
  if (fallback != 0 && fallback != 1) throw ConfigError("rules: default must be 0 or 1");
  std::vector<Rule> rules;
  for (const auto& jr : j["rules"]) {
    Rule r;
    r.then = jr.at("then").get<int>();
    if (r.then != 0 && r.then != 1) throw ConfigError("rules: 'then' must be 0 or 1");
    for (const auto& jc : jr.at("if")) {
      RuleCond c;
      std::string fname = jc.at("feature").get<std::string>();
      c.feature = schema.feature_index(fname);
      if (c.feature < 0) throw ConfigError("rules: unknown feature '" + fname + "'");
      c.op = parse_op(jc.at("op").get<std::string>());
      const FeatureSpec& f = schema.features[static_cast<std::size_t>(c.feature)];
      if (f.kind == FeatureKind::categorical) {
        if (c.op != RuleOp::eq && c.op != RuleOp::ne)
          throw ConfigError("rules: categorical feature '" + fname + "' supports only == and !=");
        std::string cat = jc.at("value").get<std::string>();
        auto it = std::find(f.categories.begin(), f.categories.end(), cat);
        if (it == f.categories.end())
          throw ConfigError("rules: unknown category '" + cat + "' for feature '" + fname + "'");
        c.value = static_cast<double>(it - f.categories.begin());
      } else {
        c.value = jc.at("value").get<double>();
      }
      r.conds.push_back(c);
    }
    rules.push_back(std::move(r));
  }
  return std::make_unique<RulePredictor>(std::move(rules), fallback, j);
}

std::unique_ptr<Predictor> predictor_from_json(const nlohmann::json& j,
                                               const FeatureSchema& schema) {
  std::string type = j.value("type", std::string());
  if (type == "logistic") {
    try {
      Encoding enc;
      for (const auto& jc : j.at("columns")) {
        Encoding::Column col;
        col.feature = jc.at("feature").get<int>();
        col.category = jc.at("category").get<int>();
        col.mean = jc.at("mean").get<double>();
        col.sd = jc.at("sd").get<double>();
        if (col.feature < 0 || col.feature >= static_cast<int>(schema.features.size()))
          throw ConfigError("predictor: encoding column points outside the schema");
        enc.columns.push_back(col);
      }
      auto w = j.at("weights").get<std::vector<double>>();
      if (w.size() != enc.columns.size())
        throw ConfigError("predictor: weight count disagrees with the encoding");
      return std::make_unique<LogisticPredictor>(std::move(enc), std::move(w),
                                                 j.at("bias").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("predictor: malformed logistic document: ") + e.what());
    }
  }
  if (type == "rules") {
    if (!j.contains("spec")) throw ConfigError("predictor: rules document without 'spec'");
    return rule_predictor_from_json(j.at("spec"), schema);
  }
  if (type == "external") {
    if (!j.contains("command")) throw ConfigError("predictor: external document without 'command'");
    return make_external_predictor(j.at("command").get<std::string>(), schema);
  }
  throw ConfigError("predictor: unknown type '" + type + "'");
}

std::unique_ptr<Predictor> load_rule_predictor(const std::string& path,
                                               const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("rules: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("rules: " + path + ": " + e.what());
  }
  return rule_predictor_from_json(j, schema);
}

std::vector<std::uint32_t> compute_affected(const Dataset& ds, const Predictor& f) {
  std::vector<int> pred = f.predict(ds.rows);
  std::vector<std::uint32_t> affected;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == 0) affected.push_back(static_cast<std::uint32_t>(i));
  return affected;
}

}  // namespace recourse
