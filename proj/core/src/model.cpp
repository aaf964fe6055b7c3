#include "sortition/model.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "sortition/error.hpp"

namespace sortition {

int FeatureScheme::feature_index(const std::string& name) const {
  auto it = std::find(features.begin(), features.end(), name);
  return it == features.end() ? -1 : static_cast<int>(it - features.begin());
}

int FeatureScheme::value_index(int feature, const std::string& label) const {
  const auto& vals = values[feature];
  auto it = std::find(vals.begin(), vals.end(), label);
  return it == vals.end() ? -1 : static_cast<int>(it - vals.begin());
}

Instance Instance::create(FeatureScheme scheme, std::vector<Agent> agents, int k,
                          QuotaTable quotas) {
  const int nf = scheme.num_features();
  if (nf == 0) throw Error(ErrorCode::kBadScheme, "no features");
  if (static_cast<int>(scheme.values.size()) != nf) {
    throw Error(ErrorCode::kBadScheme, "value lists do not match feature count");
  }
  std::set<std::string> names;
  for (int f = 0; f < nf; ++f) {
    if (!names.insert(scheme.features[f]).second) {
      throw Error(ErrorCode::kBadScheme, "duplicate feature '" + scheme.features[f] + "'");
    }
    const auto& vals = scheme.values[f];
    if (vals.size() < 2) {
      throw Error(ErrorCode::kBadScheme,
                  "feature '" + scheme.features[f] + "' has fewer than 2 values");
    }
    std::set<std::string> seen(vals.begin(), vals.end());
    if (seen.size() != vals.size()) {
      throw Error(ErrorCode::kBadScheme, "duplicate value label in '" + scheme.features[f] + "'");
    }
  }

  Instance inst;
  for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
    const Agent& a = agents[i];
    if (a.id.empty()) throw Error(ErrorCode::kBlankValue, "empty agent id");
    if (!inst.id_index_.emplace(a.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "agent id '" + a.id + "' appears twice");
    }
    if (static_cast<int>(a.vec.size()) != nf) {
      throw Error(ErrorCode::kInadmissibleValue, "agent '" + a.id + "' has wrong vector length");
    }
    for (int f = 0; f < nf; ++f) {
      if (a.vec[f] < 0 || a.vec[f] >= static_cast<int>(scheme.values[f].size())) {
        throw Error(ErrorCode::kInadmissibleValue,
                    "agent '" + a.id + "' has an inadmissible value for '" + scheme.features[f] + "'");
      }
    }
  }
  const int n = static_cast<int>(agents.size());
  if (n == 0) throw Error(ErrorCode::kDomain, "empty pool");
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kDomain, "panel size k=" + std::to_string(k) + " outside [1, n]");
  }
  if (static_cast<int>(quotas.size()) != nf) {
    throw Error(ErrorCode::kBadQuota, "quota table does not match features");
  }
  for (int f = 0; f < nf; ++f) {
    if (quotas[f].size() != scheme.values[f].size()) {
      throw Error(ErrorCode::kBadQuota, "quota table does not match values of '" +
                                            scheme.features[f] + "'");
    }
    int lo_sum = 0;
    int up_sum = 0;
    for (size_t v = 0; v < quotas[f].size(); ++v) {
      const Quota& q = quotas[f][v];
      const std::string where = scheme.features[f] + "=" + scheme.values[f][v];
      if (q.lower < 0 || q.lower > q.upper) {
        throw Error(ErrorCode::kBadQuota, "min > max or negative for " + where);
      }
      if (q.upper > k) throw Error(ErrorCode::kBadQuota, "max exceeds k for " + where);
      lo_sum += q.lower;
      up_sum += q.upper;
    }
    if (lo_sum > k) {
      throw Error(ErrorCode::kInfeasibleQuotas,
                  "lower quotas of '" + scheme.features[f] + "' sum to " + std::to_string(lo_sum) +
                      " > k=" + std::to_string(k));
    }
    if (up_sum < k) {
      throw Error(ErrorCode::kInfeasibleQuotas,
                  "upper quotas of '" + scheme.features[f] + "' sum to " + std::to_string(up_sum) +
                      " < k=" + std::to_string(k));
    }
  }

  inst.scheme_ = std::move(scheme);
  inst.agents_ = std::move(agents);
  inst.k_ = k;
  inst.quotas_ = std::move(quotas);

  std::map<FeatureVector, std::vector<int>> grouped;
  for (int i = 0; i < n; ++i) grouped[inst.agents_[i].vec].push_back(i);
  inst.group_of_.assign(n, -1);
  for (auto& [vec, members] : grouped) {
    const int g = static_cast<int>(inst.groups_.size());
    for (int i : members) inst.group_of_[i] = g;
    inst.groups_.push_back(vec);
    inst.members_.push_back(std::move(members));
  }
  return inst;
}

int Instance::group_index(const FeatureVector& vec) const {
  auto it = std::lower_bound(groups_.begin(), groups_.end(), vec);
  if (it == groups_.end() || *it != vec) return -1;
  return static_cast<int>(it - groups_.begin());
}

int Instance::agent_index(const std::string& id) const {
  auto it = id_index_.find(id);
  return it == id_index_.end() ? -1 : it->second;
}

std::string Instance::vector_label(const FeatureVector& vec) const {
  std::string out;
  for (size_t f = 0; f < vec.size(); ++f) {
    if (f) out += '|';
    out += scheme_.values[f][vec[f]];
  }
  return out;
}

FeatureVector Instance::parse_vector(const std::vector<std::string>& labels) const {
  if (static_cast<int>(labels.size()) != scheme_.num_features()) {
    throw Error(ErrorCode::kInadmissibleValue, "vector length does not match features");
  }
  FeatureVector vec(labels.size());
  for (size_t f = 0; f < labels.size(); ++f) {
    vec[f] = scheme_.value_index(static_cast<int>(f), labels[f]);
    if (vec[f] < 0) {
      throw Error(ErrorCode::kInadmissibleValue,
                  "'" + labels[f] + "' is not a value of '" + scheme_.features[f] + "'");
    }
  }
  return vec;
}

InstanceStats stats(const Instance& instance) {
  InstanceStats s;
  s.n = instance.n();
  s.n_min = instance.n();
  for (int g = 0; g < instance.num_groups(); ++g) {
    s.counts[instance.group_vector(g)] = instance.group_size(g);
    s.present.push_back(instance.group_vector(g));
    s.n_min = std::min(s.n_min, instance.group_size(g));
  }
  const auto& scheme = instance.scheme();
  for (int f = 0; f < scheme.num_features(); ++f) {
    s.value_counts.emplace_back(scheme.values[f].size(), 0);
  }
  for (const Agent& a : instance.agents()) {
    for (int f = 0; f < scheme.num_features(); ++f) ++s.value_counts[f][a.vec[f]];
  }
  for (const auto& row : s.value_counts) {
    std::vector<double> shares;
    for (int c : row) shares.push_back(static_cast<double>(c) / s.n);
    s.share.push_back(std::move(shares));
  }
  return s;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << content;
}

int parse_int(const std::string& cell, const std::string& what) {
  try {
    size_t used = 0;
    int v = std::stoi(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, what + ": '" + cell + "' is not an integer");
  }
}

void add_value(std::vector<std::string>& values, const std::string& label) {
  if (std::find(values.begin(), values.end(), label) == values.end()) values.push_back(label);
}

}  // namespace

Instance parse_instance(const std::string& agents_text, const std::string& quotas_text, int k) {
  auto agent_rows = csv::parse(agents_text);
  auto quota_rows = csv::parse(quotas_text);
  if (agent_rows.empty()) throw Error(ErrorCode::kParse, "agents file has no header");
  if (quota_rows.empty()) throw Error(ErrorCode::kParse, "quotas file has no header");

  const auto& header = agent_rows[0];
  if (header.empty() || header[0] != "id") {
    throw Error(ErrorCode::kParse, "agents header must start with 'id'");
  }
  FeatureScheme scheme;
  for (size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw Error(ErrorCode::kBlankValue, "blank feature name in header");
    if (scheme.feature_index(header[c]) >= 0) {
      throw Error(ErrorCode::kBadScheme, "duplicate feature '" + header[c] + "'");
    }
    scheme.features.push_back(header[c]);
  }
  scheme.values.resize(scheme.features.size());
  const int nf = scheme.num_features();

  const std::vector<std::string> quota_header = {"feature", "value", "min", "max"};
  if (quota_rows[0] != quota_header) {
    throw Error(ErrorCode::kParse, "quotas header must be feature,value,min,max");
  }
  struct Row {
    int f;
    std::string value;
    Quota q;
  };
  std::vector<Row> parsed_quotas;
  for (size_t r = 1; r < quota_rows.size(); ++r) {
    const auto& row = quota_rows[r];
    if (row.size() != 4) {
      throw Error(ErrorCode::kParse, "quota row " + std::to_string(r + 1) + " needs 4 cells");
    }
    for (const auto& cell : row) {
      if (cell.empty()) {
        throw Error(ErrorCode::kBlankValue, "blank cell in quota row " + std::to_string(r + 1));
      }
    }
    const int f = scheme.feature_index(row[0]);
    if (f < 0) throw Error(ErrorCode::kUnknownFeature, "quota for unknown feature '" + row[0] + "'");
    Row parsed{f, row[1], {parse_int(row[2], "min"), parse_int(row[3], "max")}};
    for (const Row& prev : parsed_quotas) {
      if (prev.f == f && prev.value == row[1]) {
        throw Error(ErrorCode::kBadQuota, "duplicate quota row for " + row[0] + "=" + row[1]);
      }
    }
    add_value(scheme.values[f], row[1]);
    parsed_quotas.push_back(parsed);
  }

  std::vector<std::vector<std::string>> agent_labels;
  std::vector<std::string> ids;
  for (size_t r = 1; r < agent_rows.size(); ++r) {
    const auto& row = agent_rows[r];
    if (static_cast<int>(row.size()) != nf + 1) {
      throw Error(ErrorCode::kParse, "agent row " + std::to_string(r + 1) + " has " +
                                         std::to_string(row.size()) + " cells, expected " +
                                         std::to_string(nf + 1));
    }
    for (const auto& cell : row) {
      if (cell.empty()) {
        throw Error(ErrorCode::kBlankValue, "blank cell in agent row " + std::to_string(r + 1));
      }
    }
    ids.push_back(row[0]);
    agent_labels.emplace_back(row.begin() + 1, row.end());
    for (int f = 0; f < nf; ++f) add_value(scheme.values[f], row[f + 1]);
  }

  QuotaTable quotas(nf);
  for (int f = 0; f < nf; ++f) quotas[f].assign(scheme.values[f].size(), Quota{0, k});
  for (const Row& row : parsed_quotas) {
    quotas[row.f][scheme.value_index(row.f, row.value)] = row.q;
  }
  std::vector<Agent> agents;
  for (size_t i = 0; i < ids.size(); ++i) {
    FeatureVector vec(nf);
    for (int f = 0; f < nf; ++f) vec[f] = scheme.value_index(f, agent_labels[i][f]);
    agents.push_back({ids[i], std::move(vec)});
  }
  return Instance::create(std::move(scheme), std::move(agents), k, std::move(quotas));
}

Instance load_instance(const std::string& agents_path, const std::string& quotas_path, int k) {
  return parse_instance(read_file(agents_path), read_file(quotas_path), k);
}

std::string agents_csv(const Instance& instance) {
  std::string out = "id";
  for (const auto& f : instance.scheme().features) out += "," + f;
  out += "\n";
  for (const Agent& a : instance.agents()) {
    out += a.id;
    for (int f = 0; f < instance.scheme().num_features(); ++f) {
      out += "," + instance.scheme().values[f][a.vec[f]];
    }
    out += "\n";
  }
  return out;
}

std::string quotas_csv(const Instance& instance) {
  std::string out = "feature,value,min,max\n";
  const auto& scheme = instance.scheme();
  for (int f = 0; f < scheme.num_features(); ++f) {
    for (size_t v = 0; v < scheme.values[f].size(); ++v) {
      const Quota& q = instance.quota(f, static_cast<int>(v));
      out += scheme.features[f] + "," + scheme.values[f][v] + "," + std::to_string(q.lower) + "," +
             std::to_string(q.upper) + "\n";
    }
  }
  return out;
}

void save_instance(const Instance& instance, const std::string& agents_path,
                   const std::string& quotas_path) {
  write_file(agents_path, agents_csv(instance));
  write_file(quotas_path, quotas_csv(instance));
}

Instance duplicate_pool(const Instance& instance, int copies) {
  if (copies < 1) throw Error(ErrorCode::kDomain, "copies must be >= 1");
  if (copies == 1) return instance;
  std::vector<Agent> agents;
  agents.reserve(static_cast<size_t>(instance.n()) * copies);
  for (int c = 0; c < copies; ++c) {
    for (const Agent& a : instance.agents()) {
      agents.push_back({a.id + "_" + std::to_string(c), a.vec});
    }
  }
  return Instance::create(instance.scheme(), std::move(agents), instance.k(), instance.quotas());
}

nlohmann::ordered_json to_json(const Instance& instance) {
  nlohmann::ordered_json j;
  const auto& scheme = instance.scheme();
  auto sj = nlohmann::ordered_json::array();
  for (int f = 0; f < scheme.num_features(); ++f) {
    nlohmann::ordered_json fj;
    fj["feature"] = scheme.features[f];
    fj["values"] = scheme.values[f];
    sj.push_back(fj);
  }
  j["scheme"] = sj;
  auto aj = nlohmann::ordered_json::array();
  for (const Agent& a : instance.agents()) {
    nlohmann::ordered_json one;
    one["id"] = a.id;
    std::vector<std::string> labels;
    for (int f = 0; f < scheme.num_features(); ++f) labels.push_back(scheme.values[f][a.vec[f]]);
    one["vector"] = labels;
    aj.push_back(one);
  }
  j["agents"] = aj;
  j["k"] = instance.k();
  auto qj = nlohmann::ordered_json::array();
  for (int f = 0; f < scheme.num_features(); ++f) {
    for (size_t v = 0; v < scheme.values[f].size(); ++v) {
      nlohmann::ordered_json one;
      one["feature"] = scheme.features[f];
      one["value"] = scheme.values[f][v];
      one["min"] = instance.quota(f, static_cast<int>(v)).lower;
      one["max"] = instance.quota(f, static_cast<int>(v)).upper;
      qj.push_back(one);
    }
  }
  j["quotas"] = qj;
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    FeatureScheme scheme;
    for (const auto& fj : j.at("scheme")) {
      scheme.features.push_back(fj.at("feature").get<std::string>());
      scheme.values.push_back(fj.at("values").get<std::vector<std::string>>());
    }
    const int k = j.at("k").get<int>();
    std::vector<Agent> agents;
    for (const auto& aj : j.at("agents")) {
      auto labels = aj.at("vector").get<std::vector<std::string>>();
      if (labels.size() != scheme.features.size()) {
        throw Error(ErrorCode::kInadmissibleValue, "agent vector length mismatch");
      }
      FeatureVector vec(labels.size());
      for (size_t f = 0; f < labels.size(); ++f) {
        vec[f] = scheme.value_index(static_cast<int>(f), labels[f]);
      }
      agents.push_back({aj.at("id").get<std::string>(), std::move(vec)});
    }
    QuotaTable quotas(scheme.num_features());
    for (int f = 0; f < scheme.num_features(); ++f) {
      quotas[f].assign(scheme.values[f].size(), Quota{0, k});
    }
    for (const auto& qj : j.at("quotas")) {
      const int f = scheme.feature_index(qj.at("feature").get<std::string>());
      if (f < 0) throw Error(ErrorCode::kUnknownFeature, "quota for unknown feature");
      const int v = scheme.value_index(f, qj.at("value").get<std::string>());
      if (v < 0) throw Error(ErrorCode::kInadmissibleValue, "quota for unknown value");
      quotas[f][v] = {qj.at("min").get<int>(), qj.at("max").get<int>()};
    }
    return Instance::create(std::move(scheme), std::move(agents), k, std::move(quotas));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("instance json: ") + e.what());
  }
}

std::uint64_t instance_hash(const Instance& instance) {
  const std::string text = to_json(instance).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sortition
