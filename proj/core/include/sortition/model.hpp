#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace sortition {

// Feature names and the admissible value labels of each feature, in order.
struct FeatureScheme {
  std::vector<std::string> features;
  std::vector<std::vector<std::string>> values;

  int num_features() const { return static_cast<int>(features.size()); }
  // -1 when absent.
  int feature_index(const std::string& name) const;
  int value_index(int feature, const std::string& label) const;

  bool operator==(const FeatureScheme&) const = default;
};

// One value index per feature, in scheme order. Equality is positional.
using FeatureVector = std::vector<int>;

struct Agent {
  std::string id;
  FeatureVector vec;

  bool operator==(const Agent&) const = default;
};

struct Quota {
  int lower = 0;
  int upper = 0;

  bool operator==(const Quota&) const = default;
};

// quotas[f][v] for every value of every feature.
using QuotaTable = std::vector<std::vector<Quota>>;

// A validated selection instance. Immutable after construction. Agents with
// equal vectors form a group; groups are sorted lexicographically by vector.
class Instance {
 public:
  // Validates and builds. Throws Error on any invariant violation.
  static Instance create(FeatureScheme scheme, std::vector<Agent> agents, int k, QuotaTable quotas);

  const FeatureScheme& scheme() const { return scheme_; }
  const std::vector<Agent>& agents() const { return agents_; }
  const Agent& agent(int i) const { return agents_[i]; }
  int n() const { return static_cast<int>(agents_.size()); }
  int k() const { return k_; }
  const QuotaTable& quotas() const { return quotas_; }
  const Quota& quota(int f, int v) const { return quotas_[f][v]; }

  int num_groups() const { return static_cast<int>(groups_.size()); }
  const FeatureVector& group_vector(int g) const { return groups_[g]; }
  const std::vector<int>& group_members(int g) const { return members_[g]; }
  int group_size(int g) const { return static_cast<int>(members_[g].size()); }
  int group_of(int agent) const { return group_of_[agent]; }
  // -1 when the vector is not present in the pool.
  int group_index(const FeatureVector& vec) const;
  // -1 when absent.
  int agent_index(const std::string& id) const;

  // Renders a vector as its labels joined by '|'.
  std::string vector_label(const FeatureVector& vec) const;
  FeatureVector parse_vector(const std::vector<std::string>& labels) const;

  bool operator==(const Instance& other) const {
    return scheme_ == other.scheme_ && agents_ == other.agents_ && k_ == other.k_ &&
           quotas_ == other.quotas_;
  }

 private:
  FeatureScheme scheme_;
  std::vector<Agent> agents_;
  int k_ = 0;
  QuotaTable quotas_;
  std::vector<FeatureVector> groups_;
  std::vector<std::vector<int>> members_;
  std::vector<int> group_of_;
  std::map<std::string, int> id_index_;
};

struct InstanceStats {
  int n = 0;
  std::map<FeatureVector, int> counts;
  std::vector<FeatureVector> present;
  int n_min = 0;
  // value_counts[f][v] = |{i : f(i) = v}|; share = value_counts / n.
  std::vector<std::vector<int>> value_counts;
  std::vector<std::vector<double>> share;
};

InstanceStats stats(const Instance& instance);

// Agents CSV `id,<feature...>`; quotas CSV `feature,value,min,max`.
Instance load_instance(const std::string& agents_path, const std::string& quotas_path, int k);
Instance parse_instance(const std::string& agents_csv, const std::string& quotas_csv, int k);
void save_instance(const Instance& instance, const std::string& agents_path,
                   const std::string& quotas_path);
std::string agents_csv(const Instance& instance);
std::string quotas_csv(const Instance& instance);

// Every agent appears `copies` times, ids suffixed "_<copy>", copy-major.
// copies == 1 returns the instance unchanged.
Instance duplicate_pool(const Instance& instance, int copies);

// {scheme, agents, k, quotas} with stable key order.
nlohmann::ordered_json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);
// FNV-1a 64 over the canonical JSON dump.
std::uint64_t instance_hash(const Instance& instance);
std::string hash_hex(std::uint64_t h);

}  // namespace sortition
