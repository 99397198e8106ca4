#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gradvar/common.hpp"

namespace gradvar {

/// Plain-text `key value` configuration, one pair per line, '#' comments.
/// Later assignments win, so CLI overrides can be layered on top of a file.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// The two-state environment's reward slot ("Russo MDP rewards"). Present in
/// a config as reward_ll / reward_lr / reward_rl / reward_rr; absent keys
/// leave the environment unconfigured.
struct TwoStateRewards {
  double ll, lr, rl, rr;
};

std::optional<TwoStateRewards> two_state_rewards_from(const KeyValueConfig& cfg);

}  // namespace gradvar
