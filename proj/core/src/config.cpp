#include "gradvar/config.hpp"

#include <fstream>
#include <sstream>

namespace gradvar {

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("KeyValueConfig: cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return from_string(buf.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    std::string value, tok;
    while (ss >> tok) {
      if (!value.empty()) value += ' ';
      value += tok;
    }
    if (value.empty())
      throw std::runtime_error("KeyValueConfig: line " + std::to_string(lineno) +
                               ": key '" + key + "' has no value");
    cfg.values_[key] = value;
  }
  return cfg;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto v = get(key);
  return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::runtime_error("KeyValueConfig: key '" + key + "' has non-numeric value '" + *v +
                             "'");
  }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const long long n = std::stoll(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return n;
  } catch (...) {
    throw std::runtime_error("KeyValueConfig: key '" + key + "' has non-integer value '" + *v +
                             "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw std::runtime_error("KeyValueConfig: key '" + key + "' has non-boolean value '" + *v + "'");
}

std::optional<TwoStateRewards> two_state_rewards_from(const KeyValueConfig& cfg) {
  const char* keys[4] = {"reward_ll", "reward_lr", "reward_rl", "reward_rr"};
  for (const char* k : keys)
    if (!cfg.has(k)) return std::nullopt;
  return TwoStateRewards{cfg.get_double("reward_ll", 0.0), cfg.get_double("reward_lr", 0.0),
                         cfg.get_double("reward_rl", 0.0), cfg.get_double("reward_rr", 0.0)};
}

}  // namespace gradvar
