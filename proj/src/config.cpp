#include "latgauss/config.hpp"
#include "latgauss/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace latgauss {

namespace {

const char* const kKindNames[] = {"decode-success", "estimator-error", "contraction", "reduction-audit",
                                  "sparsify-audit", "local-maxima",    "smoothing-profile"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i)
    if (name == kKindNames[i]) return static_cast<ExperimentKind>(i);
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(ExperimentKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t lineno = 0;
  bool have_kind = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (c.values_.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    c.values_[key] = value;
    if (key == "experiment") {
      c.kind_ = parse_experiment_kind(value);
      have_kind = true;
    }
  }
  if (!have_kind) throw ConfigError("config has no experiment key");
  return c;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse(in);
}

ExperimentConfig ExperimentConfig::make(ExperimentKind kind, const std::map<std::string, std::string>& values) {
  ExperimentConfig c;
  c.kind_ = kind;
  c.values_ = values;
  c.values_["experiment"] = to_string(kind);
  return c;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment") kind_ = parse_experiment_kind(value);
  values_[key] = value;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

Real ExperimentConfig::real(const std::string& key, Real fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  // "p/q" is accepted so exact fractions can be written
  const auto slash = v.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      std::size_t u2 = 0;
      const Real num = std::stold(v.substr(0, slash), &used);
      const Real den = std::stold(v.substr(slash + 1), &u2);
      if (used == slash && u2 == v.size() - slash - 1) return num / den;
    } else {
      const Real x = std::stold(v, &used);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': not a number: '" + v + "'");
}

std::uint64_t ExperimentConfig::count(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const auto x = std::stoull(v, &used);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': not a non-negative integer: '" + v + "'");
}

std::vector<std::uint64_t> ExperimentConfig::counts(const std::string& key,
                                                    const std::vector<std::uint64_t>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::uint64_t> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ExperimentConfig one;
    one.values_[key] = trim(item);
    out.push_back(one.count(key, 0));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

LatticeGeneratorSpec ExperimentConfig::lattice(GeneratorKind kind, std::size_t n) const {
  LatticeGeneratorSpec s;
  try {
    s.kind = has("lattice") ? parse_generator_kind(text("lattice", "")) : kind;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  s.n = count("n", n);
  s.bound = static_cast<long long>(count("bound", 10));
  if (s.n < 1) throw ConfigError("key 'n' must be at least 1");
  return s;
}

void ExperimentConfig::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (k == "experiment" || k == "seed" || k == "threads" || k.rfind("tol.", 0) == 0) continue;
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("key '" + k + "' is not used by experiment " + to_string(kind_));
  }
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  // the thread count never changes results, so it stays out of the hash
  for (const auto& [k, v] : values_)
    if (k != "threads") out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& purpose) {
  return Rng(master, fnv1a64(purpose))();
}

}  // namespace latgauss
