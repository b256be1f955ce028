#pragma once

#include "latgauss/generators.hpp"

#include <iosfwd>
#include <map>

namespace latgauss {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  DecodeSuccess,
  EstimatorError,
  Contraction,
  ReductionAudit,
  SparsifyAudit,
  LocalMaxima,
  SmoothingProfile
};
ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind k);

// One experiment per file, plain "key = value" lines, '#' starts a comment.
// Keys "tol.<name>" hold tolerances. Every key other than experiment has a
// per-experiment default, so the hash covers exactly what was written.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig make(ExperimentKind kind, const std::map<std::string, std::string>& values = {});

  ExperimentKind experiment() const { return kind_; }
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  Real real(const std::string& key, Real fallback) const;
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const;
  std::vector<std::uint64_t> counts(const std::string& key, const std::vector<std::uint64_t>& fallback) const;
  Real tolerance(const std::string& name, Real fallback) const { return real("tol." + name, fallback); }
  std::uint64_t seed() const { return count("seed", 1); }
  // Keys lattice / n / bound.
  LatticeGeneratorSpec lattice(GeneratorKind kind, std::size_t n) const;

  // Rejects keys outside `allowed` (plus experiment, seed, threads and tol.*).
  void require_known(const std::vector<std::string>& allowed) const;

  // Sorted "key=value\n" lines without threads; hash() is FNV-1a 64 over it.
  std::string canonical() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;

 private:
  ExperimentKind kind_ = ExperimentKind::DecodeSuccess;
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& bytes);

// Independent stream seed for a named purpose under one master seed.
std::uint64_t derive_seed(std::uint64_t master, const std::string& purpose);

}  // namespace latgauss
