#pragma once

// Seeded property suites over random pencils and the fixed worked examples.
// Every suite derives its own stream from the configured seed, so suites can
// run in any order and the assembled report is reproducible byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ultrapencil/linalg.hpp"
#include "ultrapencil/random.hpp"

namespace ultrapencil {

/// Harness self-test: kappa_sign flips the exponent of every finite κ the
/// suites consume, which must surface as failures.
enum class Mutation { none, kappa_sign };

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 200;  // random pencils per pencil-core suite
  std::vector<std::int64_t> primes{2, 3, 5};
  std::vector<Index> dims{2, 3, 4};
  ScalarShape shape{};
  std::size_t converse_samples = 500;  // random small C per pencil
  std::size_t region_samples = 1000;   // sampled λ per (pencil, ε) audit
  Mutation mutation = Mutation::none;
};

struct SuiteRecord {
  std::string name;
  std::string paper_anchor;
  std::size_t instances = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  nlohmann::json first_counterexample;  // null when nothing failed
  nlohmann::json details;               // optional suite-specific counters

  bool ok() const noexcept { return failures == 0 && instances > 0; }
};

using SuiteRecords = std::vector<SuiteRecord>;

struct SuiteReport {
  std::uint64_t seed = 0;
  SuiteRecords records;  // sorted by name

  std::size_t failures() const noexcept;
  bool passed() const noexcept;
};

SuiteRecords suite_foundations(const SuiteConfig& cfg);
SuiteRecords suite_two_by_two(const SuiteConfig& cfg);
SuiteRecords suite_sequence_kappa(const SuiteConfig& cfg);
SuiteRecords suite_membership(const SuiteConfig& cfg);
SuiteRecords suite_witness(const SuiteConfig& cfg);
SuiteRecords suite_perturbation(const SuiteConfig& cfg);
SuiteRecords suite_transformations(const SuiteConfig& cfg);
SuiteRecords suite_essential(const SuiteConfig& cfg);
SuiteRecords suite_regions(const SuiteConfig& cfg);

SuiteReport run_all_suites(const SuiteConfig& cfg);

nlohmann::json to_json(const SuiteRecord& r);
nlohmann::json to_json(const SuiteReport& r);

}  // namespace ultrapencil
