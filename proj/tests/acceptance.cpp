// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ultrapencil/suite.hpp"

namespace fs = std::filesystem;
using namespace ultrapencil;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;
};

Outcome from_records(const SuiteRecords& records) {
  Outcome o;
  std::size_t instances = 0;
  std::ostringstream failing;
  for (const auto& r : records) {
    instances += r.instances;
    if (!r.ok()) {
      o.ok = false;
      failing << " " << r.name << "(" << r.failures << "/" << r.instances << ")";
      if (!r.first_counterexample.is_null()) failing << " first=" << r.first_counterexample.dump();
    }
  }
  o.note = std::to_string(records.size()) + " checks, " + std::to_string(instances) + " instances";
  if (!o.ok) o.note += "; failing:" + failing.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("ultrapencil-accept-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string runs[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("report" + std::to_string(i) + ".json");
    const std::string cmd = std::string("\"") + ULTRAPENCIL_CLI + "\" check-theorems --seed 20240101 > \"" +
                            out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return {false, "check-theorems exited with status " + std::to_string(WEXITSTATUS(status))};
    }
    runs[i] = slurp(out);
  }
  fs::remove_all(dir);
  if (runs[0].empty()) return {false, "empty report"};
  if (runs[0] != runs[1]) return {false, "reports differ"};
  return {true, "two seeded runs, " + std::to_string(runs[0].size()) + " identical bytes"};
}

}  // namespace

int main() {
  const SuiteConfig cfg;
  struct Criterion {
    int id;
    const char* title;
    Outcome (*run)(const SuiteConfig&);
  };
  const Criterion criteria[] = {
      {1, "2x2 diagonal example", [](const SuiteConfig& c) { return from_records(suite_two_by_two(c)); }},
      {2, "sequence-space sup/inf formula", [](const SuiteConfig& c) { return from_records(suite_sequence_kappa(c)); }},
      {3, "nesting and spectrum as intersection", [](const SuiteConfig& c) { return from_records(suite_membership(c)); }},
      {4, "witness vectors", [](const SuiteConfig& c) { return from_records(suite_witness(c)); }},
      {5, "rank-one destabilizer and converse sampling",
       [](const SuiteConfig& c) { return from_records(suite_perturbation(c)); }},
      {6, "transformation laws", [](const SuiteConfig& c) { return from_records(suite_transformations(c)); }},
      {7, "essential spectrum and regularizer", [](const SuiteConfig& c) { return from_records(suite_essential(c)); }},
      {8, "exact regions against the membership predicate",
       [](const SuiteConfig& c) { return from_records(suite_regions(c)); }},
      {9, "seeded determinism", [](const SuiteConfig&) { return determinism(); }},
  };

  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(cfg);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    all = all && o.ok;
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << o.note << ", "
              << ms << " ms)\n";
  }
  return all ? 0 : 1;
}
