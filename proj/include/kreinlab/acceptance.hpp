#pragma once

// Acceptance suite: one check per numbered criterion, seeded and reproducible.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "kreinlab/krein.hpp"
#include "kreinlab/profiles.hpp"
#include "kreinlab/quad.hpp"
#include "kreinlab/wightman.hpp"

namespace kreinlab {

struct SuiteConfig {
  std::uint64_t seed = 7;
  QuadratureConfig quad{1e-13, 1e-12, 4000, 0.1, 1.0};
  ChiStarFamily family = ChiStarFamily::gaussian;
  std::optional<std::array<double, 2>> bracket;
  // Serialized context to use for the Krein criteria instead of the one
  // constructed in criterion 1.
  std::optional<nlohmann::json> context;

  int equivalence_pairs = 100;
  int gram_vectors = 8;
  int decomposition_vectors = 100;
  int eta_vectors = 100;
  int timelike_points = 8;
  int spacelike_points = 8;
  int equal_time_points = 4;
  int cross_check_pairs = 3;
};

// Reads the optional keys of a verify config file over `base`:
// seed, family, bracket, quadrature{...}, equivalence_pairs, gram_vectors,
// decomposition_vectors, eta_vectors, cross_check_pairs.
SuiteConfig suite_config_from_json(const nlohmann::json& j, SuiteConfig base = {});

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double runtime_s = 0.0;        // wall clock, never serialized
  double runtime_limit_s = 0.0;  // 0 means unbounded
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;

  bool passed() const;
  // Deterministic for a fixed config: wall-clock times are left out.
  nlohmann::json to_json() const;
};

// Criteria 1 through 10.
SuiteReport run_suite(const SuiteConfig& config);

// Criterion 11 from two serialized runs of the same configuration.
CriterionResult determinism_criterion(const std::string& first, const std::string& second);

// "PASS  3  equivalence ...  measured 1.2e-15 (limit 1e-09)  [0.84 s]"
std::string format_line(const CriterionResult& r);

// ---- seeded samplers (shared with the unit tests) ------------------------------

using Rng = std::mt19937_64;
Rng criterion_rng(std::uint64_t seed, int stream);

// Gaussian-type combination of one to three terms with complex amplitudes.
MomentumProfile random_profile(Rng& rng);
// embed(random_profile) plus, half of the time, a random multiple of v0.
KreinVector random_vector(Rng& rng, const KreinContext& ctx);
// a v0 + b chi* with random complex a, b.
KreinVector random_structural_vector(Rng& rng, const KreinContext& ctx);
// Two-term spacetime Gaussian combination with vanishing integral.
SpacetimeCombination random_zero_mean_combination(Rng& rng);

}  // namespace kreinlab
