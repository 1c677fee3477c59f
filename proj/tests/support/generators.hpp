#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "maua/model.hpp"

namespace maua::testing {

struct ProblemShape {
  int max_attributes = 4;
  int max_options = 4;
  int min_attributes = 1;
  int min_options = 1;
  bool derived = true;
  bool scenarios = true;
  bool multiplicative = true;
  // Names with spaces, dots, quotes and non-ASCII text.
  bool awkward_names = false;
};

// Seeded generator of valid decision problems and raw numeric inputs.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  // Non-negative scores with at least one positive entry.
  std::vector<double> importances(std::size_t n);
  std::vector<double> locations(std::size_t n);
  // Probabilities in [0, 1] summing to 1 within rounding.
  std::vector<double> probabilities(std::size_t n);
  CurveSpec curve();

  DecisionProblem problem(const ProblemShape& shape);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::string name(const char* prefix, int index, bool awkward);

  std::mt19937_64 rng_;
};

}  // namespace maua::testing
