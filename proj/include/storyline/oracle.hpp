#pragma once

#include <cstddef>
#include <stdexcept>

#include "storyline/execution.hpp"
#include "storyline/model.hpp"

namespace storyline {

enum class WiggleObjective { WC, LWH, QWH };

class StateCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  /// Bound on states plus transitions examined.
  std::size_t stateCap = 100'000'000;
  Execution execution = Execution::Parallel;
  /// Run the recursion from the last step backwards.
  bool reverse = false;
};

struct OracleResult {
  double optimum = 0.0;
  Coordination witness;
  std::size_t states = 0;
  std::size_t transitions = 0;
};

/// Exact optimum over all integral nice coordinations with y in [0, Y-1], by
/// dynamic programming over time steps whose states are the nice integral
/// stackings of one step. Requires integer delta and deltaBar.
OracleResult bruteForceOracle(const OrderedStorylineInstance& inst, const NicenessParams& params,
                              WiggleObjective objective, const OracleConfig& config = {});

/// Number of integral nice stackings of step t with every y in [0, limit).
std::size_t countStackings(const OrderedStorylineInstance& inst, const NicenessParams& params, Step t,
                           long long limit);

}  // namespace storyline
