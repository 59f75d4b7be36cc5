#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "labandit/bandit.hpp"
#include "labandit/config.hpp"
#include "labandit/utility.hpp"

namespace labandit {

struct DpOptions {
  /// Keep every stage's layer (needed for dumps and argmax lookups). Without
  /// it only the current and next layers are resident.
  bool keep_table = false;
  /// Maximum number of resident states.
  std::size_t state_cap = 100'000'000;
};

/// Lattice state reached after some number of observations.
struct LatticeState {
  std::int64_t sum = 0;
  std::int64_t d_nonzero = 0;
  std::int64_t d_zero = 0;
};

/// Terminal payoff as a function of the final lattice state.
using TerminalFn = std::function<double(const LatticeState&)>;

/// Values and optimal arms for one layer: the states reachable after
/// `observations` outcomes. No-learning layers are indexed by sum; two-armed
/// layers by (sum, d_nonzero, d_zero).
struct DpLayer {
  std::size_t observations = 0;
  std::vector<double> value;
  /// Optimal arm per state; empty on the terminal layer.
  std::vector<std::uint8_t> argmax;
};

/// Stage-indexed value arrays from backward induction.
class DpTable {
 public:
  DpTable(const Environment& env, std::size_t horizon);

  std::size_t horizon() const { return horizon_; }
  bool has_layer(std::size_t observations) const;
  const DpLayer& layer(std::size_t observations) const;

  /// Number of lattice positions in the layer after `observations` outcomes.
  std::size_t layer_size(std::size_t observations) const;
  /// Position of a state in its layer, or nullopt if unreachable.
  std::optional<std::size_t> index_of(std::size_t observations, const LatticeState& s) const;

  double value_at(std::size_t observations, const LatticeState& s) const;
  ArmId argmax_at(std::size_t observations, const LatticeState& s) const;

  /// Calls fn(state, position) for every reachable state of a layer.
  void for_each_state(std::size_t observations,
                      const std::function<void(const LatticeState&, std::size_t)>& fn) const;

  /// CSV with header stage,sum,d_nonzero,d_zero,value,argmax; sums in payoff
  /// units; stage = observations + 1.
  void write_csv(std::ostream& out) const;

 private:
  friend class DpSolver;

  Environment env_;
  std::size_t horizon_;
  std::vector<DpLayer> layers_;  // indexed by observations; may be sparse
  std::vector<bool> present_;
};

struct DpResult {
  double value = 0.0;
  DpTable table;
};

/// sup over strategies of E[g(final state)] for an n-stage problem.
DpResult value_with_terminal(const Environment& env, std::size_t n, const TerminalFn& terminal,
                             const DpOptions& options = {}, const Tolerances& tol = kTolerances);

/// V_n = sup_s E_{P^s}[phi(S_n / sqrt(n))] by backward induction. Ties go
/// to the lower-variance arm, then the lower arm index.
DpResult value_n(const Environment& env, const UtilityIndex& u, std::size_t n,
                 const DpOptions& options = {}, const Tolerances& tol = kTolerances);

/// E_{P^s}[phi(S_n / sqrt(n))] for a fixed strategy by forward propagation
/// of path mass over the same lattice.
double strategy_value_n(const Environment& env, const Strategy& s, const UtilityIndex& u,
                        std::size_t n, const DpOptions& options = {},
                        const Tolerances& tol = kTolerances);

/// Forward propagation with an arbitrary terminal payoff.
double strategy_value_with_terminal(const Environment& env, const Strategy& s, std::size_t n,
                                    const TerminalFn& terminal, const DpOptions& options = {},
                                    const Tolerances& tol = kTolerances);

struct IndicatorResult {
  double value = 0.0;
  /// c * sqrt(n) coincides with a lattice point, so an atom sits on the
  /// boundary of {S_n / sqrt(n) >= c}.
  bool boundary_is_lattice_point = false;
};

/// sup_s P^s(S_n / sqrt(n) >= c), comparisons done exactly on the lattice.
IndicatorResult upper_indicator_prob_n(const Environment& env, double c, std::size_t n,
                                       const DpOptions& options = {},
                                       const Tolerances& tol = kTolerances);

struct ParityAverage {
  double at_n = 0.0;
  double at_n_plus_1 = 0.0;
  double average = 0.0;
};

/// Averages upper_indicator_prob_n over n and n + 1 to cancel the lattice
/// parity oscillation.
ParityAverage upper_indicator_prob_parity(const Environment& env, double c, std::size_t n,
                                          const DpOptions& options = {},
                                          const Tolerances& tol = kTolerances);

/// Compares max over arms of E[h(S) X^2 | state] with
/// sigma_high^2 h(S)^+ - sigma_low^2 h(S)^-; S in payoff units.
std::pair<double, double> rect_identity_check(const std::function<double(double)>& h,
                                              const History& state, const NoLearningEnv& env);

/// Resident state count value_n would need, for capacity planning.
std::size_t dp_resident_states(const Environment& env, std::size_t n, bool keep_table);

}  // namespace labandit
