#include "labandit/exact_dp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "labandit/errors.hpp"
#include "labandit/lattice.hpp"

namespace labandit {

namespace {

// Sums -reach*m .. reach*m after m observations.
struct LineLayout {
  std::int64_t half_width;

  LineLayout(std::size_t m, std::int64_t reach) : half_width(reach * static_cast<std::int64_t>(m)) {}

  std::size_t size() const { return static_cast<std::size_t>(2 * half_width + 1); }
  std::size_t index(std::int64_t sum) const { return static_cast<std::size_t>(sum + half_width); }
  std::int64_t sum_at(std::size_t idx) const { return static_cast<std::int64_t>(idx) - half_width; }
  bool contains(std::int64_t sum) const { return sum >= -half_width && sum <= half_width; }
};

// Two-armed states after m observations. With u = (sum + d_nonzero) / 2 and
// v = (sum - d_nonzero) / 2, the reachable set is the octahedron
// |u| + |v| + |d_zero| <= m with d_zero = m - |u| - |v| (mod 2).
struct OctaLayout {
  std::int64_t m;
  std::int64_t width;
  std::vector<std::size_t> offset;  // (u, v) -> first index of its d_zero column
  std::size_t total = 0;

  explicit OctaLayout(std::size_t observations)
      : m(static_cast<std::int64_t>(observations)), width(2 * m + 1) {
    offset.assign(static_cast<std::size_t>(width * width), 0);
    for (std::int64_t u = -m; u <= m; ++u) {
      const std::int64_t rem = m - std::abs(u);
      for (std::int64_t v = -rem; v <= rem; ++v) {
        offset[slot(u, v)] = total;
        total += static_cast<std::size_t>(rem - std::abs(v) + 1);
      }
    }
  }

  std::size_t slot(std::int64_t u, std::int64_t v) const {
    return static_cast<std::size_t>((u + m) * width + (v + m));
  }
  // Caller guarantees (u, v, z) is in the layer.
  std::size_t index_uvz(std::int64_t u, std::int64_t v, std::int64_t z) const {
    const std::int64_t r = m - std::abs(u) - std::abs(v);
    return offset[slot(u, v)] + static_cast<std::size_t>((z + r) / 2);
  }
  std::optional<std::size_t> index(const LatticeState& s) const {
    if (((s.sum - s.d_nonzero) % 2) != 0) return std::nullopt;
    const std::int64_t u = (s.sum + s.d_nonzero) / 2;
    const std::int64_t v = (s.sum - s.d_nonzero) / 2;
    const std::int64_t r = m - std::abs(u) - std::abs(v);
    if (r < 0 || std::abs(s.d_zero) > r || ((s.d_zero + r) % 2) != 0) return std::nullopt;
    return index_uvz(u, v, s.d_zero);
  }
  std::size_t size() const { return total; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::size_t idx = 0;
    for (std::int64_t u = -m; u <= m; ++u) {
      const std::int64_t rem = m - std::abs(u);
      for (std::int64_t v = -rem; v <= rem; ++v) {
        const std::int64_t r = rem - std::abs(v);
        for (std::int64_t z = -r; z <= r; z += 2) fn(u, v, z, idx++);
      }
    }
  }
};

std::size_t octa_size(std::size_t m) {
  // sum over |u| + |v| <= m of (m - |u| - |v| + 1)
  std::size_t total = 0;
  const auto mm = static_cast<std::int64_t>(m);
  for (std::int64_t k = 0; k <= mm; ++k) {
    const std::size_t ring = k == 0 ? 1 : static_cast<std::size_t>(4 * k);
    total += ring * static_cast<std::size_t>(mm - k + 1);
  }
  return total;
}

std::size_t layer_size_for(const Environment& env, std::size_t m) {
  if (const auto* e = std::get_if<NoLearningEnv>(&env)) return LineLayout(m, e->max_abs_step()).size();
  return octa_size(m);
}

void check_capacity(const Environment& env, std::size_t n, bool keep_table, std::size_t cap) {
  const std::size_t resident = dp_resident_states(env, n, keep_table);
  if (resident > cap) {
    std::ostringstream msg;
    msg << "dynamic program needs " << resident << " resident states, above the cap of " << cap;
    throw CapacityError(msg.str());
  }
}

void check_horizon(std::size_t n) {
  if (n == 0) throw ValidationError("horizon n must be at least 1");
}

// Arms sorted by variance, then index: the tie-break order.
std::vector<ArmId> arms_by_variance(const NoLearningEnv& e) {
  std::vector<ArmId> order(e.arm_count());
  std::iota(order.begin(), order.end(), ArmId{0});
  std::stable_sort(order.begin(), order.end(), [&](ArmId a, ArmId b) {
    return e.arms()[a].second_moment() < e.arms()[b].second_moment();
  });
  return order;
}

std::vector<double> mu_table(const TwoArmedEnv& e, std::int64_t m) {
  const std::int64_t w = 2 * m + 1;
  std::vector<double> mu(static_cast<std::size_t>(w * w));
  for (std::int64_t y = -m; y <= m; ++y) {
    for (std::int64_t z = -m; z <= m; ++z) {
      mu[static_cast<std::size_t>((y + m) * w + (z + m))] = BeliefState{e.log_odds(y, z)}.mu();
    }
  }
  return mu;
}

}  // namespace

// Backward and forward sweeps. A friend of DpTable so it can fill layers.
class DpSolver {
 public:
  static DpResult backward(const Environment& env, std::size_t n, const TerminalFn& g,
                           const DpOptions& options) {
    check_horizon(n);
    check_capacity(env, n, options.keep_table, options.state_cap);
    DpResult result{0.0, DpTable(env, n)};
    if (const auto* e = std::get_if<NoLearningEnv>(&env)) {
      result.value = backward_line(*e, n, g, options.keep_table, result.table);
    } else {
      result.value = backward_octa(std::get<TwoArmedEnv>(env), n, g, options.keep_table, result.table);
    }
    return result;
  }

  static double forward(const Environment& env, const Policy& policy, std::size_t n,
                        const TerminalFn& g, const DpOptions& options) {
    check_horizon(n);
    check_capacity(env, n, false, options.state_cap);
    if (const auto* e = std::get_if<NoLearningEnv>(&env)) return forward_line(env, *e, policy, n, g);
    return forward_octa(env, std::get<TwoArmedEnv>(env), policy, n, g);
  }

 private:
  static void store(DpTable& table, std::size_t m, std::vector<double> value,
                    std::vector<std::uint8_t> argmax) {
    table.layers_[m] = DpLayer{m, std::move(value), std::move(argmax)};
    table.present_[m] = true;
  }

  static double backward_line(const NoLearningEnv& e, std::size_t n, const TerminalFn& g,
                              bool keep, DpTable& table) {
    const std::int64_t reach = e.max_abs_step();
    const auto order = arms_by_variance(e);

    LineLayout top(n, reach);
    std::vector<double> next(top.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = g({top.sum_at(i), 0, 0});
    if (keep) store(table, n, next, {});

    for (std::size_t m = n; m-- > 0;) {
      const LineLayout cur_layout(m, reach);
      const LineLayout next_layout(m + 1, reach);
      std::vector<double> cur(cur_layout.size());
      std::vector<std::uint8_t> arg(cur_layout.size());
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const std::int64_t s = cur_layout.sum_at(i);
        double best = -std::numeric_limits<double>::infinity();
        ArmId best_arm = order.front();
        for (ArmId a : order) {
          const auto& steps = e.steps(a);
          const auto& probs = e.arms()[a].probs;
          double v = 0.0;
          for (std::size_t j = 0; j < steps.size(); ++j) {
            v += probs[j] * next[next_layout.index(s + steps[j])];
          }
          if (v > best) {
            best = v;
            best_arm = a;
          }
        }
        cur[i] = best;
        arg[i] = static_cast<std::uint8_t>(best_arm);
      }
      if (keep || m == 0) store(table, m, cur, std::move(arg));
      next = std::move(cur);
    }
    return next[LineLayout(0, reach).index(0)];
  }

  static double backward_octa(const TwoArmedEnv& e, std::size_t n, const TerminalFn& g, bool keep,
                              DpTable& table) {
    OctaLayout next_layout(n);
    std::vector<double> next(next_layout.size());
    next_layout.for_each([&](std::int64_t u, std::int64_t v, std::int64_t z, std::size_t idx) {
      next[idx] = g({u + v, u - v, z});
    });
    if (keep) store(table, n, next, {});

    for (std::size_t m = n; m-- > 0;) {
      const OctaLayout cur_layout(m);
      const auto mm = static_cast<std::int64_t>(m);
      const auto mu = mu_table(e, mm);
      std::vector<double> cur(cur_layout.size());
      std::vector<std::uint8_t> arg(cur_layout.size());
      cur_layout.for_each([&](std::int64_t u, std::int64_t v, std::int64_t z, std::size_t idx) {
        const double belief = mu[static_cast<std::size_t>(((u - v) + mm) * (2 * mm + 1) + (z + mm))];
        const auto [half_a, zero_a] = two_armed_probs(e, belief, TwoArmedEnv::kArmA);
        const auto [half_b, zero_b] = two_armed_probs(e, belief, TwoArmedEnv::kArmB);
        // arm a: +1 -> u+1, -1 -> v-1, 0 -> z+1; arm b: +1 -> v+1, -1 -> u-1, 0 -> z-1
        const double value_a = half_a * (next[next_layout.index_uvz(u + 1, v, z)] +
                                         next[next_layout.index_uvz(u, v - 1, z)]) +
                               zero_a * next[next_layout.index_uvz(u, v, z + 1)];
        const double value_b = half_b * (next[next_layout.index_uvz(u, v + 1, z)] +
                                         next[next_layout.index_uvz(u - 1, v, z)]) +
                               zero_b * next[next_layout.index_uvz(u, v, z - 1)];
        // Lower variance first: arm a has the smaller P(+-1) iff half_a <= half_b.
        const bool a_first = half_a <= half_b;
        const double first = a_first ? value_a : value_b;
        const double second = a_first ? value_b : value_a;
        const bool take_second = second > first;
        cur[idx] = take_second ? second : first;
        const bool chose_a = a_first != take_second;
        arg[idx] = static_cast<std::uint8_t>(chose_a ? TwoArmedEnv::kArmA : TwoArmedEnv::kArmB);
      });
      if (keep || m == 0) store(table, m, cur, std::move(arg));
      next = std::move(cur);
      next_layout = cur_layout;
    }
    return next[0];
  }

  static double forward_line(const Environment& env, const NoLearningEnv& e, const Policy& policy,
                             std::size_t n, const TerminalFn& g) {
    const std::int64_t reach = e.max_abs_step();
    std::vector<double> mass{1.0};
    for (std::size_t m = 0; m < n; ++m) {
      const LineLayout cur_layout(m, reach);
      const LineLayout next_layout(m + 1, reach);
      std::vector<double> next(next_layout.size(), 0.0);
      for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] == 0.0) continue;
        const History h{m + 1, cur_layout.sum_at(i), 0, 0};
        const ArmId a = policy(h);
        const auto& steps = e.steps(a);
        const auto& probs = e.arms()[a].probs;
        for (std::size_t j = 0; j < steps.size(); ++j) {
          next[next_layout.index(h.sum + steps[j])] += mass[i] * probs[j];
        }
      }
      mass = std::move(next);
    }
    (void)env;
    const LineLayout top(n, reach);
    double total = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] != 0.0) total += mass[i] * g({top.sum_at(i), 0, 0});
    }
    return total;
  }

  static double forward_octa(const Environment& env, const TwoArmedEnv& e, const Policy& policy,
                             std::size_t n, const TerminalFn& g) {
    (void)env;
    std::vector<double> mass{1.0};
    for (std::size_t m = 0; m < n; ++m) {
      const OctaLayout cur_layout(m);
      const OctaLayout next_layout(m + 1);
      const auto mm = static_cast<std::int64_t>(m);
      const auto mu = mu_table(e, mm);
      std::vector<double> next(next_layout.size(), 0.0);
      cur_layout.for_each([&](std::int64_t u, std::int64_t v, std::int64_t z, std::size_t idx) {
        const double w = mass[idx];
        if (w == 0.0) return;
        const History h{m + 1, u + v, u - v, z};
        const ArmId a = policy(h);
        const double belief = mu[static_cast<std::size_t>(((u - v) + mm) * (2 * mm + 1) + (z + mm))];
        const auto [half, zero] = two_armed_probs(e, belief, a);
        if (a == TwoArmedEnv::kArmA) {
          next[next_layout.index_uvz(u + 1, v, z)] += w * half;
          next[next_layout.index_uvz(u, v - 1, z)] += w * half;
          next[next_layout.index_uvz(u, v, z + 1)] += w * zero;
        } else {
          next[next_layout.index_uvz(u, v + 1, z)] += w * half;
          next[next_layout.index_uvz(u - 1, v, z)] += w * half;
          next[next_layout.index_uvz(u, v, z - 1)] += w * zero;
        }
      });
      mass = std::move(next);
    }
    double total = 0.0;
    OctaLayout(n).for_each([&](std::int64_t u, std::int64_t v, std::int64_t z, std::size_t idx) {
      if (mass[idx] != 0.0) total += mass[idx] * g({u + v, u - v, z});
    });
    return total;
  }
};

DpTable::DpTable(const Environment& env, std::size_t horizon)
    : env_(env), horizon_(horizon), layers_(horizon + 1), present_(horizon + 1, false) {}

bool DpTable::has_layer(std::size_t m) const { return m < present_.size() && present_[m]; }

const DpLayer& DpTable::layer(std::size_t m) const {
  if (!has_layer(m)) {
    throw ValidationError("DP layer " + std::to_string(m) +
                          " was not kept; rerun with keep_table");
  }
  return layers_[m];
}

std::size_t DpTable::layer_size(std::size_t m) const { return layer_size_for(env_, m); }

std::optional<std::size_t> DpTable::index_of(std::size_t m, const LatticeState& s) const {
  if (const auto* e = std::get_if<NoLearningEnv>(&env_)) {
    const LineLayout layout(m, e->max_abs_step());
    if (!layout.contains(s.sum) || s.d_nonzero != 0 || s.d_zero != 0) return std::nullopt;
    return layout.index(s.sum);
  }
  return OctaLayout(m).index(s);
}

double DpTable::value_at(std::size_t m, const LatticeState& s) const {
  const auto idx = index_of(m, s);
  if (!idx) throw ValidationError("state is not on the DP lattice");
  return layer(m).value[*idx];
}

ArmId DpTable::argmax_at(std::size_t m, const LatticeState& s) const {
  const auto idx = index_of(m, s);
  if (!idx) throw ValidationError("state is not on the DP lattice");
  const auto& l = layer(m);
  if (l.argmax.empty()) throw ValidationError("terminal layer has no decision");
  return l.argmax[*idx];
}

void DpTable::for_each_state(std::size_t m,
                             const std::function<void(const LatticeState&, std::size_t)>& fn) const {
  if (const auto* e = std::get_if<NoLearningEnv>(&env_)) {
    const LineLayout layout(m, e->max_abs_step());
    for (std::size_t i = 0; i < layout.size(); ++i) fn({layout.sum_at(i), 0, 0}, i);
    return;
  }
  OctaLayout(m).for_each([&](std::int64_t u, std::int64_t v, std::int64_t z, std::size_t idx) {
    fn({u + v, u - v, z}, idx);
  });
}

void DpTable::write_csv(std::ostream& out) const {
  const double scale = static_cast<double>(lattice_scale(env_));
  out << "stage,sum,d_nonzero,d_zero,value,argmax\n";
  out << std::setprecision(17);
  for (std::size_t m = 0; m <= horizon_; ++m) {
    if (!has_layer(m)) continue;
    const auto& l = layers_[m];
    for_each_state(m, [&](const LatticeState& s, std::size_t idx) {
      out << (m + 1) << ',' << static_cast<double>(s.sum) / scale << ',' << s.d_nonzero << ','
          << s.d_zero << ',' << l.value[idx] << ',';
      if (!l.argmax.empty()) out << arm_name(env_, l.argmax[idx]);
      out << '\n';
    });
  }
}

std::size_t dp_resident_states(const Environment& env, std::size_t n, bool keep_table) {
  if (keep_table) {
    std::size_t total = 0;
    for (std::size_t m = 0; m <= n; ++m) total += layer_size_for(env, m);
    return total;
  }
  return layer_size_for(env, n) + (n > 0 ? layer_size_for(env, n - 1) : 0);
}

DpResult value_with_terminal(const Environment& env, std::size_t n, const TerminalFn& terminal,
                             const DpOptions& options, const Tolerances& tol) {
  validate_env(env, tol);
  return DpSolver::backward(env, n, terminal, options);
}

namespace {

TerminalFn utility_terminal(const Environment& env, const UtilityIndex& u, std::size_t n) {
  const double denom = static_cast<double>(lattice_scale(env)) * std::sqrt(static_cast<double>(n));
  return [&u, denom](const LatticeState& s) { return u(static_cast<double>(s.sum) / denom); };
}

}  // namespace

DpResult value_n(const Environment& env, const UtilityIndex& u, std::size_t n,
                 const DpOptions& options, const Tolerances& tol) {
  check_horizon(n);
  return value_with_terminal(env, n, utility_terminal(env, u, n), options, tol);
}

double strategy_value_with_terminal(const Environment& env, const Strategy& s, std::size_t n,
                                    const TerminalFn& terminal, const DpOptions& options,
                                    const Tolerances& tol) {
  validate_env(env, tol);
  check_horizon(n);
  const Policy policy(env, s, n, tol);
  return DpSolver::forward(env, policy, n, terminal, options);
}

double strategy_value_n(const Environment& env, const Strategy& s, const UtilityIndex& u,
                        std::size_t n, const DpOptions& options, const Tolerances& tol) {
  check_horizon(n);
  return strategy_value_with_terminal(env, s, n, utility_terminal(env, u, n), options, tol);
}

IndicatorResult upper_indicator_prob_n(const Environment& env, double c, std::size_t n,
                                       const DpOptions& options, const Tolerances& tol) {
  check_horizon(n);
  const ScaledThreshold threshold(c, lattice_scale(env), static_cast<std::int64_t>(n));
  const auto result = value_with_terminal(
      env, n, [&](const LatticeState& s) { return threshold.at_or_above(s.sum) ? 1.0 : 0.0; },
      options, tol);
  return {result.value, threshold.boundary_is_lattice_point()};
}

ParityAverage upper_indicator_prob_parity(const Environment& env, double c, std::size_t n,
                                          const DpOptions& options, const Tolerances& tol) {
  ParityAverage out;
  out.at_n = upper_indicator_prob_n(env, c, n, options, tol).value;
  out.at_n_plus_1 = upper_indicator_prob_n(env, c, n + 1, options, tol).value;
  out.average = 0.5 * (out.at_n + out.at_n_plus_1);
  return out;
}

std::pair<double, double> rect_identity_check(const std::function<double(double)>& h,
                                              const History& state, const NoLearningEnv& env) {
  const double sum = static_cast<double>(state.sum) / static_cast<double>(env.scale());
  const double weight = h(sum);
  double lhs = -std::numeric_limits<double>::infinity();
  for (const auto& arm : env.arms()) {
    double conditional = 0.0;
    for (std::size_t j = 0; j < arm.support.size(); ++j) {
      const double x = arm.support[j].value();
      conditional += weight * x * x * arm.probs[j];
    }
    lhs = std::max(lhs, conditional);
  }
  const double var_high = env.arms()[env.high_arm()].second_moment();
  const double var_low = env.arms()[env.low_arm()].second_moment();
  const double rhs = var_high * std::max(weight, 0.0) - var_low * std::max(-weight, 0.0);
  return {lhs, rhs};
}

}  // namespace labandit
