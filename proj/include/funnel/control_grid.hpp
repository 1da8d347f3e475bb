#pragma once

#include "funnel/common.hpp"
#include "funnel/schedule.hpp"
#include "funnel/sphere_net.hpp"

#include <functional>
#include <vector>

namespace funnel {

// One admissible piecewise-constant control: on [t_i, t_{i+1}) the control is
// magnitude_level(levels[i]) * net.points[directions[i]]. Zero magnitude
// forces direction index 0 (canonical form), so distinct words define
// distinct control functions.
struct ControlWord {
  std::vector<int> levels;     // j_i in 0..q
  std::vector<int> directions; // l_i in 0..a-1

  int intervals() const { return static_cast<int>(levels.size()); }
};

// Control vector on interval i.
Vector word_value(const ControlWord& word, const DiscretizationPlan& plan, const SigmaNet& net,
                  int interval);

// Budget test dt * sum (j_i * delta)^p <= r^p, evaluated as
// (sum j_i^p) * (delta^p * dt) <= r^p with non-strict comparison and no
// tolerance; boundary words are admissible.
bool feasible(const ControlWord& word, const DiscretizationPlan& plan);

// (dt * sum (j_i * delta)^p)^(1/p); <= r for feasible words.
double word_lp_norm(const ControlWord& word, const DiscretizationPlan& plan);

struct EnumerationStats {
  long words = 0;
  long pruned_prefixes = 0;
};

// Streams the canonical admissible words in lexicographic (level-sequence,
// direction-sequence) order. Depth-first over level sequences with
// remaining-budget pruning; directions enumerated per feasible level
// sequence. Throws CapacityError past `cap` words, reporting the count so far
// (a lower bound on the total).
EnumerationStats for_each_word(const DiscretizationPlan& plan, const SigmaNet& net, long cap,
                               const std::function<void(long index, const ControlWord&)>& fn);

// Exact word count (same traversal, no materialization).
long count_words(const DiscretizationPlan& plan, const SigmaNet& net, long cap);

// Piecewise-constant control on a time grid.
struct PiecewiseControl {
  TimeGrid grid;
  std::vector<Vector> values; // one per interval

  Vector at(double t) const;
  double lp_norm(double p) const;
};

PiecewiseControl word_control(const ControlWord& word, const DiscretizationPlan& plan,
                              const SigmaNet& net);

// Interval means of a control function (midpoint rule with
// samples_per_interval points). Never increases the L_p norm for exact means.
PiecewiseControl average_control(const std::function<Vector(double)>& u, const TimeGrid& grid,
                                 int samples_per_interval = 64);

// Exact interval means of a piecewise-constant control over a coarser grid.
PiecewiseControl average_control(const PiecewiseControl& fine, const TimeGrid& coarse);

} // namespace funnel
