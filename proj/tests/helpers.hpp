#pragma once

#include "funnel/bundle.hpp"
#include "funnel/constants.hpp"
#include "funnel/control_grid.hpp"
#include "funnel/rng.hpp"

#include <cmath>
#include <set>
#include <utility>
#include <vector>

namespace funnel::testing {

inline ProblemInstance unit_instance(double x0 = 0.0, double p = 2.0, double r = 1.0,
                                     double t0 = 0.0, double theta = 1.0) {
  ProblemInstance instance;
  instance.t0 = t0;
  instance.theta = theta;
  instance.x0 = Vector::Constant(1, x0);
  instance.p = p;
  instance.r = r;
  return instance;
}

using WordKey = std::pair<std::vector<int>, std::vector<int>>;

// Independent oracle for the admissible word set: raw product space
// ((q+1) * a)^N, budget checked from the magnitude values themselves,
// zero levels canonicalized, duplicates collapsed.
inline std::set<WordKey> brute_force_words(const DiscretizationPlan& plan, const SigmaNet& net) {
  std::set<WordKey> words;
  const int N = plan.time_steps;
  const int q = plan.magnitude_steps;
  const int a = net.size();
  const long combos_per_interval = static_cast<long>(q + 1) * a;
  long total = 1;
  for (int i = 0; i < N; ++i) total *= combos_per_interval;

  for (long code = 0; code < total; ++code) {
    std::vector<int> levels(static_cast<std::size_t>(N)), directions(static_cast<std::size_t>(N));
    long rest = code;
    for (int i = 0; i < N; ++i) {
      long pick = rest % combos_per_interval;
      rest /= combos_per_interval;
      levels[static_cast<std::size_t>(i)] = static_cast<int>(pick / a);
      directions[static_cast<std::size_t>(i)] = static_cast<int>(pick % a);
    }
    double mass = 0.0;
    for (int i = 0; i < N; ++i)
      mass += std::pow(plan.magnitude_level(levels[static_cast<std::size_t>(i)]), plan.p);
    if (!(mass * plan.dt() <= std::pow(plan.r, plan.p))) continue;
    for (int i = 0; i < N; ++i)
      if (levels[static_cast<std::size_t>(i)] == 0) directions[static_cast<std::size_t>(i)] = 0;
    words.insert({levels, directions});
  }
  return words;
}

inline std::vector<ControlWord> collect_words(const DiscretizationPlan& plan, const SigmaNet& net,
                                              long cap = 1'000'000) {
  std::vector<ControlWord> words;
  for_each_word(plan, net, cap, [&](long, const ControlWord& w) { words.push_back(w); });
  return words;
}

inline ControlWord random_feasible_word(const DiscretizationPlan& plan, const SigmaNet& net,
                                        Rng& rng) {
  ControlWord word;
  word.levels.resize(static_cast<std::size_t>(plan.time_steps));
  word.directions.resize(static_cast<std::size_t>(plan.time_steps));
  while (true) {
    for (int i = 0; i < plan.time_steps; ++i) {
      int j = static_cast<int>(rng() % static_cast<std::uint64_t>(plan.magnitude_steps + 1));
      word.levels[static_cast<std::size_t>(i)] = j;
      word.directions[static_cast<std::size_t>(i)] =
          j == 0 ? 0 : static_cast<int>(rng() % static_cast<std::uint64_t>(net.size()));
    }
    if (feasible(word, plan)) return word;
  }
}

} // namespace funnel::testing
