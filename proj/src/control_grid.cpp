#include "funnel/control_grid.hpp"

#include <algorithm>
#include <cmath>

namespace funnel {

namespace {

// Precomputed j^p table and the shared budget factors.
struct BudgetContext {
  std::vector<double> level_pow; // j^p for j = 0..q
  double factor;                 // delta^p * dt
  double budget;                 // r^p

  explicit BudgetContext(const DiscretizationPlan& plan) {
    level_pow.resize(static_cast<std::size_t>(plan.magnitude_steps) + 1);
    for (int j = 0; j <= plan.magnitude_steps; ++j)
      level_pow[static_cast<std::size_t>(j)] = std::pow(static_cast<double>(j), plan.p);
    factor = std::pow(plan.magnitude_step(), plan.p) * plan.dt();
    budget = std::pow(plan.r, plan.p);
  }

  bool within(double level_pow_sum) const { return level_pow_sum * factor <= budget; }
};

void check_word(const ControlWord& word, const DiscretizationPlan& plan) {
  if (word.intervals() != plan.time_steps ||
      word.directions.size() != word.levels.size())
    throw ValidationError("control word does not match the plan's interval count");
}

} // namespace

Vector word_value(const ControlWord& word, const DiscretizationPlan& plan, const SigmaNet& net,
                  int interval) {
  double level = plan.magnitude_level(word.levels[static_cast<std::size_t>(interval)]);
  return level * net.points[static_cast<std::size_t>(word.directions[static_cast<std::size_t>(interval)])];
}

bool feasible(const ControlWord& word, const DiscretizationPlan& plan) {
  check_word(word, plan);
  BudgetContext ctx(plan);
  double sum = 0.0;
  for (int j : word.levels) {
    if (j < 0 || j > plan.magnitude_steps)
      throw ValidationError("control word level index out of range");
    sum += ctx.level_pow[static_cast<std::size_t>(j)];
  }
  return ctx.within(sum);
}

double word_lp_norm(const ControlWord& word, const DiscretizationPlan& plan) {
  check_word(word, plan);
  BudgetContext ctx(plan);
  double sum = 0.0;
  for (int j : word.levels) sum += ctx.level_pow[static_cast<std::size_t>(j)];
  return std::pow(sum * ctx.factor, 1.0 / plan.p);
}

namespace {

struct Enumerator {
  const DiscretizationPlan& plan;
  const SigmaNet& net;
  BudgetContext ctx;
  long cap;
  const std::function<void(long, const ControlWord&)>* fn; // null in count mode
  ControlWord word;
  EnumerationStats stats;

  Enumerator(const DiscretizationPlan& plan_, const SigmaNet& net_, long cap_,
             const std::function<void(long, const ControlWord&)>* fn_)
      : plan(plan_), net(net_), ctx(plan_), cap(cap_), fn(fn_) {
    word.levels.assign(static_cast<std::size_t>(plan.time_steps), 0);
    word.directions.assign(static_cast<std::size_t>(plan.time_steps), 0);
  }

  [[noreturn]] void overflow() const {
    throw CapacityError("word enumeration exceeds the cap of " + std::to_string(cap) +
                        " (found " + std::to_string(stats.words) +
                        " so far; the total is at least that)");
  }

  void levels_from(int interval, double level_pow_sum) {
    if (interval == plan.time_steps) {
      directions_from(0);
      return;
    }
    for (int j = 0; j <= plan.magnitude_steps; ++j) {
      double sum = level_pow_sum + ctx.level_pow[static_cast<std::size_t>(j)];
      if (!ctx.within(sum)) {
        // level powers grow with j: everything past the first overflow prunes
        ++stats.pruned_prefixes;
        break;
      }
      word.levels[static_cast<std::size_t>(interval)] = j;
      levels_from(interval + 1, sum);
    }
  }

  void directions_from(int interval) {
    if (interval == plan.time_steps) {
      if (stats.words >= cap) overflow();
      if (fn) (*fn)(stats.words, word);
      ++stats.words;
      return;
    }
    if (word.levels[static_cast<std::size_t>(interval)] == 0) {
      word.directions[static_cast<std::size_t>(interval)] = 0;
      directions_from(interval + 1);
      return;
    }
    if (!fn) {
      // Count mode: the remaining direction choices multiply out.
      long product = 1;
      for (int i = interval; i < plan.time_steps; ++i)
        if (word.levels[static_cast<std::size_t>(i)] > 0) {
          if (product > cap / net.size() + 1) overflow();
          product *= net.size();
        }
      if (stats.words > cap - product) overflow();
      stats.words += product;
      return;
    }
    for (int l = 0; l < net.size(); ++l) {
      word.directions[static_cast<std::size_t>(interval)] = l;
      directions_from(interval + 1);
    }
  }
};

} // namespace

EnumerationStats for_each_word(const DiscretizationPlan& plan, const SigmaNet& net, long cap,
                               const std::function<void(long, const ControlWord&)>& fn) {
  plan.validate();
  if (net.points.empty()) throw ValidationError("enumeration needs a nonempty net");
  if (cap < 1) throw ValidationError("enumeration cap must be >= 1");
  Enumerator e(plan, net, cap, &fn);
  e.levels_from(0, 0.0);
  return e.stats;
}

long count_words(const DiscretizationPlan& plan, const SigmaNet& net, long cap) {
  plan.validate();
  if (net.points.empty()) throw ValidationError("enumeration needs a nonempty net");
  if (cap < 1) throw ValidationError("enumeration cap must be >= 1");
  Enumerator e(plan, net, cap, nullptr);
  e.levels_from(0, 0.0);
  return e.stats.words;
}

Vector PiecewiseControl::at(double t) const {
  int i = grid.interval_of(t);
  return values[static_cast<std::size_t>(i)];
}

double PiecewiseControl::lp_norm(double p) const {
  double sum = 0.0;
  for (const Vector& v : values) sum += std::pow(v.norm(), p);
  return std::pow(sum * grid.dt(), 1.0 / p);
}

PiecewiseControl word_control(const ControlWord& word, const DiscretizationPlan& plan,
                              const SigmaNet& net) {
  check_word(word, plan);
  PiecewiseControl control;
  control.grid = plan.grid();
  control.values.reserve(static_cast<std::size_t>(plan.time_steps));
  for (int i = 0; i < plan.time_steps; ++i) control.values.push_back(word_value(word, plan, net, i));
  return control;
}

PiecewiseControl average_control(const std::function<Vector(double)>& u, const TimeGrid& grid,
                                 int samples_per_interval) {
  if (samples_per_interval < 1) throw ValidationError("average_control: need samples >= 1");
  if (grid.steps < 1) throw ValidationError("average_control: empty grid");
  PiecewiseControl out;
  out.grid = grid;
  out.values.reserve(static_cast<std::size_t>(grid.steps));
  for (int i = 0; i < grid.steps; ++i) {
    double lo = grid.node(i), hi = grid.node(i + 1);
    double h = (hi - lo) / samples_per_interval;
    Vector mean = u(lo + 0.5 * h);
    for (int k = 1; k < samples_per_interval; ++k) mean += u(lo + (k + 0.5) * h);
    out.values.push_back(mean / samples_per_interval);
  }
  return out;
}

PiecewiseControl average_control(const PiecewiseControl& fine, const TimeGrid& coarse) {
  if (coarse.steps < 1) throw ValidationError("average_control: empty grid");
  PiecewiseControl out;
  out.grid = coarse;
  out.values.reserve(static_cast<std::size_t>(coarse.steps));
  for (int i = 0; i < coarse.steps; ++i) {
    double lo = coarse.node(i), hi = coarse.node(i + 1);
    Vector acc = Vector::Zero(fine.values.front().size());
    for (int k = 0; k < fine.grid.steps; ++k) {
      double a = std::max(lo, fine.grid.node(k));
      double b = std::min(hi, fine.grid.node(k + 1));
      if (b > a) acc += (b - a) * fine.values[static_cast<std::size_t>(k)];
    }
    out.values.push_back(acc / (hi - lo));
  }
  return out;
}

} // namespace funnel
