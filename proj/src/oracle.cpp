#include "storyline/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "storyline/programs.hpp"

namespace storyline {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t saturatingBinomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  if (r >= static_cast<long double>(kSaturated) / 2) return kSaturated;
  return static_cast<std::size_t>(std::llround(r));
}

std::size_t saturatingAdd(std::size_t a, std::size_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::size_t saturatingMul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

struct StepLayout {
  std::vector<long long> gap;  // minimal gap below position p+1
  std::vector<bool> rigid;     // meeting gap, exactly Δ
  long long minHeight = 0;
  std::size_t freeGaps = 0;
};

StepLayout layoutOf(const OrderedStorylineInstance& inst, const NicenessParams& params, Step t) {
  StepLayout s;
  const auto order = inst.ordering(t);
  for (std::size_t p = 0; p + 1 < order.size(); ++p) {
    const bool meeting = inst.shareMeeting(t, order[p], order[p + 1]);
    const long long g = static_cast<long long>(meeting ? params.delta : params.deltaBar);
    s.gap.push_back(g);
    s.rigid.push_back(meeting);
    s.minHeight += g;
    if (!meeting) ++s.freeGaps;
  }
  return s;
}

// All stackings of one step, row-major in ordering order.
std::vector<std::int32_t> enumerate(const StepLayout& layout, std::size_t k, long long limit) {
  std::vector<std::int32_t> out;
  if (k == 0) return out;
  std::vector<std::int32_t> cur(k);
  // Depth-first over positions; position 0 takes the base value.
  struct Rec {
    const StepLayout& layout;
    std::size_t k;
    long long limit;
    std::vector<std::int32_t>& cur;
    std::vector<std::int32_t>& out;
    void go(std::size_t p, long long y) {
      cur[p] = static_cast<std::int32_t>(y);
      if (p + 1 == k) {
        out.insert(out.end(), cur.begin(), cur.end());
        return;
      }
      long long rest = 0;
      for (std::size_t q = p + 1; q + 1 < k; ++q) rest += layout.gap[q];
      const long long lo = y + layout.gap[p];
      const long long hi = layout.rigid[p] ? lo : limit - 1 - rest;
      for (long long v = lo; v <= hi; ++v) go(p + 1, v);
    }
  } rec{layout, k, limit, cur, out};
  for (long long b = 0; b + layout.minHeight <= limit - 1; ++b) rec.go(0, b);
  return out;
}

struct Stage {
  std::size_t k = 0;
  std::size_t count = 0;
  std::vector<std::int32_t> states;
};

std::int64_t transitionCost(WiggleObjective obj, const std::int32_t* a, const std::int32_t* b,
                            const std::vector<std::pair<std::size_t, std::size_t>>& shared) {
  std::int64_t cost = 0;
  for (const auto& [pa, pb] : shared) {
    const std::int64_t d = static_cast<std::int64_t>(a[pa]) - b[pb];
    switch (obj) {
      case WiggleObjective::WC: cost += d != 0; break;
      case WiggleObjective::LWH: cost += d < 0 ? -d : d; break;
      case WiggleObjective::QWH: cost += d * d; break;
    }
  }
  return cost;
}

}  // namespace

std::size_t countStackings(const OrderedStorylineInstance& inst, const NicenessParams& params, Step t,
                           long long limit) {
  const std::size_t k = inst.activeCount(t);
  if (k == 0) return 1;
  const StepLayout layout = layoutOf(inst, params, t);
  const long long slack = limit - 1 - layout.minHeight;
  if (slack < 0) return 0;
  // Nonnegative base plus free extras with total <= slack.
  return saturatingBinomial(static_cast<std::size_t>(slack) + layout.freeGaps + 1, layout.freeGaps + 1);
}

OracleResult bruteForceOracle(const OrderedStorylineInstance& inst, const NicenessParams& params,
                              WiggleObjective objective, const OracleConfig& config) {
  params.validate();
  if (!params.integral()) throw std::invalid_argument("oracle requires integer delta and deltaBar");
  const std::size_t steps = inst.stepCount();
  OracleResult result;
  result.witness = Coordination(steps, inst.characterCount());
  if (steps == 0) return result;

  const long long limit = static_cast<long long>(bigY(inst, params));
  std::vector<Stage> stages(steps);
  std::size_t budget = 0;
  for (Step t = 0; t < steps; ++t) {
    stages[t].k = inst.activeCount(t);
    stages[t].count = countStackings(inst, params, t, limit);
    budget = saturatingAdd(budget, stages[t].count);
    if (t > 0) budget = saturatingAdd(budget, saturatingMul(stages[t - 1].count, stages[t].count));
  }
  if (budget > config.stateCap)
    throw StateCapExceeded("oracle needs " + (budget == kSaturated ? std::string("too many") : std::to_string(budget)) +
                           " states and transitions, cap is " + std::to_string(config.stateCap));
  for (Step t = 0; t < steps; ++t) {
    if (stages[t].k > 0) stages[t].states = enumerate(layoutOf(inst, params, t), stages[t].k, limit);
    result.states += stages[t].count;
  }

  // Order of the recursion: forward visits 0..l-1, reverse l-1..0.
  std::vector<Step> order(steps);
  for (Step i = 0; i < steps; ++i) order[i] = config.reverse ? steps - 1 - i : i;

  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();
  std::vector<std::vector<std::int64_t>> cost(steps);
  std::vector<std::vector<std::size_t>> parent(steps);
  cost[order[0]].assign(stages[order[0]].count, 0);
  const bool parallel = config.execution == Execution::Parallel;

  for (std::size_t i = 1; i < steps; ++i) {
    const Step from = order[i - 1];
    const Step to = order[i];
    const Stage& A = stages[from];
    const Stage& B = stages[to];
    std::vector<std::pair<std::size_t, std::size_t>> shared;
    for (CharIndex c : inst.sharedCharacters(std::min(from, to)))
      shared.emplace_back(inst.position(from, c), inst.position(to, c));
    result.transitions += A.count * B.count;

    auto& cb = cost[to];
    auto& pb = parent[to];
    cb.assign(B.count, kNone);
    pb.assign(B.count, 0);
    const auto& ca = cost[from];
    const std::int32_t* sa = A.states.data();
    const std::int32_t* sb = B.states.data();
    const std::size_t ka = A.k, kb = B.k;
    const auto countB = static_cast<std::ptrdiff_t>(B.count);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t s2 = 0; s2 < countB; ++s2) {
      std::int64_t best = kNone;
      std::size_t arg = 0;
      for (std::size_t s1 = 0; s1 < A.count; ++s1) {
        if (ca[s1] == kNone) continue;
        const std::int64_t c = ca[s1] + transitionCost(objective, sa + s1 * ka, sb + static_cast<std::size_t>(s2) * kb, shared);
        if (c < best) {
          best = c;
          arg = s1;
        }
      }
      cb[static_cast<std::size_t>(s2)] = best;
      pb[static_cast<std::size_t>(s2)] = arg;
    }
  }

  const Step last = order.back();
  std::int64_t best = kNone;
  std::size_t arg = 0;
  for (std::size_t s = 0; s < stages[last].count; ++s) {
    if (cost[last][s] < best) {
      best = cost[last][s];
      arg = s;
    }
  }
  if (best == kNone) throw std::logic_error("oracle found no nice coordination");
  result.optimum = static_cast<double>(best);

  std::size_t s = arg;
  for (std::size_t i = steps; i-- > 0;) {
    const Step t = order[i];
    const auto ord = inst.ordering(t);
    for (std::size_t p = 0; p < ord.size(); ++p) result.witness.at(t, ord[p]) = stages[t].states[s * stages[t].k + p];
    if (i > 0) s = parent[t][s];
  }
  return result;
}

}  // namespace storyline
