#include "storyline/wigglefree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "storyline/solver.hpp"

namespace storyline {

namespace {

constexpr double kSpanTol = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

SpanTables::SpanTables(const OrderedStorylineInstance& inst, const NicenessParams& params) {
  params.validate();
  steps_ = inst.stepCount();
  chars_ = inst.alwaysActive();
  if (steps_ > 0)
    std::sort(chars_.begin(), chars_.end(),
              [&](CharIndex a, CharIndex b) { return inst.position(0, a) < inst.position(0, b); });
  m_ = chars_.size();

  prefix_.resize(steps_);
  for (Step i = 0; i < steps_; ++i) {
    const auto order = inst.ordering(i);
    auto& pre = prefix_[i];
    pre.assign(order.size(), 0);
    // C(j1, j2) = C(j1, j2 - 1) + [positions j2-1, j2 share a meeting].
    for (std::size_t j = 1; j < order.size(); ++j)
      pre[j] = pre[j - 1] + (inst.shareMeeting(i, order[j - 1], order[j]) ? 1 : 0);
  }

  miny_.assign(steps_ * m_ * m_, kNaN);
  maxy_.assign(steps_ * m_ * m_, kNaN);
  ordered_.assign(m_ * m_, false);
  for (std::size_t a = 0; a < m_; ++a) {
    for (std::size_t b = a + 1; b < m_; ++b) {
      bool below = true;
      for (Step i = 0; i < steps_; ++i) {
        const std::size_t ja = inst.position(i, chars_[a]);
        const std::size_t jb = inst.position(i, chars_[b]);
        if (ja >= jb) {
          below = false;
          continue;
        }
        const std::size_t k = ccons(i, ja, jb);
        const double dist = static_cast<double>(jb - ja);
        miny_[slot(i, a, b)] = static_cast<double>(k) * params.delta + (dist - static_cast<double>(k)) * params.deltaBar;
        maxy_[slot(i, a, b)] = inst.shareMeeting(i, chars_[a], chars_[b]) ? params.delta * dist : kInf;
      }
      ordered_[a * m_ + b] = below;
    }
  }
}

std::size_t SpanTables::ccons(Step i, std::size_t j1, std::size_t j2) const {
  if (j1 > j2) throw std::out_of_range("ccons expects j1 <= j2");
  const auto& pre = prefix_.at(i);
  return pre.at(j2) - pre.at(j1);
}

bool SpanTables::ordered(std::size_t a, std::size_t b) const { return a < b && ordered_[a * m_ + b]; }

SpanTables computeSpanTables(const OrderedStorylineInstance& inst, const NicenessParams& params) {
  return SpanTables(inst, params);
}

std::vector<PairArc> pairArcs(const SpanTables& tables, Execution execution) {
  const std::size_t m = tables.characters().size();
  const std::size_t pairs = m * (m > 0 ? m - 1 : 0) / 2;
  std::vector<std::optional<PairArc>> found(pairs);
  const auto evaluate = [&](std::size_t a, std::size_t b) -> std::optional<PairArc> {
    if (!tables.ordered(a, b)) return std::nullopt;
    double lo = -kInf, hi = kInf;
    for (Step i = 0; i < tables.stepCount(); ++i) {
      lo = std::max(lo, tables.miny(i, a, b));
      hi = std::min(hi, tables.maxy(i, a, b));
      if (lo > hi + kSpanTol) return std::nullopt;
    }
    return PairArc{a, b, lo, hi};
  };
  // Pair (a, b), a < b, lives at a*m - a*(a+1)/2 + (b - a - 1).
  const auto flatIndex = [m](std::size_t a, std::size_t b) { return a * m - a * (a + 1) / 2 + (b - a - 1); };
  const auto rows = static_cast<std::ptrdiff_t>(m);
  const bool parallel = execution == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t ai = 0; ai < rows; ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    for (std::size_t b = a + 1; b < m; ++b) found[flatIndex(a, b)] = evaluate(a, b);
  }
  std::vector<PairArc> arcs;
  for (const auto& f : found)
    if (f) arcs.push_back(*f);
  return arcs;
}

std::optional<Coordination> flatRealization(const OrderedStorylineInstance& inst, const NicenessParams& params,
                                            const std::vector<CharIndex>& flat) {
  ProgramOptions options;
  options.flat = flat;
  const BuiltProgram program = buildLwhProgram(inst, params, options);
  const SolveResult result = solveLp(program.model);
  if (result.status == SolveStatus::Infeasible) return std::nullopt;
  if (result.status != SolveStatus::Optimal)
    throw std::runtime_error(std::string("flat realization LP ended with ") + std::string(statusName(result.status)));
  return extractCoordination(inst, program.index, result.assignment, params);
}

WiggleFreeResult maxWiggleFreeSet(const OrderedStorylineInstance& inst, const NicenessParams& params,
                                  Execution execution) {
  const SpanTables tables(inst, params);
  const auto& chars = tables.characters();
  const std::size_t m = chars.size();
  const auto arcs = pairArcs(tables, execution);

  std::vector<std::vector<std::size_t>> preds(m);
  for (const auto& arc : arcs) preds[arc.upper].push_back(arc.lower);

  // Longest path (in vertices) over the order of the first step.
  const auto idLess = [&](std::size_t u, std::size_t v) { return inst.character(chars[u]).id < inst.character(chars[v]).id; };
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> length(m, 1), from(m, none);
  for (std::size_t v = 0; v < m; ++v) {
    for (std::size_t u : preds[v]) {
      const std::size_t cand = length[u] + 1;
      if (cand > length[v] || (cand == length[v] && from[v] != none && idLess(u, from[v]))) {
        length[v] = cand;
        from[v] = u;
      }
    }
  }
  WiggleFreeResult result;
  if (m > 0) {
    std::size_t end = 0;
    for (std::size_t v = 1; v < m; ++v)
      if (length[v] > length[end] || (length[v] == length[end] && idLess(v, end))) end = v;
    for (std::size_t v = end; v != none; v = from[v]) result.certificate.push_back(chars[v]);
    std::reverse(result.certificate.begin(), result.certificate.end());
  }
  result.subset = result.certificate;
  auto coord = flatRealization(inst, params, result.subset);
  if (!coord) throw std::logic_error("wiggle-free path is not realizable; span tables are inconsistent");
  result.coordination = std::move(*coord);
  return result;
}

WiggleCountResult twoStepWcMin(const OrderedStorylineInstance& inst, const NicenessParams& params) {
  if (inst.stepCount() != 2) throw std::invalid_argument("twoStepWcMin requires exactly two time steps");
  const auto free = maxWiggleFreeSet(inst, params);
  WiggleCountResult out;
  out.count = inst.sharedCharacters(0).size() - free.subset.size();
  out.coordination = free.coordination;
  return out;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

WiggleCountResult unrestrictedWcMin(const OrderedStorylineInstance& inst) {
  const std::size_t steps = inst.stepCount();
  const std::size_t n = inst.characterCount();
  WiggleCountResult out;
  UnionFind uf(steps * n);
  const auto node = [n](Step t, CharIndex c) { return t * n + c; };

  for (Step t = 0; t + 1 < steps; ++t) {
    std::vector<CharIndex> a, b;
    for (CharIndex c : inst.ordering(t))
      if (inst.isActive(t + 1, c)) a.push_back(c);
    for (CharIndex c : inst.ordering(t + 1))
      if (inst.isActive(t, c)) b.push_back(c);
    const auto lcs = longestCommonSubsequence(a, b);
    out.count += a.size() - lcs.size();
    for (CharIndex c : lcs) uf.unite(node(t, c), node(t + 1, c));
  }

  // Difference constraints y(upper) >= y(lower) + 1 between merged classes.
  std::vector<std::vector<std::size_t>> succ(steps * n);
  std::vector<std::size_t> indegree(steps * n, 0);
  std::vector<bool> used(steps * n, false);
  for (Step t = 0; t < steps; ++t) {
    const auto order = inst.ordering(t);
    for (CharIndex c : order) used[uf.find(node(t, c))] = true;
    for (std::size_t p = 0; p + 1 < order.size(); ++p) {
      const auto lo = uf.find(node(t, order[p]));
      const auto hi = uf.find(node(t, order[p + 1]));
      succ[lo].push_back(hi);
      ++indegree[hi];
    }
  }
  std::vector<long long> level(steps * n, 0);
  std::vector<std::size_t> queue;
  std::size_t classes = 0;
  for (std::size_t v = 0; v < steps * n; ++v) {
    if (!used[v]) continue;
    ++classes;
    if (indegree[v] == 0) queue.push_back(v);
  }
  std::size_t processed = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    ++processed;
    for (std::size_t w : succ[v]) {
      level[w] = std::max(level[w], level[v] + 1);
      if (--indegree[w] == 0) queue.push_back(w);
    }
  }
  if (processed != classes) throw std::logic_error("unrestricted layout constraints contain a cycle");

  out.coordination = Coordination(steps, n);
  for (Step t = 0; t < steps; ++t)
    for (CharIndex c : inst.ordering(t)) out.coordination.at(t, c) = static_cast<double>(level[uf.find(node(t, c))]);
  return out;
}

}  // namespace storyline
