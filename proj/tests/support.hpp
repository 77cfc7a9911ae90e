#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "storyline/model.hpp"

namespace storyline::testing {

// Portable draws: std::uniform_int_distribution differs between standard
// libraries, which would change the generated suites.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct InstanceShape {
  std::size_t minChars = 1;
  std::size_t maxChars = 4;
  std::size_t minSteps = 1;
  std::size_t maxSteps = 4;
  std::size_t maxMeetings = 2;
  bool allActive = false;
};

// Characters named a, b, c, ...; meetings are consecutive blocks of the
// step's random permutation, so every generated instance is valid.
inline OrderedStorylineInstance randomInstance(Rng& rng, const InstanceShape& shape = {}) {
  StorylineInstance base;
  const std::size_t n = rng.between(shape.minChars, shape.maxChars);
  base.steps = rng.between(shape.minSteps, shape.maxSteps);
  for (std::size_t c = 0; c < n; ++c) {
    Character ch;
    ch.id = std::string(1, static_cast<char>('a' + c));
    if (shape.allActive) {
      ch.activity = {0, base.steps - 1};
    } else {
      const std::size_t a = rng.below(base.steps);
      const std::size_t b = rng.between(a, base.steps - 1);
      ch.activity = {a, b};
    }
    base.characters.push_back(ch);
  }
  std::vector<std::vector<CharIndex>> orderings(base.steps);
  for (Step t = 0; t < base.steps; ++t) {
    for (CharIndex c = 0; c < n; ++c)
      if (base.characters[c].activity.contains(t)) orderings[t].push_back(c);
    rng.shuffle(orderings[t]);
  }
  const std::size_t meetings = rng.between(0, shape.maxMeetings);
  std::vector<std::vector<bool>> used(base.steps);
  for (Step t = 0; t < base.steps; ++t) used[t].assign(orderings[t].size(), false);
  for (std::size_t k = 0; k < meetings; ++k) {
    const Step t = rng.below(base.steps);
    const auto& order = orderings[t];
    if (order.size() < 2) continue;
    const std::size_t size = rng.between(2, order.size());
    const std::size_t start = rng.between(0, order.size() - size);
    bool clash = false;
    for (std::size_t p = start; p < start + size; ++p) clash = clash || used[t][p];
    if (clash) continue;
    Meeting m;
    m.step = t;
    for (std::size_t p = start; p < start + size; ++p) {
      used[t][p] = true;
      m.members.push_back(order[p]);
    }
    base.meetings.push_back(std::move(m));
  }
  return OrderedStorylineInstance(std::move(base), std::move(orderings));
}

// Builds an instance from id lists. Activity is derived from the orderings.
inline OrderedStorylineInstance makeInstance(const std::vector<std::vector<std::string>>& orderings,
                                             const std::vector<std::pair<std::size_t, std::vector<std::string>>>& meetings = {}) {
  StorylineInstance base;
  base.steps = orderings.size();
  std::vector<std::string> ids;
  const auto indexOf = [&](const std::string& id) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return i;
    ids.push_back(id);
    return ids.size() - 1;
  };
  std::vector<std::vector<CharIndex>> order(orderings.size());
  std::vector<std::pair<Step, Step>> span;
  for (Step t = 0; t < orderings.size(); ++t) {
    for (const auto& id : orderings[t]) {
      const auto c = indexOf(id);
      if (span.size() <= c) span.resize(c + 1, {t, t});
      span[c].second = t;
      order[t].push_back(c);
    }
  }
  for (std::size_t c = 0; c < ids.size(); ++c) base.characters.push_back({ids[c], {span[c].first, span[c].second}, {}});
  for (const auto& [t, members] : meetings) {
    Meeting m;
    m.step = t - 1;
    for (const auto& id : members) m.members.push_back(indexOf(id));
    base.meetings.push_back(std::move(m));
  }
  return OrderedStorylineInstance(std::move(base), std::move(order));
}

// Two steps, all characters active, random orders and spacings drawn from
// [minGap, maxGap]. Some characters may end up flat.
struct RandomGap {
  OrderedStorylineInstance instance;
  Coordination coord;
};

inline RandomGap randomGap(Rng& rng, std::size_t minChars = 2, std::size_t maxChars = 5, double minGap = 1.0,
                           double maxGap = 3.0, double crossChance = 0.3) {
  const std::size_t n = rng.between(minChars, maxChars);
  std::vector<std::vector<std::string>> orders(2);
  for (std::size_t c = 0; c < n; ++c) orders[0].push_back(std::string(1, static_cast<char>('a' + c)));
  orders[1] = orders[0];
  if (rng.chance(crossChance)) rng.shuffle(orders[1]);
  RandomGap g{makeInstance(orders), {}};
  g.coord = Coordination::forInstance(g.instance);
  for (Step t = 0; t < 2; ++t) {
    double y = rng.uniform(0.0, maxGap);
    for (CharIndex c : g.instance.ordering(t)) {
      g.coord.at(t, c) = y;
      y += rng.chance(0.3) ? minGap : rng.uniform(minGap, maxGap);
    }
  }
  return g;
}

inline OrderedStorylineInstance crossingPair() { return makeInstance({{"a", "b"}, {"b", "a"}}); }

}  // namespace storyline::testing
