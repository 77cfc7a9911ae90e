#include "storyline/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace storyline {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::string stepLabel(Step t) { return "time step " + std::to_string(t + 1); }

std::string meetingLabel(const StorylineInstance& inst, std::size_t m) {
  std::ostringstream os;
  os << "meeting #" << (m + 1) << " {";
  const auto& members = inst.meetings[m].members;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) os << ",";
    os << (members[i] < inst.characters.size() ? inst.characters[members[i]].id : "?");
  }
  os << "} at " << stepLabel(inst.meetings[m].step);
  return os.str();
}

}  // namespace

void NicenessParams::validate() const {
  if (!std::isfinite(delta) || delta <= 0.0)
    throw std::invalid_argument("delta must be a positive finite number");
  if (!std::isfinite(deltaBar) || deltaBar <= 0.0)
    throw std::invalid_argument("deltaBar must be a positive finite number");
}

bool NicenessParams::integral() const noexcept {
  return std::floor(delta) == delta && std::floor(deltaBar) == deltaBar;
}

void StorylineInstance::validate() const {
  std::unordered_map<std::string, CharIndex> seen;
  for (CharIndex c = 0; c < characters.size(); ++c) {
    const auto& ch = characters[c];
    if (ch.id.empty()) throw InstanceError("character #" + std::to_string(c + 1), "empty id");
    if (!seen.emplace(ch.id, c).second) throw InstanceError("character " + ch.id, "duplicate id");
    if (ch.activity.first > ch.activity.last)
      throw InstanceError("character " + ch.id, "empty activity interval");
    if (ch.activity.last >= steps)
      throw InstanceError("character " + ch.id, "activity interval exceeds the time range");
  }

  std::vector<std::size_t> owner(steps * characters.size(), npos);
  for (std::size_t m = 0; m < meetings.size(); ++m) {
    const auto& meeting = meetings[m];
    if (meeting.step >= steps)
      throw InstanceError("meeting #" + std::to_string(m + 1), "time step out of range");
    if (meeting.members.empty()) throw InstanceError(meetingLabel(*this, m), "meeting has no members");
    for (CharIndex c : meeting.members) {
      if (c >= characters.size()) throw InstanceError(meetingLabel(*this, m), "unknown member");
      if (!characters[c].activity.contains(meeting.step))
        throw InstanceError(meetingLabel(*this, m), "member " + characters[c].id + " inactive");
      auto& slot = owner[meeting.step * characters.size() + c];
      if (slot == m) throw InstanceError(meetingLabel(*this, m), "duplicate member " + characters[c].id);
      if (slot != npos)
        throw InstanceError(meetingLabel(*this, m),
                            "member " + characters[c].id + " already in " + meetingLabel(*this, slot));
      slot = m;
    }
  }
}

OrderedStorylineInstance::OrderedStorylineInstance(StorylineInstance base,
                                                   std::vector<std::vector<CharIndex>> orderings)
    : base_(std::move(base)), orderings_(std::move(orderings)) {
  base_.validate();
  const std::size_t n = base_.characters.size();
  const std::size_t steps = base_.steps;
  if (orderings_.size() != steps)
    throw InstanceError("orderings", "expected " + std::to_string(steps) + " orderings, got " +
                                         std::to_string(orderings_.size()));

  positions_.assign(steps * n, npos);
  meetingSlot_.assign(steps * n, npos);
  for (CharIndex c = 0; c < n; ++c) byId_.emplace(base_.characters[c].id, c);

  for (Step t = 0; t < steps; ++t) {
    const auto& order = orderings_[t];
    for (std::size_t p = 0; p < order.size(); ++p) {
      const CharIndex c = order[p];
      if (c >= n) throw InstanceError("ordering at " + stepLabel(t), "unknown character");
      const auto& ch = base_.characters[c];
      if (!ch.activity.contains(t))
        throw InstanceError("ordering at " + stepLabel(t), "character " + ch.id + " is not active");
      if (positions_[t * n + c] != npos)
        throw InstanceError("ordering at " + stepLabel(t), "character " + ch.id + " listed twice");
      positions_[t * n + c] = p;
    }
    for (CharIndex c = 0; c < n; ++c) {
      if (base_.characters[c].activity.contains(t) && positions_[t * n + c] == npos)
        throw InstanceError("ordering at " + stepLabel(t),
                            "active character " + base_.characters[c].id + " missing");
    }
    activePairs_ += order.size();
  }

  for (std::size_t m = 0; m < base_.meetings.size(); ++m) {
    const auto& meeting = base_.meetings[m];
    std::size_t lo = npos, hi = 0;
    for (CharIndex c : meeting.members) {
      const std::size_t p = positions_[meeting.step * n + c];
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      meetingSlot_[meeting.step * n + c] = m;
    }
    if (hi - lo + 1 != meeting.members.size())
      throw InstanceError(meetingLabel(base_, m), "meeting not consecutive in the ordering");
  }
}

std::optional<CharIndex> OrderedStorylineInstance::findCharacter(std::string_view id) const {
  auto it = byId_.find(std::string(id));
  if (it == byId_.end()) return std::nullopt;
  return it->second;
}

std::size_t OrderedStorylineInstance::position(Step t, CharIndex c) const {
  const std::size_t p = positions_.at(t * characterCount() + c);
  if (p == npos)
    throw std::out_of_range("character " + base_.characters[c].id + " inactive at " + stepLabel(t));
  return p;
}

std::optional<std::size_t> OrderedStorylineInstance::meetingOf(Step t, CharIndex c) const {
  const std::size_t m = meetingSlot_.at(t * characterCount() + c);
  if (m == npos) return std::nullopt;
  return m;
}

bool OrderedStorylineInstance::shareMeeting(Step t, CharIndex a, CharIndex b) const {
  const auto ma = meetingOf(t, a);
  return ma && ma == meetingOf(t, b);
}

std::vector<CharIndex> OrderedStorylineInstance::sharedCharacters(Step t) const {
  std::vector<CharIndex> out;
  if (t + 1 >= stepCount()) return out;
  for (CharIndex c = 0; c < characterCount(); ++c)
    if (isActive(t, c) && isActive(t + 1, c)) out.push_back(c);
  return out;
}

std::vector<CharIndex> OrderedStorylineInstance::alwaysActive() const {
  std::vector<CharIndex> out;
  if (stepCount() == 0) return out;
  for (CharIndex c = 0; c < characterCount(); ++c) {
    const auto& a = base_.characters[c].activity;
    if (a.first == 0 && a.last + 1 == stepCount()) out.push_back(c);
  }
  return out;
}

Coordination::Coordination(std::size_t steps, std::size_t characters)
    : steps_(steps), characters_(characters),
      values_(steps * characters, std::numeric_limits<double>::quiet_NaN()) {}

Coordination Coordination::forInstance(const OrderedStorylineInstance& inst, double fill) {
  Coordination coord(inst.stepCount(), inst.characterCount());
  for (Step t = 0; t < inst.stepCount(); ++t)
    for (CharIndex c : inst.ordering(t)) coord.at(t, c) = fill;
  return coord;
}

bool Coordination::defined(Step t, CharIndex c) const {
  return t < steps_ && c < characters_ && !std::isnan(values_[t * characters_ + c]);
}

void checkDomain(const OrderedStorylineInstance& inst, const Coordination& coord) {
  if (coord.stepCount() != inst.stepCount() || coord.characterCount() != inst.characterCount())
    throw DomainError("coordination dimensions do not match the instance");
  for (Step t = 0; t < inst.stepCount(); ++t) {
    for (CharIndex c = 0; c < inst.characterCount(); ++c) {
      const double y = coord(t, c);
      if (inst.isActive(t, c)) {
        if (!std::isfinite(y))
          throw DomainError("no finite y for " + inst.character(c).id + " at " + stepLabel(t));
      } else if (!std::isnan(y)) {
        throw DomainError("y given for inactive " + inst.character(c).id + " at " + stepLabel(t));
      }
    }
  }
}

NeighborSets neighborSets(const OrderedStorylineInstance& inst, Step t) {
  if (t >= inst.stepCount()) throw std::out_of_range("time step out of range");
  NeighborSets sets;
  const auto order = inst.ordering(t);
  for (std::size_t p = 0; p + 1 < order.size(); ++p) {
    const CharPair pair{order[p], order[p + 1]};
    sets.all.push_back(pair);
    (inst.shareMeeting(t, pair.first, pair.second) ? sets.meeting : sets.free).push_back(pair);
  }
  return sets;
}

NicenessReport isNice(const OrderedStorylineInstance& inst, const Coordination& coord,
                      const NicenessParams& params, double tol) {
  checkDomain(inst, coord);
  NicenessReport report;
  const auto flag = [&](NicenessViolation::Kind kind, Step t, const CharPair& p, double gap) {
    report.nice = false;
    report.violations.push_back({kind, t, p.first, p.second, gap});
  };
  for (Step t = 0; t < inst.stepCount(); ++t) {
    const auto sets = neighborSets(inst, t);
    for (const auto& p : sets.all) {
      const double gap = coord(t, p.second) - coord(t, p.first);
      if (!(gap > 0.0)) flag(NicenessViolation::Kind::NotIncreasing, t, p, gap);
    }
    for (const auto& p : sets.meeting) {
      const double gap = coord(t, p.second) - coord(t, p.first);
      if (std::abs(gap - params.delta) > tol) flag(NicenessViolation::Kind::MeetingSpacing, t, p, gap);
    }
    for (const auto& p : sets.free) {
      const double gap = coord(t, p.second) - coord(t, p.first);
      if (gap < params.deltaBar - tol) flag(NicenessViolation::Kind::FreeSpacing, t, p, gap);
    }
  }
  return report;
}

bool isValid(const OrderedStorylineInstance& inst, const Coordination& coord) {
  checkDomain(inst, coord);
  for (Step t = 0; t < inst.stepCount(); ++t) {
    const auto order = inst.ordering(t);
    for (std::size_t p = 0; p + 1 < order.size(); ++p)
      if (!(coord(t, order[p]) < coord(t, order[p + 1]))) return false;
  }
  return true;
}

LayoutMetrics computeMetrics(const OrderedStorylineInstance& inst, const Coordination& coord,
                             double zeroTol) {
  checkDomain(inst, coord);
  LayoutMetrics m;
  for (Step t = 0; t + 1 < inst.stepCount(); ++t) {
    for (CharIndex c : inst.sharedCharacters(t)) {
      const double d = std::abs(coord(t, c) - coord(t + 1, c));
      m.linearWiggleHeight += d;
      m.quadraticWiggleHeight += d * d;
      if (d > zeroTol) ++m.wiggleCount;
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Step t = 0; t < inst.stepCount(); ++t) {
    for (CharIndex c : inst.ordering(t)) {
      lo = std::min(lo, coord(t, c));
      hi = std::max(hi, coord(t, c));
    }
  }
  m.totalHeight = hi >= lo ? hi - lo : 0.0;
  return m;
}

std::string describe(const NicenessViolation& v, const OrderedStorylineInstance& inst) {
  std::ostringstream os;
  os << "(" << inst.character(v.lower).id << "," << inst.character(v.upper).id << ") at "
     << stepLabel(v.step) << ": ";
  switch (v.kind) {
    case NicenessViolation::Kind::NotIncreasing: os << "not increasing"; break;
    case NicenessViolation::Kind::MeetingSpacing: os << "meeting spacing"; break;
    case NicenessViolation::Kind::FreeSpacing: os << "spacing below minimum"; break;
  }
  os << " (gap " << v.gap << ")";
  return os.str();
}

}  // namespace storyline
