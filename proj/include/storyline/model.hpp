#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace storyline {

/// Index of a character in declaration order.
using CharIndex = std::size_t;
/// Zero-based time step. Files and reports use one-based steps.
using Step = std::size_t;

using CharPair = std::pair<CharIndex, CharIndex>;

/// Raised when an instance violates a structural invariant. `where()` names
/// the offending object (character id, meeting, time step).
class InstanceError : public std::runtime_error {
 public:
  InstanceError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Raised when a coordination is not defined on exactly the active pairs.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ActivityInterval {
  Step first = 0;
  Step last = 0;
  bool contains(Step t) const noexcept { return first <= t && t <= last; }
  std::size_t length() const noexcept { return last - first + 1; }
};

struct Character {
  std::string id;
  ActivityInterval activity;
  std::string group;  // optional, drives palette selection when rendering
};

struct Meeting {
  Step step = 0;
  std::vector<CharIndex> members;
};

struct NicenessParams {
  double delta = 1.0;     // exact spacing inside a meeting
  double deltaBar = 1.0;  // minimum spacing between non-meeting neighbors

  /// Throws std::invalid_argument unless both spacings are finite and > 0.
  void validate() const;
  bool integral() const noexcept;
  double maxSpacing() const noexcept { return delta > deltaBar ? delta : deltaBar; }
};

/// Characters, time steps, meetings and activity intervals.
struct StorylineInstance {
  std::vector<Character> characters;
  std::size_t steps = 0;
  std::vector<Meeting> meetings;

  void validate() const;
};

/// A storyline instance with a fixed bottom-to-top permutation of the active
/// characters at every step. Immutable once constructed.
class OrderedStorylineInstance {
 public:
  OrderedStorylineInstance() = default;

  /// Validates every invariant and builds the position and meeting indexes.
  /// Throws InstanceError.
  OrderedStorylineInstance(StorylineInstance base, std::vector<std::vector<CharIndex>> orderings);

  const StorylineInstance& base() const noexcept { return base_; }
  std::size_t stepCount() const noexcept { return base_.steps; }
  std::size_t characterCount() const noexcept { return base_.characters.size(); }
  const Character& character(CharIndex c) const { return base_.characters.at(c); }
  const std::vector<Meeting>& meetings() const noexcept { return base_.meetings; }
  std::optional<CharIndex> findCharacter(std::string_view id) const;

  bool isActive(Step t, CharIndex c) const { return base_.characters[c].activity.contains(t); }
  std::span<const CharIndex> ordering(Step t) const { return orderings_.at(t); }
  std::size_t activeCount(Step t) const { return orderings_.at(t).size(); }

  /// Position of an active character in the step's ordering (0 = bottom).
  std::size_t position(Step t, CharIndex c) const;

  /// Meeting index holding `c` at step `t`, if any.
  std::optional<std::size_t> meetingOf(Step t, CharIndex c) const;
  bool shareMeeting(Step t, CharIndex a, CharIndex b) const;

  /// Characters active at both t and t+1, in declaration order.
  std::vector<CharIndex> sharedCharacters(Step t) const;

  /// Characters active at every step, in declaration order.
  std::vector<CharIndex> alwaysActive() const;

  /// Sum over steps of the number of active characters.
  std::size_t activePairCount() const noexcept { return activePairs_; }

 private:
  StorylineInstance base_;
  std::vector<std::vector<CharIndex>> orderings_;
  // positions_[t * n + c]; npos when inactive.
  std::vector<std::size_t> positions_;
  std::vector<std::size_t> meetingSlot_;
  std::unordered_map<std::string, CharIndex> byId_;
  std::size_t activePairs_ = 0;
};

/// y-coordinates per (step, character). Inactive slots hold NaN.
class Coordination {
 public:
  Coordination() = default;
  Coordination(std::size_t steps, std::size_t characters);

  /// Coordination for `inst` with every active slot set to `fill`.
  static Coordination forInstance(const OrderedStorylineInstance& inst, double fill = 0.0);

  std::size_t stepCount() const noexcept { return steps_; }
  std::size_t characterCount() const noexcept { return characters_; }

  double operator()(Step t, CharIndex c) const { return values_[t * characters_ + c]; }
  double& at(Step t, CharIndex c) { return values_[t * characters_ + c]; }
  bool defined(Step t, CharIndex c) const;

  std::span<const double> raw() const noexcept { return values_; }

 private:
  std::size_t steps_ = 0;
  std::size_t characters_ = 0;
  std::vector<double> values_;
};

/// Throws DomainError unless `coord` is defined (finite) on exactly the active
/// pairs of `inst`.
void checkDomain(const OrderedStorylineInstance& inst, const Coordination& coord);

struct NeighborSets {
  std::vector<CharPair> all;      // adjacent pairs, lower first
  std::vector<CharPair> meeting;  // adjacent pairs sharing a meeting
  std::vector<CharPair> free;     // the rest
};

NeighborSets neighborSets(const OrderedStorylineInstance& inst, Step t);

struct NicenessViolation {
  enum class Kind { NotIncreasing, MeetingSpacing, FreeSpacing };
  Kind kind;
  Step step;
  CharIndex lower;
  CharIndex upper;
  double gap;
};

struct NicenessReport {
  bool nice = true;
  std::vector<NicenessViolation> violations;
  explicit operator bool() const noexcept { return nice; }
};

inline constexpr double kDefaultNicenessTol = 1e-6;
inline constexpr double kDefaultZeroTol = 1e-9;

NicenessReport isNice(const OrderedStorylineInstance& inst, const Coordination& coord,
                      const NicenessParams& params, double tol = kDefaultNicenessTol);

/// Order-only validity: y strictly increasing along every ordering.
bool isValid(const OrderedStorylineInstance& inst, const Coordination& coord);

struct LayoutMetrics {
  std::size_t wiggleCount = 0;
  double linearWiggleHeight = 0.0;
  double quadraticWiggleHeight = 0.0;
  double totalHeight = 0.0;
};

LayoutMetrics computeMetrics(const OrderedStorylineInstance& inst, const Coordination& coord,
                             double zeroTol = kDefaultZeroTol);

std::string describe(const NicenessViolation& v, const OrderedStorylineInstance& inst);

}  // namespace storyline
