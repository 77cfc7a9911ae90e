#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "storyline/model.hpp"

namespace storyline {

/// Syntax error in an instance document. Line and column are 1-based.
class ParseError : public InstanceError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : InstanceError("line " + std::to_string(line) + ", column " + std::to_string(column), what),
        line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct InstanceDocument {
  OrderedStorylineInstance instance;
  std::optional<NicenessParams> params;

  NicenessParams paramsOrDefault() const { return params.value_or(NicenessParams{}); }
};

/// Parses the JSON instance format:
///
///   { "characters": [ {"id": "a", "activeFrom": 1, "activeTo": 3, "group": "x"} ],
///     "meetings":   [ {"t": 2, "members": ["a", "b"]} ],
///     "orderings":  [ ["a", "b"], ["b", "a"], ... ],
///     "params":     {"delta": 1, "deltaBar": 1} }
///
/// Time steps are 1-based. `activeSteps: [..]` may replace activeFrom/activeTo
/// but must be contiguous. The step count is the number of orderings unless
/// `timeSteps` is given.
InstanceDocument parseInstanceDocument(std::string_view text);
OrderedStorylineInstance parseInstance(std::string_view text);
InstanceDocument loadInstance(const std::filesystem::path& path);

std::string serializeInstance(const OrderedStorylineInstance& inst,
                              const std::optional<NicenessParams>& params = std::nullopt);

}  // namespace storyline
