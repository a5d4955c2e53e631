#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace claimtree {

// Small JSON shape descriptor used to validate LLM replies. Objects list their
// required properties; unlisted properties are tolerated.
class Schema {
 public:
  enum class Kind { Any, Object, Array, String, Integer, Number, Boolean };

  static Schema any();
  static Schema object(std::vector<std::pair<std::string, Schema>> required);
  static Schema array(Schema items, std::size_t min_items = 0,
                      std::size_t max_items = std::numeric_limits<std::size_t>::max());
  static Schema string(bool non_empty = false);
  static Schema one_of(std::vector<std::string> allowed);
  static Schema integer(long long min, long long max);
  static Schema number();
  static Schema boolean();

  Kind kind() const { return kind_; }

  // First violation as "path: reason", or nullopt when valid.
  std::optional<std::string> validate(const nlohmann::json& value) const;

  // Example-like rendering of the shape for prompts and error feedback.
  nlohmann::json describe() const;

 private:
  explicit Schema(Kind kind) : kind_(kind) {}
  std::optional<std::string> validate_at(const nlohmann::json& value, const std::string& path) const;

  Kind kind_;
  std::vector<std::pair<std::string, Schema>> properties_;
  std::vector<Schema> items_;  // 0 or 1 element
  std::size_t min_items_ = 0;
  std::size_t max_items_ = std::numeric_limits<std::size_t>::max();
  bool non_empty_ = false;
  std::vector<std::string> allowed_;
  long long min_int_ = 0;
  long long max_int_ = 0;
};

}  // namespace claimtree
