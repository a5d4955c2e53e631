#include "claimtree/schema.hpp"

namespace claimtree {

using nlohmann::json;

Schema Schema::any() { return Schema(Kind::Any); }

Schema Schema::object(std::vector<std::pair<std::string, Schema>> required) {
  Schema s(Kind::Object);
  s.properties_ = std::move(required);
  return s;
}

Schema Schema::array(Schema items, std::size_t min_items, std::size_t max_items) {
  Schema s(Kind::Array);
  s.items_.push_back(std::move(items));
  s.min_items_ = min_items;
  s.max_items_ = max_items;
  return s;
}

Schema Schema::string(bool non_empty) {
  Schema s(Kind::String);
  s.non_empty_ = non_empty;
  return s;
}

Schema Schema::one_of(std::vector<std::string> allowed) {
  Schema s(Kind::String);
  s.allowed_ = std::move(allowed);
  return s;
}

Schema Schema::integer(long long min, long long max) {
  Schema s(Kind::Integer);
  s.min_int_ = min;
  s.max_int_ = max;
  return s;
}

Schema Schema::number() { return Schema(Kind::Number); }
Schema Schema::boolean() { return Schema(Kind::Boolean); }

std::optional<std::string> Schema::validate(const json& value) const { return validate_at(value, "$"); }

std::optional<std::string> Schema::validate_at(const json& value, const std::string& path) const {
  switch (kind_) {
    case Kind::Any:
      return std::nullopt;
    case Kind::Object: {
      if (!value.is_object()) return path + ": expected an object";
      for (const auto& [name, sub] : properties_) {
        if (!value.contains(name)) return path + ": missing required key '" + name + "'";
        if (auto err = sub.validate_at(value.at(name), path + "." + name)) return err;
      }
      return std::nullopt;
    }
    case Kind::Array: {
      if (!value.is_array()) return path + ": expected a list";
      if (value.size() < min_items_) {
        return path + ": expected at least " + std::to_string(min_items_) + " items, got " +
               std::to_string(value.size());
      }
      if (value.size() > max_items_) {
        return path + ": expected at most " + std::to_string(max_items_) + " items, got " +
               std::to_string(value.size());
      }
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (auto err = items_.front().validate_at(value[i], path + "[" + std::to_string(i) + "]")) {
          return err;
        }
      }
      return std::nullopt;
    }
    case Kind::String: {
      if (!value.is_string()) return path + ": expected a string";
      const auto& s = value.get_ref<const std::string&>();
      if (non_empty_ && s.empty()) return path + ": expected a non-empty string";
      if (!allowed_.empty()) {
        for (const auto& a : allowed_) {
          if (a == s) return std::nullopt;
        }
        std::string opts;
        for (const auto& a : allowed_) opts += (opts.empty() ? "" : ", ") + a;
        return path + ": '" + s + "' is not one of {" + opts + "}";
      }
      return std::nullopt;
    }
    case Kind::Integer: {
      if (!value.is_number_integer()) return path + ": expected an integer";
      auto v = value.get<long long>();
      if (v < min_int_ || v > max_int_) {
        return path + ": " + std::to_string(v) + " outside [" + std::to_string(min_int_) + ", " +
               std::to_string(max_int_) + "]";
      }
      return std::nullopt;
    }
    case Kind::Number:
      if (!value.is_number()) return path + ": expected a number";
      return std::nullopt;
    case Kind::Boolean:
      if (!value.is_boolean()) return path + ": expected true or false";
      return std::nullopt;
  }
  return std::nullopt;
}

json Schema::describe() const {
  switch (kind_) {
    case Kind::Any: return "any";
    case Kind::Object: {
      json out = json::object();
      for (const auto& [name, sub] : properties_) out[name] = sub.describe();
      return out;
    }
    case Kind::Array: return json::array({items_.front().describe()});
    case Kind::String: {
      if (allowed_.empty()) return "string";
      std::string opts;
      for (const auto& a : allowed_) opts += (opts.empty() ? "" : " | ") + a;
      return opts;
    }
    case Kind::Integer:
      return "integer " + std::to_string(min_int_) + ".." + std::to_string(max_int_);
    case Kind::Number: return "number";
    case Kind::Boolean: return "true | false";
  }
  return "any";
}

}  // namespace claimtree
