#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qdlab::cli {

using nlohmann::json;

enum class ParamType { kInt, kUInt, kDouble, kOptionalDouble, kString, kBool, kIntList };

struct ParamSpec {
  std::string name;
  ParamType type;
  json default_value;
  std::string help;
};

/// Converts a command-line token to the JSON value of the declared type.
/// Throws InvalidArgument with the parameter name on malformed input.
json parse_token(const ParamSpec& spec, const std::string& token);

/// Checks a JSON value against the declared type, normalising integral
/// doubles such as 2.0 for integer parameters.
json coerce(const ParamSpec& spec, const json& value);

/// Resolved parameter record: defaults, then the config file, then flags.
class Params {
 public:
  Params(const std::vector<ParamSpec>& specs, const json& from_config,
         const std::map<std::string, std::string>& from_flags);

  const json& as_json() const { return values_; }

  std::int64_t integer(const std::string& name) const;
  std::uint64_t unsigned_integer(const std::string& name) const;
  double real(const std::string& name) const;
  std::optional<double> optional_real(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  bool flag(const std::string& name) const;
  std::vector<int> int_list(const std::string& name) const;

 private:
  const json& at(const std::string& name) const;
  json values_;
};

}  // namespace qdlab::cli
