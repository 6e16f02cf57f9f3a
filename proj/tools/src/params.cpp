#include "params.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdlab/errors.hpp"

namespace qdlab::cli {

namespace {

std::string bad(const ParamSpec& spec, const std::string& what) { return "parameter '" + spec.name + "': " + what; }

template <class T>
T parse_integral(const ParamSpec& spec, const std::string& token) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  require(ec == std::errc() && ptr == end, bad(spec, "expected an integer, got '" + token + "'"));
  return value;
}

double parse_double(const ParamSpec& spec, const std::string& token) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  require(ec == std::errc() && ptr == end && std::isfinite(value),
          bad(spec, "expected a finite number, got '" + token + "'"));
  return value;
}

}  // namespace

json parse_token(const ParamSpec& spec, const std::string& token) {
  switch (spec.type) {
    case ParamType::kInt:
      return parse_integral<std::int64_t>(spec, token);
    case ParamType::kUInt:
      return parse_integral<std::uint64_t>(spec, token);
    case ParamType::kDouble:
      return parse_double(spec, token);
    case ParamType::kOptionalDouble:
      if (token == "none") return nullptr;
      return parse_double(spec, token);
    case ParamType::kString:
      return token;
    case ParamType::kBool:
      if (token == "true" || token == "1") return true;
      if (token == "false" || token == "0") return false;
      throw InvalidArgument(bad(spec, "expected true or false, got '" + token + "'"));
    case ParamType::kIntList: {
      json list = json::array();
      std::stringstream in(token);
      std::string item;
      while (std::getline(in, item, ',')) list.push_back(parse_integral<int>(spec, item));
      require(!list.empty(), bad(spec, "expected a comma-separated list of integers"));
      return list;
    }
  }
  throw InvalidArgument(bad(spec, "unknown parameter type"));
}

json coerce(const ParamSpec& spec, const json& value) {
  const auto integral = [&](const json& v) {
    if (v.is_number_integer()) return v;
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) return json(static_cast<std::int64_t>(x));
    }
    throw InvalidArgument(bad(spec, "expected an integer, got " + v.dump()));
  };
  switch (spec.type) {
    case ParamType::kInt: {
      return integral(value);
    }
    case ParamType::kUInt: {
      const json v = integral(value);
      require(v.is_number_unsigned() || v.get<std::int64_t>() >= 0, bad(spec, "expected a non-negative integer"));
      return json(v.get<std::uint64_t>());
    }
    case ParamType::kDouble:
      require(value.is_number(), bad(spec, "expected a number, got " + value.dump()));
      return value.get<double>();
    case ParamType::kOptionalDouble:
      if (value.is_null()) return nullptr;
      require(value.is_number(), bad(spec, "expected a number or null, got " + value.dump()));
      return value.get<double>();
    case ParamType::kString:
      require(value.is_string(), bad(spec, "expected a string, got " + value.dump()));
      return value;
    case ParamType::kBool:
      require(value.is_boolean(), bad(spec, "expected a boolean, got " + value.dump()));
      return value;
    case ParamType::kIntList: {
      require(value.is_array() && !value.empty(), bad(spec, "expected a non-empty array of integers"));
      json out = json::array();
      for (const auto& v : value) out.push_back(integral(v));
      return out;
    }
  }
  throw InvalidArgument(bad(spec, "unknown parameter type"));
}

Params::Params(const std::vector<ParamSpec>& specs, const json& from_config,
               const std::map<std::string, std::string>& from_flags)
    : values_(json::object()) {
  require(from_config.is_null() || from_config.is_object(), "config: 'params' must be an object");
  if (from_config.is_object()) {
    for (const auto& [key, _] : from_config.items()) {
      bool known = false;
      for (const auto& s : specs) known = known || s.name == key;
      require(known, "config: unknown parameter '" + key + "'");
    }
  }
  for (const auto& spec : specs) {
    json value = coerce(spec, spec.default_value);
    if (from_config.is_object() && from_config.contains(spec.name)) value = coerce(spec, from_config.at(spec.name));
    if (const auto it = from_flags.find(spec.name); it != from_flags.end()) value = parse_token(spec, it->second);
    values_[spec.name] = std::move(value);
  }
}

const json& Params::at(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw std::logic_error("undeclared parameter " + name);
  return *it;
}

std::int64_t Params::integer(const std::string& name) const { return at(name).get<std::int64_t>(); }
std::uint64_t Params::unsigned_integer(const std::string& name) const { return at(name).get<std::uint64_t>(); }
double Params::real(const std::string& name) const { return at(name).get<double>(); }
std::optional<double> Params::optional_real(const std::string& name) const {
  const auto& v = at(name);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}
const std::string& Params::text(const std::string& name) const { return at(name).get_ref<const std::string&>(); }
bool Params::flag(const std::string& name) const { return at(name).get<bool>(); }
std::vector<int> Params::int_list(const std::string& name) const { return at(name).get<std::vector<int>>(); }

}  // namespace qdlab::cli
