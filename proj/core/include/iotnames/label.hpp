#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace iotnames {

/// Source class of a name list.
enum class NameClass : std::uint8_t { IotM2M, Other };

/// Binary training label; iot-m2m is the positive class.
enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

constexpr std::string_view to_string(NameClass c) noexcept {
  return c == NameClass::IotM2M ? "iot-m2m" : "other";
}

constexpr std::optional<NameClass> parse_name_class(std::string_view text) noexcept {
  if (text == "iot-m2m") return NameClass::IotM2M;
  if (text == "other") return NameClass::Other;
  return std::nullopt;
}

constexpr Label label_of(NameClass c) noexcept {
  return c == NameClass::IotM2M ? Label::Positive : Label::Negative;
}

constexpr NameClass class_of(Label l) noexcept {
  return l == Label::Positive ? NameClass::IotM2M : NameClass::Other;
}

}  // namespace iotnames
