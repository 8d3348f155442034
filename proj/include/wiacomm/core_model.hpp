#pragma once

// Shared domain vocabulary: MAC addresses, devices, commands and ack codes.

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wiacomm {

/// Thrown by parse_mac for anything that is not six hex pairs.
class MalformedMac : public std::invalid_argument {
 public:
  explicit MalformedMac(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown by decode_command for tokens outside the six-command vocabulary.
class UnknownCommand : public std::invalid_argument {
 public:
  explicit UnknownCommand(const std::string& what) : std::invalid_argument(what) {}
};

/// EUI-48 hardware address, most-significant octet first.
class MacAddress {
 public:
  using Octets = std::array<std::uint8_t, 6>;

  constexpr MacAddress() = default;
  constexpr explicit MacAddress(const Octets& octets) : octets_(octets) {}

  [[nodiscard]] constexpr const Octets& octets() const { return octets_; }

  auto operator<=>(const MacAddress&) const = default;

 private:
  Octets octets_{};
};

/// Accepts six hex pairs separated uniformly by ':' or '-', any case.
[[nodiscard]] MacAddress parse_mac(std::string_view text);

/// Canonical 17-character uppercase, colon-separated form.
[[nodiscard]] std::string format_mac(const MacAddress& mac);

enum class DeviceId : std::uint8_t { Led1 = 1, Led2 = 2, Motor = 3 };

inline constexpr std::array<DeviceId, 3> kAllDevices{DeviceId::Led1, DeviceId::Led2, DeviceId::Motor};

[[nodiscard]] std::string_view wire_name(DeviceId device);
[[nodiscard]] std::string_view display_name(DeviceId device);
[[nodiscard]] constexpr int device_index(DeviceId device) { return static_cast<int>(device); }

enum class Action : std::uint8_t { Off = 0, On = 1 };

struct Command {
  DeviceId device = DeviceId::Led1;
  Action action = Action::Off;

  friend bool operator==(const Command&, const Command&) = default;
};

/// Two-digit acknowledgment: tens digit is the device index, units digit the action bit.
struct AckCode {
  int code = 0;

  friend bool operator==(const AckCode&, const AckCode&) = default;
};

[[nodiscard]] std::string encode_command(const Command& cmd);
[[nodiscard]] Command decode_command(std::string_view token);
[[nodiscard]] constexpr AckCode ack_code(const Command& cmd) {
  return AckCode{device_index(cmd.device) * 10 + static_cast<int>(cmd.action)};
}

/// All six commands in vocabulary order (device-major, On before Off).
[[nodiscard]] const std::array<Command, 6>& all_commands();

}  // namespace wiacomm
