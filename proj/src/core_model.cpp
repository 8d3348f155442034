#include "wiacomm/core_model.hpp"

namespace wiacomm {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

MacAddress parse_mac(std::string_view text) {
  if (text.size() != 17) {
    throw MalformedMac("malformed MAC '" + std::string(text) + "': expected six hex pairs");
  }
  const char sep = text[2];
  if (sep != ':' && sep != '-') {
    throw MalformedMac("malformed MAC '" + std::string(text) + "': bad separator");
  }
  MacAddress::Octets octets{};
  for (std::size_t group = 0; group < 6; ++group) {
    const std::size_t pos = group * 3;
    if (group > 0 && text[pos - 1] != sep) {
      throw MalformedMac("malformed MAC '" + std::string(text) + "': bad separator");
    }
    const int hi = hex_value(text[pos]);
    const int lo = hex_value(text[pos + 1]);
    if (hi < 0 || lo < 0) {
      throw MalformedMac("malformed MAC '" + std::string(text) + "': non-hex digit");
    }
    octets[group] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return MacAddress(octets);
}

std::string format_mac(const MacAddress& mac) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(17);
  for (std::size_t i = 0; i < 6; ++i) {
    if (i > 0) out.push_back(':');
    out.push_back(kDigits[mac.octets()[i] >> 4]);
    out.push_back(kDigits[mac.octets()[i] & 0x0F]);
  }
  return out;
}

std::string_view wire_name(DeviceId device) {
  switch (device) {
    case DeviceId::Led1: return "led1";
    case DeviceId::Led2: return "led2";
    case DeviceId::Motor: return "motor";
  }
  return "?";
}

std::string_view display_name(DeviceId device) {
  switch (device) {
    case DeviceId::Led1: return "LED1";
    case DeviceId::Led2: return "LED2";
    case DeviceId::Motor: return "MOTOR";
  }
  return "?";
}

std::string encode_command(const Command& cmd) {
  std::string token(wire_name(cmd.device));
  token += cmd.action == Action::On ? "_on" : "_off";
  return token;
}

Command decode_command(std::string_view token) {
  for (const Command& cmd : all_commands()) {
    if (encode_command(cmd) == token) return cmd;
  }
  throw UnknownCommand("unknown command '" + std::string(token) + "'");
}

const std::array<Command, 6>& all_commands() {
  static const std::array<Command, 6> kCommands{{
      {DeviceId::Led1, Action::On},
      {DeviceId::Led1, Action::Off},
      {DeviceId::Led2, Action::On},
      {DeviceId::Led2, Action::Off},
      {DeviceId::Motor, Action::On},
      {DeviceId::Motor, Action::Off},
  }};
  return kCommands;
}

}  // namespace wiacomm
