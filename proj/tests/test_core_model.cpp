#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "wiacomm/core_model.hpp"

using namespace wiacomm;

TEST_CASE("parse_mac accepts canonical and lenient forms") {
  const MacAddress mac = parse_mac("AA:BB:CC:DD:EE:FF");
  CHECK(mac.octets() == MacAddress::Octets{0xAA, 0xBB, 0xCC, 0xDD, 0xEE, 0xFF});
  CHECK(parse_mac("00:00:00:00:00:00") == MacAddress{});
  CHECK(parse_mac("aa-bb-cc-dd-ee-ff") == mac);
  CHECK(format_mac(parse_mac("aa-bb-cc-dd-ee-ff")) == "AA:BB:CC:DD:EE:FF");
  CHECK(parse_mac("aA:Bb:cC:dD:Ee:fF") == mac);
}

TEST_CASE("parse_mac rejects malformed text") {
  for (const char* bad : {"AA:BB:CC:DD:EE", "AA:BB:CC:DD:EE:FF:00", "AA:BB:CC:DD:EE:FG", "AAA:BB:CC:DD:EE:F",
                          "AA:BB-CC:DD:EE:FF", "AA.BB.CC.DD.EE.FF", "", "not-a-mac", "AABBCCDDEEFF",
                          " AA:BB:CC:DD:EE:FF", "AA:BB:CC:DD:EE:FF ", "A:BB:CC:DD:EE:FFF"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS((void)parse_mac(bad), MalformedMac);
  }
}

TEST_CASE("format_mac emits canonical uppercase-colon text") {
  CHECK(format_mac(MacAddress{}) == "00:00:00:00:00:00");
  CHECK(format_mac(MacAddress({0x01, 0x23, 0x45, 0x67, 0x89, 0xAB})) == "01:23:45:67:89:AB");
}

TEST_CASE("MAC round trip over random valid strings") {
  std::mt19937_64 rng(7);
  const char* hex = "0123456789abcdefABCDEF";
  for (int i = 0; i < 100000; ++i) {
    const char sep = (rng() & 1) ? ':' : '-';
    std::string text;
    std::string canonical;
    for (int g = 0; g < 6; ++g) {
      if (g > 0) {
        text.push_back(sep);
        canonical.push_back(':');
      }
      for (int d = 0; d < 2; ++d) {
        const char c = hex[rng() % 22];
        text.push_back(c);
        canonical.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      }
    }
    const MacAddress mac = parse_mac(text);
    REQUIRE(format_mac(mac) == canonical);
    REQUIRE(parse_mac(format_mac(mac)) == mac);
  }
}

TEST_CASE("command tokens") {
  CHECK(encode_command({DeviceId::Led1, Action::On}) == "led1_on");
  CHECK(encode_command({DeviceId::Motor, Action::On}) == "motor_on");
  CHECK(encode_command({DeviceId::Led1, Action::Off}) == "led1_off");
  CHECK(encode_command({DeviceId::Led2, Action::Off}) == "led2_off");

  CHECK(decode_command("led2_on") == Command{DeviceId::Led2, Action::On});
  CHECK(decode_command("motor_off") == Command{DeviceId::Motor, Action::Off});
  CHECK_THROWS_AS((void)decode_command("led3_on"), UnknownCommand);
  CHECK_THROWS_AS((void)decode_command("LED1_ON"), UnknownCommand);
  CHECK_THROWS_AS((void)decode_command(""), UnknownCommand);

  for (const Command& cmd : all_commands()) CHECK(decode_command(encode_command(cmd)) == cmd);
}

TEST_CASE("ack codes match the observed receiver transcript and stay injective") {
  CHECK(ack_code({DeviceId::Led1, Action::On}).code == 11);
  CHECK(ack_code({DeviceId::Led1, Action::Off}).code == 10);
  CHECK(ack_code({DeviceId::Motor, Action::On}).code == 31);
  CHECK(ack_code({DeviceId::Led2, Action::On}).code == 21);
  CHECK(ack_code({DeviceId::Led2, Action::Off}).code == 20);

  std::set<int> codes;
  for (const Command& cmd : all_commands()) {
    const int code = ack_code(cmd).code;
    codes.insert(code);
    CHECK(code / 10 == device_index(cmd.device));
    CHECK(code % 10 == static_cast<int>(cmd.action));
  }
  CHECK(codes.size() == 6);
}

TEST_CASE("device naming is a fixed bijection") {
  std::set<std::string_view> wire, display;
  std::set<int> index;
  for (DeviceId d : kAllDevices) {
    wire.insert(wire_name(d));
    display.insert(display_name(d));
    index.insert(device_index(d));
  }
  CHECK(wire == std::set<std::string_view>{"led1", "led2", "motor"});
  CHECK(display == std::set<std::string_view>{"LED1", "LED2", "MOTOR"});
  CHECK(index == std::set<int>{1, 2, 3});
}
