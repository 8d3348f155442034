#pragma once

// Scripted lossless run of the four-command demonstration.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>
#include <string>

#include "wiacomm/app_node.hpp"
#include "wiacomm/core_model.hpp"

namespace wiacomm {

inline constexpr std::array<std::string_view, 5> kDemoTransmitterLog{
    "LoRa initialized successfully.", "Sending command: led1_on", "Sending command: led2_on",
    "Sending command: motor_on", "Sending command: led1_off",
};

inline constexpr std::array<std::string_view, 8> kDemoReceiverLog{
    "LED1 1", "11", "LED2 1", "21", "MOTOR 1", "31", "LED1 0", "10",
};

inline constexpr std::array<std::string_view, 4> kDemoScript{"led1_on", "led2_on", "motor_on", "led1_off"};

/// Registered controller used by the demo run.
inline constexpr std::string_view kDemoMac = "02:00:00:00:00:01";

struct DemoResult {
  std::vector<std::string> transmitter;
  std::vector<std::string> receiver;
  DeviceStates final_states;

  [[nodiscard]] bool transmitter_matches() const;
  [[nodiscard]] bool receiver_matches() const;
  [[nodiscard]] bool matches() const { return transmitter_matches() && receiver_matches(); }
};

[[nodiscard]] DemoResult run_demo(std::uint64_t seed = 1);

}  // namespace wiacomm
