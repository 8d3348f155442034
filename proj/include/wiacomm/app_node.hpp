#pragma once

// Receiver side: decodes command frames, drives the device bank, answers with ACK frames.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wiacomm/core_model.hpp"
#include "wiacomm/link_sim.hpp"

namespace wiacomm {

struct DeviceBank {
  Action led1 = Action::Off;
  Action led2 = Action::Off;
  Action motor = Action::Off;

  [[nodiscard]] Action get(DeviceId device) const;
  void set(DeviceId device, Action action);

  friend bool operator==(const DeviceBank&, const DeviceBank&) = default;
};

/// Device -> state bit (0 or 1).
using DeviceStates = std::map<DeviceId, int>;

struct Execution {
  DeviceBank bank;
  AckCode ack;
  std::string echo_line;  // "<DISPLAY_NAME> <bit>"
  std::string code_line;  // "<ack code>"
};

[[nodiscard]] Execution execute(const Command& cmd, DeviceBank bank);

[[nodiscard]] DeviceStates query_states(const DeviceBank& bank);

/// Receiver log: bounded in-memory ring plus an optional line sink (stdout, file).
class ReceiverLog {
 public:
  static constexpr std::size_t kDefaultCapacity = 1000;

  explicit ReceiverLog(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {}

  void set_sink(std::function<void(std::string_view)> sink) { sink_ = std::move(sink); }
  void append(std::string line);
  [[nodiscard]] const std::deque<std::string>& lines() const { return lines_; }

 private:
  std::size_t capacity_;
  std::deque<std::string> lines_;
  std::function<void(std::string_view)> sink_;
};

class AppNode {
 public:
  AppNode() = default;

  /// Handles one raw downlink frame. Corrupt or non-command frames are dropped
  /// (nullopt). A repeated seq re-emits the previous ACK without executing.
  std::optional<Bytes> on_frame(std::span<const std::uint8_t> bytes);

  void set_log_sink(std::function<void(std::string_view)> sink);
  /// Called once per executed command.
  void on_execute(std::function<void(std::uint8_t seq, const Command&)> observer);

  [[nodiscard]] DeviceBank bank() const;
  [[nodiscard]] DeviceStates states() const;
  [[nodiscard]] std::vector<std::string> log_lines() const;

 private:
  mutable std::mutex mutex_;
  DeviceBank bank_;
  std::optional<std::uint8_t> last_seq_;
  Bytes last_ack_;
  ReceiverLog log_;
  std::function<void(std::uint8_t, const Command&)> execute_observer_;
};

}  // namespace wiacomm
