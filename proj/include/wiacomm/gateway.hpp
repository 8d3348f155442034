#pragma once

// Transmitter/control side: session admission, the command queue, and the
// single dispatch loop that owns the simulated link and the application node.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "wiacomm/app_node.hpp"
#include "wiacomm/auth_engine.hpp"
#include "wiacomm/clock.hpp"
#include "wiacomm/core_model.hpp"
#include "wiacomm/link_sim.hpp"
#include "wiacomm/store_audit.hpp"
#include "wiacomm/wire_protocol.hpp"

namespace wiacomm {

inline constexpr std::string_view kStartupBanner = "LoRa initialized successfully.";
inline constexpr std::string_view kSendingPrefix = "Sending command: ";

struct Session {
  std::string token;  // 32 lowercase hex digits
  MacAddress mac;
  Timestamp created_at;
  Timestamp expires_at;
};

enum class TicketState : std::uint8_t { Queued, Sent, Acked, Failed };

[[nodiscard]] std::string_view to_string(TicketState state);

struct CommandTicket {
  std::uint64_t ticket_id = 0;
  Command command;
  MacAddress mac;  // of the session that submitted it
  std::uint8_t seq = 0;
  TicketState state = TicketState::Queued;
  std::optional<AckCode> code;  // set when Acked
  int attempts = 0;
};

class CommandRejected : public std::runtime_error {
 public:
  enum class Reason { InvalidSession, UnknownCommand };

  CommandRejected(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  [[nodiscard]] Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

class UnknownTicket : public std::out_of_range {
 public:
  explicit UnknownTicket(std::uint64_t id) : std::out_of_range("unknown ticket " + std::to_string(id)) {}
};

using SessionOutcome = std::variant<Session, Denied, DeniedLocked>;

struct GatewayConfig {
  LinkConfig link;
  std::optional<ArqPolicy> arq;  // defaults derived from `link`
  std::chrono::milliseconds session_lifetime = std::chrono::hours(1);
  std::chrono::milliseconds lock_duration = kDefaultLockDuration;
  /// Seed for session tokens; a random device seeds it when unset.
  std::optional<std::uint64_t> token_seed;
  /// Where admin allowlist edits are persisted; edits stay in memory when unset.
  std::optional<std::filesystem::path> allowlist_path;
};

/// Line-oriented transmitter log: bounded in-memory copy plus optional sinks.
class TransmitterLog {
 public:
  static constexpr std::size_t kCapacity = 1000;

  void add_sink(std::function<void(std::string_view)> sink);
  void append(std::string line);
  [[nodiscard]] std::vector<std::string> lines() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> lines_;
  std::vector<std::function<void(std::string_view)>> sinks_;
};

class Gateway {
 public:
  using AuditSink = std::function<void(const AuditRecord&)>;

  /// Validates the link configuration (throws InvalidLinkConfig) and then
  /// writes the startup banner.
  Gateway(GatewayConfig config, Allowlist allowlist, ClockFn clock,
          std::function<void(std::string_view)> transmitter_sink = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void add_audit_sink(AuditSink sink);

  SessionOutcome open_session(const MacAddress& mac);

  /// Throws CommandRejected.
  CommandTicket submit_command(std::string_view token, const Command& cmd);
  CommandTicket submit_command(std::string_view token, std::string_view command_token);

  /// Throws UnknownTicket.
  [[nodiscard]] CommandTicket poll_ticket(std::uint64_t ticket_id) const;

  /// Runs the head of the queue to completion. Returns false when the queue is empty.
  bool dispatch_one();
  /// Dispatches until the queue is empty.
  void drain();

  /// Runs the dispatch loop on a background thread until stop() or destruction.
  void start_dispatcher();
  void stop_dispatcher();
  /// Blocks until the queue is empty and nothing is in flight.
  void wait_idle();

  // Admin operations; each persists (when configured) and is audited.
  [[nodiscard]] Allowlist allowlist() const;
  void admin_put(const MacAddress& mac, const std::string& label);
  /// Returns false when `mac` was not registered.
  bool admin_remove(const MacAddress& mac);

  [[nodiscard]] DeviceStates device_states() const { return node_.states(); }
  [[nodiscard]] std::vector<std::string> transmitter_lines() const { return tx_log_.lines(); }
  [[nodiscard]] std::vector<std::string> receiver_lines() const { return node_.log_lines(); }
  [[nodiscard]] AppNode& node() { return node_; }
  [[nodiscard]] Medium& medium() { return medium_; }
  [[nodiscard]] const ArqPolicy& arq_policy() const { return arq_; }
  [[nodiscard]] Timestamp now() const { return clock_(); }

 private:
  void emit(AuditKind kind, std::optional<MacAddress> mac, std::string detail);
  std::string mint_token();

  GatewayConfig config_;
  ClockFn clock_;
  Medium medium_;
  ArqPolicy arq_;
  AppNode node_;
  TransmitterLog tx_log_;
  AuthEngine auth_;

  std::mutex audit_mutex_;
  std::vector<AuditSink> audit_sinks_;

  mutable std::mutex mutex_;  // guards everything below
  std::condition_variable queue_cv_;
  Allowlist allowlist_;
  std::map<std::string, Session, std::less<>> sessions_;
  std::map<std::uint64_t, CommandTicket> tickets_;
  std::deque<std::uint64_t> queue_;
  std::uint64_t next_ticket_id_ = 1;
  std::uint8_t next_seq_ = 0;
  bool in_flight_ = false;
  std::mt19937_64 token_rng_;

  std::mutex dispatch_mutex_;  // serializes use of medium_
  bool stopping_ = false;
  std::thread dispatcher_;
};

}  // namespace wiacomm
