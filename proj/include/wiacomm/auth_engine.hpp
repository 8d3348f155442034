#pragma once

// Admission control by MAC allowlist with per-MAC consecutive-failure lockout.

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>

#include "wiacomm/clock.hpp"
#include "wiacomm/core_model.hpp"

namespace wiacomm {

/// Registered MACs with optional labels.
using Allowlist = std::map<MacAddress, std::string>;

/// Consecutive failures that raise the alert and start a lock episode.
inline constexpr int kFailureThreshold = 3;

inline constexpr std::chrono::milliseconds kDefaultLockDuration = std::chrono::seconds(300);

struct AttemptRecord {
  int consecutive_failures = 0;
  std::optional<Timestamp> locked_until;
  bool alert_raised = false;

  friend bool operator==(const AttemptRecord&, const AttemptRecord&) = default;
};

/// Per-MAC attempt ledger. MACs without an entry are in the default record state.
using AttemptState = std::map<MacAddress, AttemptRecord>;

struct AlertEvent {
  MacAddress mac;
  Timestamp at;

  friend bool operator==(const AlertEvent&, const AlertEvent&) = default;
};

struct Granted {
  std::string label;

  friend bool operator==(const Granted&, const Granted&) = default;
};

struct Denied {
  int failures_so_far = 0;

  friend bool operator==(const Denied&, const Denied&) = default;
};

struct DeniedLocked {
  Timestamp locked_until;

  friend bool operator==(const DeniedLocked&, const DeniedLocked&) = default;
};

struct AuthDecision {
  std::variant<Granted, Denied, DeniedLocked> outcome;
  std::optional<AlertEvent> alert;

  [[nodiscard]] bool granted() const { return std::holds_alternative<Granted>(outcome); }

  friend bool operator==(const AuthDecision&, const AuthDecision&) = default;
};

/// Decides admission for `mac` and updates `state` in place.
///
/// A live lock yields DeniedLocked without counting. An expired lock ends the
/// episode before the attempt is evaluated. The failure that brings the count
/// to kFailureThreshold carries the episode's only AlertEvent and locks the MAC
/// until `now + lock_duration`.
[[nodiscard]] AuthDecision authenticate(const MacAddress& mac, const Allowlist& allowlist, AttemptState& state,
                                        Timestamp now,
                                        std::chrono::milliseconds lock_duration = kDefaultLockDuration);

/// Clears the failure count and any lock for `mac`.
void record_success_reset(const MacAddress& mac, AttemptState& state);

[[nodiscard]] bool is_locked(const MacAddress& mac, const AttemptState& state, Timestamp now);

/// Serializes authenticate calls from concurrent sessions over one ledger.
class AuthEngine {
 public:
  explicit AuthEngine(std::chrono::milliseconds lock_duration = kDefaultLockDuration)
      : lock_duration_(lock_duration) {}

  AuthDecision authenticate(const MacAddress& mac, const Allowlist& allowlist, Timestamp now);
  void reset(const MacAddress& mac);
  [[nodiscard]] bool is_locked(const MacAddress& mac, Timestamp now) const;
  [[nodiscard]] AttemptState snapshot() const;
  [[nodiscard]] std::chrono::milliseconds lock_duration() const { return lock_duration_; }

 private:
  std::chrono::milliseconds lock_duration_;
  mutable std::mutex mutex_;
  AttemptState state_;
};

}  // namespace wiacomm
