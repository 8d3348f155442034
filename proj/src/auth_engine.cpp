#include "wiacomm/auth_engine.hpp"

namespace wiacomm {

AuthDecision authenticate(const MacAddress& mac, const Allowlist& allowlist, AttemptState& state, Timestamp now,
                          std::chrono::milliseconds lock_duration) {
  auto record_it = state.find(mac);
  if (record_it != state.end() && record_it->second.locked_until) {
    if (now < *record_it->second.locked_until) {
      return AuthDecision{DeniedLocked{*record_it->second.locked_until}, std::nullopt};
    }
    record_it->second = AttemptRecord{};  // lock expired: fresh episode
  }

  if (const auto entry = allowlist.find(mac); entry != allowlist.end()) {
    if (record_it != state.end()) state.erase(record_it);
    return AuthDecision{Granted{entry->second}, std::nullopt};
  }

  AttemptRecord& record = state[mac];
  ++record.consecutive_failures;
  AuthDecision decision{Denied{record.consecutive_failures}, std::nullopt};
  if (record.consecutive_failures == kFailureThreshold && !record.alert_raised) {
    record.alert_raised = true;
    record.locked_until = now + lock_duration;
    decision.alert = AlertEvent{mac, now};
  }
  return decision;
}

void record_success_reset(const MacAddress& mac, AttemptState& state) { state.erase(mac); }

bool is_locked(const MacAddress& mac, const AttemptState& state, Timestamp now) {
  const auto it = state.find(mac);
  return it != state.end() && it->second.locked_until && now < *it->second.locked_until;
}

AuthDecision AuthEngine::authenticate(const MacAddress& mac, const Allowlist& allowlist, Timestamp now) {
  std::lock_guard lock(mutex_);
  return wiacomm::authenticate(mac, allowlist, state_, now, lock_duration_);
}

void AuthEngine::reset(const MacAddress& mac) {
  std::lock_guard lock(mutex_);
  record_success_reset(mac, state_);
}

bool AuthEngine::is_locked(const MacAddress& mac, Timestamp now) const {
  std::lock_guard lock(mutex_);
  return wiacomm::is_locked(mac, state_, now);
}

AttemptState AuthEngine::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

}  // namespace wiacomm
