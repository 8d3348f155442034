#include "wiacomm/gateway.hpp"

#include <cstdio>

namespace wiacomm {

std::string_view to_string(TicketState state) {
  switch (state) {
    case TicketState::Queued: return "Queued";
    case TicketState::Sent: return "Sent";
    case TicketState::Acked: return "Acked";
    case TicketState::Failed: return "Failed";
  }
  return "?";
}

void TransmitterLog::add_sink(std::function<void(std::string_view)> sink) {
  std::lock_guard lock(mutex_);
  sinks_.push_back(std::move(sink));
}

void TransmitterLog::append(std::string line) {
  std::lock_guard lock(mutex_);
  for (const auto& sink : sinks_) sink(line);
  lines_.push_back(std::move(line));
  while (lines_.size() > kCapacity) lines_.pop_front();
}

std::vector<std::string> TransmitterLog::lines() const {
  std::lock_guard lock(mutex_);
  return {lines_.begin(), lines_.end()};
}

Gateway::Gateway(GatewayConfig config, Allowlist allowlist, ClockFn clock,
                 std::function<void(std::string_view)> transmitter_sink)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      medium_(config_.link),
      arq_(config_.arq.value_or(ArqPolicy::defaults_for(config_.link))),
      auth_(config_.lock_duration),
      allowlist_(std::move(allowlist)) {
  if (config_.token_seed) {
    token_rng_.seed(*config_.token_seed);
  } else {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd()};
    token_rng_.seed(seq);
  }
  if (transmitter_sink) tx_log_.add_sink(std::move(transmitter_sink));
  tx_log_.append(std::string(kStartupBanner));
}

Gateway::~Gateway() { stop_dispatcher(); }

void Gateway::add_audit_sink(AuditSink sink) {
  std::lock_guard lock(audit_mutex_);
  audit_sinks_.push_back(std::move(sink));
}

void Gateway::emit(AuditKind kind, std::optional<MacAddress> mac, std::string detail) {
  std::lock_guard lock(audit_mutex_);
  const AuditRecord record{clock_(), kind, mac, std::move(detail)};
  for (const auto& sink : audit_sinks_) sink(record);
}

std::string Gateway::mint_token() {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(token_rng_()),
                static_cast<unsigned long long>(token_rng_()));
  return buf;
}

SessionOutcome Gateway::open_session(const MacAddress& mac) {
  // Audit records are emitted under the table lock so their order matches the decision order.
  std::lock_guard lock(mutex_);
  const Timestamp now = clock_();
  const AuthDecision decision = auth_.authenticate(mac, allowlist_, now);

  if (const auto* granted = std::get_if<Granted>(&decision.outcome)) {
    Session session{mint_token(), mac, now, now + config_.session_lifetime};
    sessions_.emplace(session.token, session);
    emit(AuditKind::AuthGranted, mac, granted->label);
    return session;
  }
  if (const auto* denied = std::get_if<Denied>(&decision.outcome)) {
    emit(AuditKind::AuthDenied, mac, "failures=" + std::to_string(denied->failures_so_far));
    if (decision.alert) {
      emit(AuditKind::Alert, mac, "failures=" + std::to_string(denied->failures_so_far));
    }
    return *denied;
  }
  const auto& locked = std::get<DeniedLocked>(decision.outcome);
  emit(AuditKind::AuthDenied, mac, "locked_until=" + format_iso8601(locked.locked_until));
  return locked;
}

CommandTicket Gateway::submit_command(std::string_view token, std::string_view command_token) {
  Command cmd;
  try {
    cmd = decode_command(command_token);
  } catch (const UnknownCommand& e) {
    throw CommandRejected(CommandRejected::Reason::UnknownCommand, e.what());
  }
  return submit_command(token, cmd);
}

CommandTicket Gateway::submit_command(std::string_view token, const Command& cmd) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(token);
  if (it == sessions_.end()) {
    throw CommandRejected(CommandRejected::Reason::InvalidSession, "invalid session");
  }
  if (clock_() >= it->second.expires_at) {
    sessions_.erase(it);
    throw CommandRejected(CommandRejected::Reason::InvalidSession, "session expired");
  }
  CommandTicket ticket{next_ticket_id_++, cmd, it->second.mac, next_seq_++, TicketState::Queued, std::nullopt, 0};
  tickets_.emplace(ticket.ticket_id, ticket);
  queue_.push_back(ticket.ticket_id);
  queue_cv_.notify_all();
  return ticket;
}

CommandTicket Gateway::poll_ticket(std::uint64_t ticket_id) const {
  std::lock_guard lock(mutex_);
  const auto it = tickets_.find(ticket_id);
  if (it == tickets_.end()) throw UnknownTicket(ticket_id);
  return it->second;
}

bool Gateway::dispatch_one() {
  std::lock_guard dispatch_lock(dispatch_mutex_);
  CommandTicket ticket;
  {
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return false;
    const std::uint64_t id = queue_.front();
    queue_.pop_front();
    CommandTicket& stored = tickets_.at(id);
    stored.state = TicketState::Sent;
    ticket = stored;
    in_flight_ = true;
  }

  const std::string token = encode_command(ticket.command);
  tx_log_.append(std::string(kSendingPrefix) + token);
  emit(AuditKind::CommandSent, ticket.mac, token);

  const AckResult result = arq_send(
      ticket.command, ticket.seq, medium_, [this](std::span<const std::uint8_t> bytes) { return node_.on_frame(bytes); },
      arq_);

  {
    std::lock_guard lock(mutex_);
    CommandTicket& stored = tickets_.at(ticket.ticket_id);
    if (const auto* acked = std::get_if<Acked>(&result)) {
      stored.state = TicketState::Acked;
      stored.code = acked->code;
      stored.attempts = acked->attempts;
    } else {
      stored.state = TicketState::Failed;
      stored.attempts = std::get<Failed>(result).attempts;
    }
    ticket = stored;
  }

  if (ticket.state == TicketState::Acked) {
    emit(AuditKind::CommandAcked, ticket.mac, token + " " + std::to_string(ticket.code->code));
  } else {
    emit(AuditKind::CommandFailed, ticket.mac, token);
  }

  {
    std::lock_guard lock(mutex_);
    in_flight_ = false;
  }
  queue_cv_.notify_all();
  return true;
}

void Gateway::drain() {
  while (dispatch_one()) {
  }
}

void Gateway::start_dispatcher() {
  std::lock_guard lock(mutex_);
  if (dispatcher_.joinable()) return;
  stopping_ = false;
  dispatcher_ = std::thread([this] {
    while (true) {
      {
        std::unique_lock lock(mutex_);
        queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
      }
      dispatch_one();
    }
  });
}

void Gateway::stop_dispatcher() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (dispatcher_.joinable()) dispatcher_.join();
}

void Gateway::wait_idle() {
  std::unique_lock lock(mutex_);
  queue_cv_.wait(lock, [this] { return queue_.empty() && !in_flight_; });
}

Allowlist Gateway::allowlist() const {
  std::lock_guard lock(mutex_);
  return allowlist_;
}

void Gateway::admin_put(const MacAddress& mac, const std::string& label) {
  std::lock_guard lock(mutex_);
  Allowlist updated = allowlist_;
  updated[mac] = label;
  if (config_.allowlist_path) save_allowlist(updated, *config_.allowlist_path);
  allowlist_ = std::move(updated);
  auth_.reset(mac);
  emit(AuditKind::AdminAdd, mac, label);
}

bool Gateway::admin_remove(const MacAddress& mac) {
  std::lock_guard lock(mutex_);
  if (!allowlist_.contains(mac)) return false;
  Allowlist updated = allowlist_;
  updated.erase(mac);
  if (config_.allowlist_path) save_allowlist(updated, *config_.allowlist_path);
  allowlist_ = std::move(updated);
  emit(AuditKind::AdminRemove, mac, "");
  return true;
}

}  // namespace wiacomm
