#include "wiacomm/control_api.hpp"

#include <algorithm>

#include <httplib.h>
#include <json.hpp>

namespace wiacomm {

using nlohmann::json;

std::optional<EventHub::Event> EventHub::Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [this] { return closed_ || !pending_.empty(); });
  if (pending_.empty()) return std::nullopt;
  Event event = std::move(pending_.front());
  pending_.pop_front();
  return event;
}

bool EventHub::Subscription::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

std::shared_ptr<EventHub::Subscription> EventHub::subscribe() {
  std::shared_ptr<Subscription> sub(new Subscription(client_buffer_));
  std::lock_guard lock(mutex_);
  subscribers_.push_back(sub);
  return sub;
}

void EventHub::unsubscribe(const std::shared_ptr<Subscription>& sub) {
  close(*sub);
  std::lock_guard lock(mutex_);
  std::erase(subscribers_, sub);
}

void EventHub::close(Subscription& sub) {
  {
    std::lock_guard lock(sub.mutex_);
    sub.closed_ = true;
  }
  sub.cv_.notify_all();
}

void EventHub::publish(const AuditRecord& record) {
  std::lock_guard lock(mutex_);
  Event event{next_id_++, to_json_line(record)};
  for (auto it = subscribers_.begin(); it != subscribers_.end();) {
    Subscription& sub = **it;
    bool overflow = false;
    {
      std::lock_guard sub_lock(sub.mutex_);
      if (sub.pending_.size() >= sub.capacity_) {
        overflow = true;
      } else {
        sub.pending_.push_back(event);
      }
    }
    if (overflow) {
      close(sub);  // slow client
      it = subscribers_.erase(it);
      continue;
    }
    sub.cv_.notify_all();
    ++it;
  }
}

void EventHub::close_all() {
  std::lock_guard lock(mutex_);
  for (const auto& sub : subscribers_) close(*sub);
  subscribers_.clear();
}

std::size_t EventHub::subscriber_count() const {
  std::lock_guard lock(mutex_);
  return subscribers_.size();
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  reply(res, status, json{{"error", code}, {"message", message}});
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw std::invalid_argument("body is not an object");
    return body;
  } catch (const std::exception& e) {
    error(res, 400, "BadRequest", std::string("request body must be a JSON object: ") + e.what());
    return std::nullopt;
  }
}

std::optional<std::string> string_field(const json& body, const char* name) {
  const auto it = body.find(name);
  if (it == body.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

bool constant_time_equal(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  return diff == 0;
}

json ticket_json(const CommandTicket& ticket) {
  json j{{"ticket_id", ticket.ticket_id},
         {"command", encode_command(ticket.command)},
         {"status", to_string(ticket.state)},
         {"attempts", ticket.attempts}};
  if (ticket.code) j["code"] = ticket.code->code;
  return j;
}

json states_json(const DeviceStates& states) {
  json j = json::object();
  for (const auto& [device, bit] : states) j[std::string(wire_name(device))] = bit;
  return j;
}

}  // namespace

ControlApi::ControlApi(Gateway& gateway, ApiConfig config)
    : gateway_(gateway),
      config_(std::move(config)),
      hub_(std::make_shared<EventHub>(config_.client_buffer)),
      server_(std::make_unique<httplib::Server>()) {
  gateway_.add_audit_sink([hub = hub_](const AuditRecord& record) { hub->publish(record); });
  install_routes();
}

ControlApi::~ControlApi() { stop(); }

void ControlApi::install_routes() {
  httplib::Server& srv = *server_;

  srv.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    if (origin.empty()) return;
    const auto& allowed = config_.cors_origins;
    if (std::find(allowed.begin(), allowed.end(), origin) != allowed.end() ||
        std::find(allowed.begin(), allowed.end(), "*") != allowed.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Headers", std::string("Content-Type, ") + kAdminTokenHeader);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
    }
  });
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/api/session", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    const auto mac_text = string_field(*body, "mac");
    if (!mac_text) return error(res, 400, "MalformedMac", "missing \"mac\" field");
    MacAddress mac;
    try {
      mac = parse_mac(*mac_text);
    } catch (const MalformedMac& e) {
      return error(res, 400, "MalformedMac", e.what());
    }
    const SessionOutcome outcome = gateway_.open_session(mac);
    if (const auto* session = std::get_if<Session>(&outcome)) {
      return reply(res, 200, json{{"token", session->token}, {"expires_at", format_iso8601(session->expires_at)}});
    }
    if (const auto* denied = std::get_if<Denied>(&outcome)) {
      return reply(res, 401, json{{"failures", denied->failures_so_far}});
    }
    reply(res, 423, json{{"locked_until", format_iso8601(std::get<DeniedLocked>(outcome).locked_until)}});
  });

  srv.Post("/api/command", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    const auto token = string_field(*body, "token").value_or("");
    const auto command = string_field(*body, "command").value_or("");
    try {
      const CommandTicket ticket = gateway_.submit_command(token, std::string_view(command));
      reply(res, 202, json{{"ticket_id", ticket.ticket_id}});
    } catch (const CommandRejected& e) {
      if (e.reason() == CommandRejected::Reason::InvalidSession) return error(res, 401, "InvalidSession", e.what());
      error(res, 400, "UnknownCommand", e.what());
    }
  });

  srv.Get(R"(/api/command/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, 200, ticket_json(gateway_.poll_ticket(std::stoull(req.matches[1]))));
    } catch (const UnknownTicket& e) {
      error(res, 404, "UnknownTicket", e.what());
    } catch (const std::out_of_range&) {
      error(res, 404, "UnknownTicket", "ticket id out of range");
    }
  });

  srv.Get("/api/devices", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, states_json(gateway_.device_states()));
  });

  srv.Get("/api/logs", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, json{{"transmitter", gateway_.transmitter_lines()}, {"receiver", gateway_.receiver_lines()}});
  });

  srv.Get("/api/events", [this](const httplib::Request&, httplib::Response& res) {
    auto sub = hub_->subscribe();
    std::weak_ptr<EventHub> hub = hub_;
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [sub](std::size_t, httplib::DataSink& sink) {
          if (sub->closed() || !sink.is_writable()) return false;
          if (const auto event = sub->next(std::chrono::milliseconds(500))) {
            const std::string frame = "id: " + std::to_string(event->id) + "\ndata: " + event->json + "\n\n";
            return sink.write(frame.data(), frame.size());
          }
          if (sub->closed()) return false;
          static constexpr char kKeepAlive[] = ": keep-alive\n\n";
          return sink.write(kKeepAlive, sizeof kKeepAlive - 1);
        },
        [sub, hub](bool) {
          if (auto h = hub.lock()) h->unsubscribe(sub);
        });
  });

  auto admin_ok = [this](const httplib::Request& req, httplib::Response& res) {
    if (config_.admin_token.empty() ||
        !constant_time_equal(req.get_header_value(kAdminTokenHeader), config_.admin_token)) {
      error(res, 401, "Unauthorized", "admin token required");
      return false;
    }
    return true;
  };

  srv.Get("/api/allowlist", [this, admin_ok](const httplib::Request& req, httplib::Response& res) {
    if (!admin_ok(req, res)) return;
    json entries = json::array();
    for (const auto& [mac, label] : gateway_.allowlist()) entries.push_back({{"mac", format_mac(mac)}, {"label", label}});
    reply(res, 200, entries);
  });

  srv.Put(R"(/api/allowlist/([^/]+))", [this, admin_ok](const httplib::Request& req, httplib::Response& res) {
    if (!admin_ok(req, res)) return;
    MacAddress mac;
    try {
      mac = parse_mac(req.matches[1].str());
    } catch (const MalformedMac& e) {
      return error(res, 400, "MalformedMac", e.what());
    }
    std::string label;
    if (!req.body.empty()) {
      const auto body = parse_body(req, res);
      if (!body) return;
      label = string_field(*body, "label").value_or("");
    }
    if (!valid_label(label)) return error(res, 400, "BadLabel", "label must be one trimmed line");
    try {
      gateway_.admin_put(mac, label);
    } catch (const StoreError& e) {
      return error(res, 500, "IoError", e.what());
    }
    reply(res, 200, json{{"mac", format_mac(mac)}, {"label", label}});
  });

  srv.Delete(R"(/api/allowlist/([^/]+))", [this, admin_ok](const httplib::Request& req, httplib::Response& res) {
    if (!admin_ok(req, res)) return;
    MacAddress mac;
    try {
      mac = parse_mac(req.matches[1].str());
    } catch (const MalformedMac& e) {
      return error(res, 400, "MalformedMac", e.what());
    }
    try {
      if (!gateway_.admin_remove(mac)) return error(res, 404, "NotFound", format_mac(mac) + " is not registered");
    } catch (const StoreError& e) {
      return error(res, 500, "IoError", e.what());
    }
    reply(res, 200, json{{"mac", format_mac(mac)}});
  });
}

int ControlApi::start() {
  if (config_.port == 0) {
    bound_port_ = server_->bind_to_any_port(config_.host);
  } else {
    bound_port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (bound_port_ < 0) return -1;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound_port_;
}

bool ControlApi::listen() {
  if (config_.port == 0) {
    bound_port_ = server_->bind_to_any_port(config_.host);
  } else {
    bound_port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (bound_port_ < 0) return false;
  return server_->listen_after_bind();
}

void ControlApi::stop() {
  hub_->close_all();
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace wiacomm
