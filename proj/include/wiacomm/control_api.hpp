#pragma once

// HTTP control plane: sessions, commands, device snapshot, live audit event
// stream (server-sent events) and the admin-only allowlist endpoints.

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wiacomm/gateway.hpp"
#include "wiacomm/store_audit.hpp"

namespace httplib {
class Server;
}

namespace wiacomm {

inline constexpr const char* kAdminTokenEnv = "WIA_ADMIN_TOKEN";
inline constexpr const char* kAdminTokenHeader = "X-Admin-Token";

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
  /// Empty disables every admin endpoint.
  std::string admin_token;
  std::vector<std::string> cors_origins;
  /// Pending events per stream client before it is disconnected.
  std::size_t client_buffer = 256;
};

/// Fan-out of audit records to stream clients. publish() never blocks on a
/// client: a subscriber whose buffer is full is closed instead.
class EventHub {
 public:
  struct Event {
    std::uint64_t id = 0;
    std::string json;
  };

  class Subscription {
   public:
    /// Waits up to `timeout` for the next event. nullopt on timeout or when closed.
    std::optional<Event> next(std::chrono::milliseconds timeout);
    [[nodiscard]] bool closed() const;

   private:
    friend class EventHub;
    explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Event> pending_;
    bool closed_ = false;
  };

  explicit EventHub(std::size_t client_buffer = 256) : client_buffer_(client_buffer) {}

  std::shared_ptr<Subscription> subscribe();
  void unsubscribe(const std::shared_ptr<Subscription>& sub);
  void publish(const AuditRecord& record);
  void close_all();
  [[nodiscard]] std::size_t subscriber_count() const;

 private:
  static void close(Subscription& sub);

  std::size_t client_buffer_;
  mutable std::mutex mutex_;
  std::vector<std::shared_ptr<Subscription>> subscribers_;
  std::uint64_t next_id_ = 1;
};

class ControlApi {
 public:
  /// Registers an audit sink on `gateway` that feeds the event stream.
  ControlApi(Gateway& gateway, ApiConfig config);
  ~ControlApi();

  ControlApi(const ControlApi&) = delete;
  ControlApi& operator=(const ControlApi&) = delete;

  /// Binds and serves on a background thread. Returns the bound port, or -1.
  int start();
  /// Binds and serves on the calling thread until stop().
  bool listen();
  void stop();

  [[nodiscard]] int port() const { return bound_port_; }
  [[nodiscard]] EventHub& events() { return *hub_; }

 private:
  void install_routes();

  Gateway& gateway_;
  ApiConfig config_;
  std::shared_ptr<EventHub> hub_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int bound_port_ = -1;
};

}  // namespace wiacomm
