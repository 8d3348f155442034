#pragma once

// Simulated half-duplex LoRa point-to-point link on a millisecond simulation clock.
//
// Loss is an independent Bernoulli draw per transmitted frame from a
// std::mt19937_64 stream seeded with LinkConfig::rng_seed; the draw is
// u = (next() >> 11) * 2^-53 and the frame is lost when u < p.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace wiacomm {

using Bytes = std::vector<std::uint8_t>;

/// Simulation time in milliseconds.
using SimTime = double;

class InvalidLinkConfig : public std::invalid_argument {
 public:
  explicit InvalidLinkConfig(const std::string& what) : std::invalid_argument(what) {}
};

class ClockRegression : public std::logic_error {
 public:
  explicit ClockRegression(const std::string& what) : std::logic_error(what) {}
};

/// Header plus CRC bytes a frame adds around its payload.
inline constexpr std::size_t kFrameOverheadBytes = 6;

enum class Direction : std::uint8_t { Downlink, Uplink };  // gateway->node, node->gateway

struct LinkConfig {
  double loss_probability = 0.0;
  /// Loss applied to uplink frames; falls back to loss_probability when unset.
  std::optional<double> uplink_loss_probability;
  double propagation_delay_ms = 0.0;
  int bitrate_bps = 5470;
  double preamble_overhead_ms = 25.0;
  std::size_t max_payload_bytes = 48;
  std::uint64_t rng_seed = 0;

  /// Throws InvalidLinkConfig when any field is out of range.
  void validate() const;
  [[nodiscard]] std::size_t max_frame_bytes() const { return max_payload_bytes + kFrameOverheadBytes; }
  [[nodiscard]] double loss_for(Direction dir) const {
    return dir == Direction::Uplink && uplink_loss_probability ? *uplink_loss_probability : loss_probability;
  }
};

/// preamble_overhead_ms + len * 8000 / bitrate_bps
[[nodiscard]] double airtime_ms(std::size_t frame_len_bytes, const LinkConfig& cfg);

struct Delivered {
  SimTime at = 0;
};
struct Lost {};
enum class RejectReason : std::uint8_t { Busy, TooLong };
struct Rejected {
  RejectReason reason;
};

using DeliveryOutcome = std::variant<Delivered, Lost, Rejected>;

/// A frame that arrived at the far end of the link.
struct Delivery {
  Direction direction;
  Bytes bytes;
  SimTime sent_at = 0;
  SimTime at = 0;
};

/// One occupied interval of the medium, reported for every non-rejected transmit.
struct Transmission {
  Direction direction;
  std::size_t length = 0;
  SimTime start = 0;
  SimTime end = 0;
  bool lost = false;
};

class Medium {
 public:
  /// Throws InvalidLinkConfig.
  explicit Medium(LinkConfig cfg);

  /// Puts a frame on the air at `send_time` (>= now()).
  DeliveryOutcome transmit(Direction direction, std::span<const std::uint8_t> frame, SimTime send_time);

  /// Moves the clock to `to_time`, returning every frame whose delivery deadline
  /// has passed, in arrival order. Each delivered frame is returned exactly once.
  std::vector<Delivery> advance(SimTime to_time);

  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] SimTime busy_until() const { return busy_until_; }
  [[nodiscard]] bool idle() const { return now_ >= busy_until_; }
  [[nodiscard]] std::optional<SimTime> next_delivery_time() const;
  [[nodiscard]] const LinkConfig& config() const { return cfg_; }

  /// Observer invoked for each non-rejected transmit.
  void on_transmission(std::function<void(const Transmission&)> observer) { observer_ = std::move(observer); }

 private:
  LinkConfig cfg_;
  std::mt19937_64 rng_;
  SimTime now_ = 0;
  SimTime busy_until_ = 0;
  std::deque<Delivery> in_flight_;
  std::function<void(const Transmission&)> observer_;
};

}  // namespace wiacomm
