#include "wiacomm/link_sim.hpp"

#include <cmath>
#include <string>

namespace wiacomm {

void LinkConfig::validate() const {
  auto check_probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidLinkConfig(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
    }
  };
  check_probability(loss_probability, "loss_probability");
  if (uplink_loss_probability) check_probability(*uplink_loss_probability, "uplink_loss_probability");
  if (!(propagation_delay_ms >= 0.0) || !std::isfinite(propagation_delay_ms)) {
    throw InvalidLinkConfig("propagation_delay_ms must be a finite non-negative number");
  }
  if (bitrate_bps <= 0) throw InvalidLinkConfig("bitrate_bps must be positive");
  if (!(preamble_overhead_ms >= 0.0) || !std::isfinite(preamble_overhead_ms)) {
    throw InvalidLinkConfig("preamble_overhead_ms must be a finite non-negative number");
  }
  if (max_payload_bytes < 1) throw InvalidLinkConfig("max_payload_bytes must be at least 1");
}

double airtime_ms(std::size_t frame_len_bytes, const LinkConfig& cfg) {
  return cfg.preamble_overhead_ms + static_cast<double>(frame_len_bytes) * 8000.0 / cfg.bitrate_bps;
}

Medium::Medium(LinkConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  rng_.seed(cfg_.rng_seed);
}

DeliveryOutcome Medium::transmit(Direction direction, std::span<const std::uint8_t> frame, SimTime send_time) {
  if (send_time < now_) {
    throw ClockRegression("transmit at " + std::to_string(send_time) + " before now " + std::to_string(now_));
  }
  if (send_time < busy_until_) return Rejected{RejectReason::Busy};
  if (frame.size() > cfg_.max_frame_bytes()) return Rejected{RejectReason::TooLong};

  const double airtime = airtime_ms(frame.size(), cfg_);
  busy_until_ = send_time + airtime;

  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  const bool lost = u < cfg_.loss_for(direction);
  if (observer_) observer_(Transmission{direction, frame.size(), send_time, busy_until_, lost});
  if (lost) return Lost{};

  const SimTime arrival = busy_until_ + cfg_.propagation_delay_ms;
  in_flight_.push_back(Delivery{direction, Bytes(frame.begin(), frame.end()), send_time, arrival});
  return Delivered{arrival};
}

std::vector<Delivery> Medium::advance(SimTime to_time) {
  if (to_time < now_) {
    throw ClockRegression("advance to " + std::to_string(to_time) + " before now " + std::to_string(now_));
  }
  now_ = to_time;
  std::vector<Delivery> arrived;
  while (!in_flight_.empty() && in_flight_.front().at <= now_) {
    arrived.push_back(std::move(in_flight_.front()));
    in_flight_.pop_front();
  }
  return arrived;
}

std::optional<SimTime> Medium::next_delivery_time() const {
  if (in_flight_.empty()) return std::nullopt;
  return in_flight_.front().at;
}

}  // namespace wiacomm
