#include "wiacomm/wire_protocol.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace wiacomm {

namespace {

constexpr std::array<std::uint16_t, 256> make_crc_table() {
  std::array<std::uint16_t, 256> table{};
  for (unsigned i = 0; i < 256; ++i) {
    auto crc = static_cast<std::uint16_t>(i << 8);
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021) : static_cast<std::uint16_t>(crc << 1);
    }
    table[i] = crc;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

}  // namespace

const char* to_string(FrameErrorKind kind) {
  switch (kind) {
    case FrameErrorKind::PayloadTooLong: return "PayloadTooLong";
    case FrameErrorKind::Truncated: return "Truncated";
    case FrameErrorKind::BadVersion: return "BadVersion";
    case FrameErrorKind::BadKind: return "BadKind";
    case FrameErrorKind::BadCrc: return "BadCrc";
  }
  return "?";
}

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    crc = static_cast<std::uint16_t>((crc << 8) ^ kCrcTable[((crc >> 8) ^ byte) & 0xFF]);
  }
  return crc;
}

Bytes encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxFramePayload) {
    throw FrameError(FrameErrorKind::PayloadTooLong,
                     "payload of " + std::to_string(frame.payload.size()) + " bytes exceeds " +
                         std::to_string(kMaxFramePayload));
  }
  Bytes out;
  out.reserve(frame.payload.size() + kFrameOverheadBytes);
  out.push_back(kFrameVersion);
  out.push_back(static_cast<std::uint8_t>(frame.kind));
  out.push_back(frame.seq);
  out.push_back(static_cast<std::uint8_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  const std::uint16_t crc = crc16_ccitt_false(out);
  out.push_back(static_cast<std::uint8_t>(crc >> 8));
  out.push_back(static_cast<std::uint8_t>(crc & 0xFF));
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMinFrameBytes) {
    throw FrameError(FrameErrorKind::Truncated, "frame of " + std::to_string(bytes.size()) + " bytes is too short");
  }
  const std::size_t len = bytes[3];
  if (len > kMaxFramePayload || bytes.size() != len + kFrameOverheadBytes) {
    throw FrameError(FrameErrorKind::Truncated, "length byte " + std::to_string(len) + " inconsistent with " +
                                                    std::to_string(bytes.size()) + "-byte frame");
  }
  const auto body = bytes.first(4 + len);
  const auto expected = static_cast<std::uint16_t>((bytes[4 + len] << 8) | bytes[5 + len]);
  if (crc16_ccitt_false(body) != expected) throw FrameError(FrameErrorKind::BadCrc, "CRC mismatch");
  if (bytes[0] != kFrameVersion) {
    throw FrameError(FrameErrorKind::BadVersion, "unsupported frame version " + std::to_string(bytes[0]));
  }
  if (bytes[1] != static_cast<std::uint8_t>(FrameKind::Cmd) && bytes[1] != static_cast<std::uint8_t>(FrameKind::Ack)) {
    throw FrameError(FrameErrorKind::BadKind, "unknown frame kind " + std::to_string(bytes[1]));
  }
  Frame frame;
  frame.kind = static_cast<FrameKind>(bytes[1]);
  frame.seq = bytes[2];
  frame.payload.assign(bytes.begin() + 4, bytes.begin() + 4 + static_cast<std::ptrdiff_t>(len));
  return frame;
}

Frame make_command_frame(const Command& cmd, std::uint8_t seq) { return Frame{FrameKind::Cmd, seq, encode_command(cmd)}; }

Frame make_ack_frame(AckCode code, std::uint8_t seq) { return Frame{FrameKind::Ack, seq, std::to_string(code.code)}; }

std::optional<AckCode> parse_ack_payload(std::string_view payload) {
  if (payload.size() != 2) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(payload.data(), payload.data() + payload.size(), value);
  if (ec != std::errc{} || ptr != payload.data() + payload.size() || value < 10) return std::nullopt;
  return AckCode{value};
}

ArqPolicy ArqPolicy::defaults_for(const LinkConfig& cfg) {
  const double one_way = airtime_ms(cfg.max_frame_bytes(), cfg) + cfg.propagation_delay_ms;
  return ArqPolicy{std::ceil(2.0 * one_way), 3};
}

AckResult arq_send(const Command& cmd, std::uint8_t seq, Medium& link, const FrameHandler& receiver,
                   const ArqPolicy& policy, const std::function<void(int)>& on_transmit) {
  const Bytes request = encode_frame(make_command_frame(cmd, seq));
  int matched = 0;  // ack code once a matching ACK arrives, 0 before

  auto handle = [&](std::vector<Delivery> deliveries) {
    for (Delivery& d : deliveries) {
      if (d.direction == Direction::Downlink) {
        if (!receiver) continue;
        if (auto reply = receiver(d.bytes)) {
          link.transmit(Direction::Uplink, *reply, std::max({d.at, link.now(), link.busy_until()}));
        }
        continue;
      }
      try {
        const Frame ack = decode_frame(d.bytes);
        if (ack.kind != FrameKind::Ack || ack.seq != seq) continue;
        if (auto code = parse_ack_payload(ack.payload); code && matched == 0) matched = code->code;
      } catch (const FrameError&) {
        // corrupted uplink frame: treated as not received
      }
    }
  };

  const int max_attempts = 1 + std::max(policy.max_retries, 0);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    // Late frames from earlier attempts land before the medium frees up.
    SimTime start = std::max(link.now(), link.busy_until());
    while (true) {
      handle(link.advance(start));
      if (matched != 0) {
        if (attempt > 1) return Acked{AckCode{matched}, attempt - 1};
        matched = 0;  // left over from a previous exchange that reused this seq
      }
      if (link.busy_until() <= start) break;
      start = link.busy_until();
    }

    if (on_transmit) on_transmit(attempt);
    link.transmit(Direction::Downlink, request, start);
    const SimTime deadline = start + policy.ack_timeout_ms;
    while (true) {
      const auto next = link.next_delivery_time();
      if (!next || *next > deadline) break;
      handle(link.advance(*next));
      if (matched != 0) return Acked{AckCode{matched}, attempt};
    }
    handle(link.advance(deadline));
    if (matched != 0) return Acked{AckCode{matched}, attempt};
  }
  return Failed{max_attempts};
}

}  // namespace wiacomm
