#pragma once

// Frame codec, CRC-16 integrity and stop-and-wait retransmission over a Medium.
//
// Frame layout (big-endian CRC):
//
//   [version=0x01][kind][seq][len][payload: len bytes][crc_hi][crc_lo]
//
// kind 0x01 = CMD (payload: ASCII command token), 0x02 = ACK (payload: ASCII
// decimal ack code). The CRC is CRC-16/CCITT-FALSE over every preceding byte.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "wiacomm/core_model.hpp"
#include "wiacomm/link_sim.hpp"

namespace wiacomm {

inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr std::size_t kMaxFramePayload = 48;
inline constexpr std::size_t kMinFrameBytes = kFrameOverheadBytes;
inline constexpr std::size_t kMaxFrameBytes = kMaxFramePayload + kFrameOverheadBytes;

enum class FrameKind : std::uint8_t { Cmd = 0x01, Ack = 0x02 };

struct Frame {
  FrameKind kind = FrameKind::Cmd;
  std::uint8_t seq = 0;
  std::string payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class FrameErrorKind : std::uint8_t { PayloadTooLong, Truncated, BadVersion, BadKind, BadCrc };

[[nodiscard]] const char* to_string(FrameErrorKind kind);

class FrameError : public std::runtime_error {
 public:
  FrameError(FrameErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] FrameErrorKind kind() const { return kind_; }

 private:
  FrameErrorKind kind_;
};

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
[[nodiscard]] std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

/// Throws FrameError{PayloadTooLong}.
[[nodiscard]] Bytes encode_frame(const Frame& frame);

/// Throws FrameError. The CRC is verified before version and kind, so any
/// corruption surfaces as BadCrc (or Truncated when the length byte is hit).
[[nodiscard]] Frame decode_frame(std::span<const std::uint8_t> bytes);

[[nodiscard]] Frame make_command_frame(const Command& cmd, std::uint8_t seq);
[[nodiscard]] Frame make_ack_frame(AckCode code, std::uint8_t seq);

/// Parses an ACK payload; nullopt unless it is a two-digit decimal code.
[[nodiscard]] std::optional<AckCode> parse_ack_payload(std::string_view payload);

struct ArqPolicy {
  double ack_timeout_ms = 0;
  int max_retries = 3;

  /// Timeout covers a full round trip of two maximum-size frames, rounded up.
  [[nodiscard]] static ArqPolicy defaults_for(const LinkConfig& cfg);
};

struct Acked {
  AckCode code;
  int attempts = 0;

  friend bool operator==(const Acked&, const Acked&) = default;
};

struct Failed {
  int attempts = 0;

  friend bool operator==(const Failed&, const Failed&) = default;
};

using AckResult = std::variant<Acked, Failed>;

/// Far-end handler: receives raw downlink bytes and optionally answers with uplink bytes.
using FrameHandler = std::function<std::optional<Bytes>(std::span<const std::uint8_t>)>;

/// Sends `cmd` with sequence number `seq` and waits for the matching ACK,
/// retransmitting the same seq on each timeout. The medium's clock is the
/// simulation clock; it is left at the time the exchange completed.
/// `on_transmit` is called before every (re)transmission with the attempt number.
AckResult arq_send(const Command& cmd, std::uint8_t seq, Medium& link, const FrameHandler& receiver,
                   const ArqPolicy& policy, const std::function<void(int)>& on_transmit = {});

enum class DedupVerdict : std::uint8_t { Execute, DuplicateReAck };

[[nodiscard]] constexpr DedupVerdict dedup_receive(const Frame& frame, std::optional<std::uint8_t> last_seq_executed) {
  return last_seq_executed && *last_seq_executed == frame.seq ? DedupVerdict::DuplicateReAck : DedupVerdict::Execute;
}

}  // namespace wiacomm
