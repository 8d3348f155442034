#include "wiacomm/app_node.hpp"

#include "wiacomm/wire_protocol.hpp"

namespace wiacomm {

Action DeviceBank::get(DeviceId device) const {
  switch (device) {
    case DeviceId::Led1: return led1;
    case DeviceId::Led2: return led2;
    case DeviceId::Motor: return motor;
  }
  return Action::Off;
}

void DeviceBank::set(DeviceId device, Action action) {
  switch (device) {
    case DeviceId::Led1: led1 = action; break;
    case DeviceId::Led2: led2 = action; break;
    case DeviceId::Motor: motor = action; break;
  }
}

Execution execute(const Command& cmd, DeviceBank bank) {
  bank.set(cmd.device, cmd.action);
  const AckCode ack = ack_code(cmd);
  std::string echo(display_name(cmd.device));
  echo += cmd.action == Action::On ? " 1" : " 0";
  return Execution{bank, ack, std::move(echo), std::to_string(ack.code)};
}

DeviceStates query_states(const DeviceBank& bank) {
  DeviceStates states;
  for (DeviceId device : kAllDevices) states[device] = static_cast<int>(bank.get(device));
  return states;
}

void ReceiverLog::append(std::string line) {
  if (sink_) sink_(line);
  lines_.push_back(std::move(line));
  while (lines_.size() > capacity_) lines_.pop_front();
}

std::optional<Bytes> AppNode::on_frame(std::span<const std::uint8_t> bytes) {
  Frame frame;
  Command cmd;
  try {
    frame = decode_frame(bytes);
    if (frame.kind != FrameKind::Cmd) return std::nullopt;
    cmd = decode_command(frame.payload);
  } catch (const FrameError&) {
    return std::nullopt;
  } catch (const UnknownCommand&) {
    return std::nullopt;
  }

  std::function<void(std::uint8_t, const Command&)> observer;
  Bytes ack;
  {
    std::lock_guard lock(mutex_);
    if (dedup_receive(frame, last_seq_) == DedupVerdict::DuplicateReAck) return last_ack_;

    Execution result = execute(cmd, bank_);
    bank_ = result.bank;
    log_.append(std::move(result.echo_line));
    log_.append(std::move(result.code_line));
    last_seq_ = frame.seq;
    last_ack_ = encode_frame(make_ack_frame(result.ack, frame.seq));
    ack = last_ack_;
    observer = execute_observer_;
  }
  if (observer) observer(frame.seq, cmd);
  return ack;
}

void AppNode::set_log_sink(std::function<void(std::string_view)> sink) {
  std::lock_guard lock(mutex_);
  log_.set_sink(std::move(sink));
}

void AppNode::on_execute(std::function<void(std::uint8_t, const Command&)> observer) {
  std::lock_guard lock(mutex_);
  execute_observer_ = std::move(observer);
}

DeviceBank AppNode::bank() const {
  std::lock_guard lock(mutex_);
  return bank_;
}

DeviceStates AppNode::states() const { return query_states(bank()); }

std::vector<std::string> AppNode::log_lines() const {
  std::lock_guard lock(mutex_);
  return {log_.lines().begin(), log_.lines().end()};
}

}  // namespace wiacomm
