#include "wiacomm/demo.hpp"

#include <algorithm>
#include <stdexcept>

#include "wiacomm/gateway.hpp"

namespace wiacomm {

namespace {

template <std::size_t N>
bool lines_equal(const std::vector<std::string>& actual, const std::array<std::string_view, N>& expected) {
  return std::equal(actual.begin(), actual.end(), expected.begin(), expected.end());
}

}  // namespace

bool DemoResult::transmitter_matches() const { return lines_equal(transmitter, kDemoTransmitterLog); }

bool DemoResult::receiver_matches() const { return lines_equal(receiver, kDemoReceiverLog); }

DemoResult run_demo(std::uint64_t seed) {
  GatewayConfig config;
  config.link.loss_probability = 0.0;
  config.link.rng_seed = seed;
  config.token_seed = seed;

  const MacAddress mac = parse_mac(kDemoMac);
  Gateway gateway(config, Allowlist{{mac, "demo-controller"}},
                  stepping_clock(Timestamp{std::chrono::seconds(1'700'000'000)}, std::chrono::milliseconds(1)));

  const SessionOutcome outcome = gateway.open_session(mac);
  const auto* session = std::get_if<Session>(&outcome);
  if (session == nullptr) throw std::logic_error("demo controller was not admitted");
  for (std::string_view token : kDemoScript) (void)gateway.submit_command(session->token, token);
  gateway.drain();

  return DemoResult{gateway.transmitter_lines(), gateway.receiver_lines(), gateway.device_states()};
}

}  // namespace wiacomm
