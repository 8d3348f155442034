#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "wiacomm/auth_engine.hpp"

using namespace wiacomm;
using namespace std::chrono_literals;

namespace {

const MacAddress kGood = parse_mac("AA:BB:CC:DD:EE:FF");
const MacAddress kBad = parse_mac("11:22:33:44:55:66");
const MacAddress kOther = parse_mac("66:55:44:33:22:11");
const Timestamp kT0{std::chrono::seconds(1'000'000)};

}  // namespace

TEST_CASE("registered MAC is granted and clears failures") {
  Allowlist allow{{kGood, "station-1"}};
  AttemptState state;
  const AuthDecision d = authenticate(kGood, allow, state, kT0);
  CHECK(d.granted());
  CHECK(std::get<Granted>(d.outcome).label == "station-1");
  CHECK_FALSE(d.alert);
  CHECK(state.count(kGood) == 0);
}

TEST_CASE("third consecutive failure alerts and locks") {
  Allowlist allow{{kGood, ""}};
  AttemptState state;
  auto d1 = authenticate(kBad, allow, state, kT0);
  auto d2 = authenticate(kBad, allow, state, kT0 + 1s);
  CHECK(d1 == AuthDecision{Denied{1}, std::nullopt});
  CHECK(d2 == AuthDecision{Denied{2}, std::nullopt});

  auto d3 = authenticate(kBad, allow, state, kT0 + 2s);
  CHECK(std::get<Denied>(d3.outcome).failures_so_far == 3);
  REQUIRE(d3.alert);
  CHECK(d3.alert->mac == kBad);
  CHECK(d3.alert->at == kT0 + 2s);
  CHECK(state.at(kBad).alert_raised);

  auto d4 = authenticate(kBad, allow, state, kT0 + 10s);
  CHECK(d4 == AuthDecision{DeniedLocked{kT0 + 2s + kDefaultLockDuration}, std::nullopt});
  CHECK(state.at(kBad).consecutive_failures == 3);  // locked attempts are not counted
}

TEST_CASE("failure counters are per MAC") {
  Allowlist allow;
  AttemptState state;
  (void)authenticate(kBad, allow, state, kT0);
  (void)authenticate(kBad, allow, state, kT0 + 1s);
  const auto other = authenticate(kOther, allow, state, kT0 + 2s);
  CHECK(other == AuthDecision{Denied{1}, std::nullopt});
  CHECK(state.at(kBad).consecutive_failures == 2);
  CHECK_FALSE(state.at(kBad).alert_raised);
}

TEST_CASE("a success between failures prevents the alert") {
  Allowlist allow;
  AttemptState state;
  (void)authenticate(kBad, allow, state, kT0);
  (void)authenticate(kBad, allow, state, kT0 + 1s);
  allow[kBad] = "";
  CHECK(authenticate(kBad, allow, state, kT0 + 2s).granted());
  allow.clear();
  const auto d = authenticate(kBad, allow, state, kT0 + 3s);
  CHECK(d == AuthDecision{Denied{1}, std::nullopt});
}

TEST_CASE("lock expiry starts a fresh episode") {
  Allowlist allow;
  AttemptState state;
  for (int i = 0; i < 3; ++i) (void)authenticate(kBad, allow, state, kT0);
  CHECK(is_locked(kBad, state, kT0 + kDefaultLockDuration - 1ms));
  CHECK_FALSE(is_locked(kBad, state, kT0 + kDefaultLockDuration));

  const auto d = authenticate(kBad, allow, state, kT0 + kDefaultLockDuration);
  CHECK(d == AuthDecision{Denied{1}, std::nullopt});
  CHECK_FALSE(state.at(kBad).alert_raised);
}

TEST_CASE("is_locked") {
  AttemptState state;
  CHECK_FALSE(is_locked(kBad, state, kT0));
  state[kBad].locked_until = kT0 + 10s;
  CHECK(is_locked(kBad, state, kT0));
  state[kBad].locked_until = kT0 - 1s;
  CHECK_FALSE(is_locked(kBad, state, kT0));
}

TEST_CASE("record_success_reset") {
  AttemptState state;
  state[kBad].consecutive_failures = 2;
  record_success_reset(kBad, state);
  CHECK(state[kBad] == AttemptRecord{});

  record_success_reset(kBad, state);
  CHECK(state[kBad] == AttemptRecord{});

  Allowlist allow;
  AttemptState locked;
  for (int i = 0; i < 3; ++i) (void)authenticate(kBad, allow, locked, kT0);
  REQUIRE(is_locked(kBad, locked, kT0));
  record_success_reset(kBad, locked);
  CHECK_FALSE(is_locked(kBad, locked, kT0));
  CHECK(authenticate(kBad, allow, locked, kT0) == AuthDecision{Denied{1}, std::nullopt});
}

TEST_CASE("random schedules agree with the hand-simulated ledger") {
  std::mt19937_64 rng(2024);
  constexpr auto kLock = 300s;
  for (int schedule = 0; schedule < 1000; ++schedule) {
    std::vector<MacAddress> pool;
    for (int i = 0; i < 4; ++i) pool.push_back(oracle::random_mac(rng));
    Allowlist allow;
    AttemptState state;
    oracle::LockoutModel model(kLock);
    Timestamp now = kT0;
    std::map<MacAddress, int> alerts_this_episode;

    for (int step = 0; step < 60; ++step) {
      now += std::chrono::seconds(rng() % 120);
      const MacAddress& mac = pool[rng() % pool.size()];
      if (rng() % 8 == 0) {  // allowlist churn
        if (allow.contains(mac)) allow.erase(mac); else allow[mac] = "";
        continue;
      }
      const auto expected = model.attempt(mac, allow.contains(mac), now);
      const auto before = state.count(mac) ? state.at(mac).consecutive_failures : 0;
      const AuthDecision got = authenticate(mac, allow, state, now, kLock);

      switch (expected.expect) {
        case oracle::LockoutModel::Expect::Granted:
          REQUIRE(got.granted());
          REQUIRE(allow.contains(mac));
          break;
        case oracle::LockoutModel::Expect::Denied:
          REQUIRE(std::get<Denied>(got.outcome).failures_so_far == expected.streak);
          break;
        case oracle::LockoutModel::Expect::DeniedLocked:
          REQUIRE(std::holds_alternative<DeniedLocked>(got.outcome));
          break;
      }
      REQUIRE(got.alert.has_value() == expected.alert);
      if (got.alert) {
        REQUIRE(before == 2);
        REQUIRE(++alerts_this_episode[mac] == 1);
      }
      if (expected.expect != oracle::LockoutModel::Expect::DeniedLocked && !got.alert) {
        alerts_this_episode[mac] = 0;
      }
    }
  }
}

TEST_CASE("decisions are deterministic") {
  Allowlist allow{{kGood, ""}};
  AttemptState a, b;
  for (int i = 0; i < 10; ++i) {
    const Timestamp t = kT0 + std::chrono::seconds(i * 40);
    const MacAddress& mac = i % 3 == 0 ? kGood : kBad;
    REQUIRE(authenticate(mac, allow, a, t) == authenticate(mac, allow, b, t));
  }
  CHECK(a == b);
}

TEST_CASE("AuthEngine serializes concurrent callers") {
  AuthEngine engine;
  Allowlist allow;
  std::atomic<int> alerts{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        if (engine.authenticate(kBad, allow, kT0).alert) ++alerts;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(alerts == 1);
  CHECK(engine.is_locked(kBad, kT0));
  engine.reset(kBad);
  CHECK_FALSE(engine.is_locked(kBad, kT0));
}
