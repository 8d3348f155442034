#include "wiacomm/clock.hpp"

#include <cstdio>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace wiacomm {

ClockFn system_clock() {
  return [] { return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()); };
}

ClockFn stepping_clock(Timestamp start, std::chrono::milliseconds step) {
  struct State {
    std::mutex mutex;
    Timestamp next;
  };
  auto state = std::make_shared<State>();
  state->next = start;
  return [state, step] {
    std::lock_guard lock(state->mutex);
    const Timestamp now = state->next;
    state->next += step;
    return now;
  };
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> tod{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()), static_cast<int>(tod.subseconds().count()));
  return buf;
}

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0, s = 0, ms = 0;
  char tail = 0;
  const std::string copy(text);
  if (copy.size() != 24 ||
      std::sscanf(copy.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d.%3d%c", &y, &mo, &d, &h, &mi, &s, &ms, &tail) != 8 ||
      tail != 'Z') {
    throw std::invalid_argument("bad timestamp '" + copy + "'");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw std::invalid_argument("bad timestamp '" + copy + "'");
  return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms}};
}

}  // namespace wiacomm
