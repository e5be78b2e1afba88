#include "dslforge/clock.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <memory>
#include <random>

namespace dslforge {

namespace {

std::string hex128(std::uint64_t hi, std::uint64_t lo) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

std::string format_time(std::chrono::system_clock::time_point tp) {
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(tp.time_since_epoch()).count();
  std::time_t secs = static_cast<std::time_t>(micros / 1000000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<long long>(micros % 1000000));
  return buf;
}

}  // namespace

IdGenerator random_ids() {
  auto rng = std::make_shared<std::mt19937_64>(std::random_device{}() ^
                                                 static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
  return [rng] {
    std::uint64_t hi = (*rng)();
    std::uint64_t lo = (*rng)();
    return hex128(hi, lo);
  };
}

IdGenerator seeded_ids(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng] {
    std::uint64_t hi = (*rng)();
    std::uint64_t lo = (*rng)();
    return hex128(hi, lo);
  };
}

Clock system_clock() {
  return [] { return format_time(std::chrono::system_clock::now()); };
}

Clock logical_clock() {
  auto tick = std::make_shared<long long>(0);
  return [tick] {
    auto tp = std::chrono::system_clock::time_point{} + std::chrono::seconds(1704067200) +  // 2024-01-01
              std::chrono::microseconds(++*tick);
    return format_time(tp);
  };
}

}  // namespace dslforge
