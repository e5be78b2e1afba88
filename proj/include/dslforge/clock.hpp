#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace dslforge {

using IdGenerator = std::function<std::string()>;
using Clock = std::function<std::string()>;

/// 32 lowercase hex characters from a random 128-bit value.
IdGenerator random_ids();
/// Deterministic ids for replayable runs.
IdGenerator seeded_ids(std::uint64_t seed);
/// ISO-8601 UTC with microseconds.
Clock system_clock();
/// "2024-01-01T00:00:00.000001Z", "...000002Z", ... one tick per call.
Clock logical_clock();

}  // namespace dslforge
