#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "multilift/estimator.hpp"

namespace multilift {

// Wire encoding of a Contribution: little-endian [u32 agent id, u64 step,
// 13 doubles (i), 91 doubles (upper triangle of I, row major)].
inline constexpr std::size_t kContributionWireSize = 4 + 8 + (13 + 91) * 8;

std::vector<std::uint8_t> encode_contribution(const Contribution& c);
// Throws ConfigError on a short buffer. I is reconstructed symmetric.
Contribution decode_contribution(const std::uint8_t* data, std::size_t size);

enum class LossMode { kTotalBlackout, kPerLink };

struct LossWindow {
  double start = 0.0;  // [s] inclusive
  double end = 0.0;    // [s] exclusive
  LossMode mode = LossMode::kTotalBlackout;
  // Blocked (sender, receiver) pairs, used when mode == kPerLink.
  std::vector<std::pair<int, int>> links;
};

struct LossSchedule {
  std::vector<LossWindow> windows;

  bool blocked(double t, int sender, int receiver) const;
};

struct BusMessage {
  int sender = -1;
  std::uint64_t step = 0;
  Contribution payload;
  double send_time = 0.0;
};

// Synchronous broadcast bus: the harness advances it once per estimator
// tick, delivery happens within the same tick, stale contributions are
// dropped by collect().
class SyncBus {
 public:
  SyncBus(int num_agents, LossSchedule schedule)
      : num_agents_(num_agents), schedule_(std::move(schedule)) {}

  // Enqueues the message for every other agent whose link is not inside a
  // loss window at time t.
  void broadcast(const BusMessage& msg, double t);

  // Delivered peer contributions for step k (never the agent's own),
  // ordered by sender id.
  std::vector<Contribution> collect(int agent_id, std::uint64_t k) const;

  void clear_tick();
  // Drops messages with step < min_step (stale beyond any configured
  // latency window).
  void expire_before(std::uint64_t min_step);

  // Optional sink recording every broadcast in wire encoding.
  void set_record_sink(std::ostream* sink) { record_sink_ = sink; }

  std::uint64_t produced_count() const { return produced_; }
  std::uint64_t delivered_count() const { return delivered_; }

 private:
  int num_agents_;
  LossSchedule schedule_;
  std::vector<std::vector<BusMessage>> mailboxes_ =
      std::vector<std::vector<BusMessage>>(num_agents_);
  std::ostream* record_sink_ = nullptr;
  std::uint64_t produced_ = 0;
  std::uint64_t delivered_ = 0;
};

}  // namespace multilift
