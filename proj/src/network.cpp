#include "multilift/network.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <ostream>

namespace multilift {

namespace {
void put_bytes(std::vector<std::uint8_t>& out, const void* p, std::size_t n) {
  const auto* b = static_cast<const std::uint8_t*>(p);
  out.insert(out.end(), b, b + n);
}
}  // namespace

std::vector<std::uint8_t> encode_contribution(const Contribution& c) {
  static_assert(std::endian::native == std::endian::little,
                "wire format assumes a little-endian host");
  std::vector<std::uint8_t> out;
  out.reserve(kContributionWireSize);
  put_bytes(out, &c.agent_id, 4);
  put_bytes(out, &c.step, 8);
  for (int r = 0; r < kStateDim; ++r) put_bytes(out, &c.i[r], 8);
  for (int r = 0; r < kStateDim; ++r) {
    for (int col = r; col < kStateDim; ++col) put_bytes(out, &c.I(r, col), 8);
  }
  return out;
}

Contribution decode_contribution(const std::uint8_t* data, std::size_t size) {
  if (size < kContributionWireSize) {
    throw ConfigError("contribution wire buffer too short");
  }
  Contribution c;
  std::memcpy(&c.agent_id, data, 4);
  std::memcpy(&c.step, data + 4, 8);
  const std::uint8_t* p = data + 12;
  for (int r = 0; r < kStateDim; ++r, p += 8) std::memcpy(&c.i[r], p, 8);
  for (int r = 0; r < kStateDim; ++r) {
    for (int col = r; col < kStateDim; ++col, p += 8) {
      double v;
      std::memcpy(&v, p, 8);
      c.I(r, col) = v;
      c.I(col, r) = v;
    }
  }
  return c;
}

bool LossSchedule::blocked(double t, int sender, int receiver) const {
  for (const auto& w : windows) {
    if (t < w.start || t >= w.end) continue;  // windows are [start, end)
    if (w.mode == LossMode::kTotalBlackout) return true;
    for (const auto& [from, to] : w.links) {
      if (from == sender && to == receiver) return true;
    }
  }
  return false;
}

void SyncBus::broadcast(const BusMessage& msg, double t) {
  ++produced_;
  if (record_sink_ != nullptr) {
    const auto bytes = encode_contribution(msg.payload);
    record_sink_->write(reinterpret_cast<const char*>(bytes.data()),
                        static_cast<std::streamsize>(bytes.size()));
  }
  for (int receiver = 0; receiver < num_agents_; ++receiver) {
    if (receiver == msg.sender) continue;
    if (schedule_.blocked(t, msg.sender, receiver)) continue;
    mailboxes_[receiver].push_back(msg);
    ++delivered_;
  }
}

std::vector<Contribution> SyncBus::collect(int agent_id, std::uint64_t k) const {
  std::vector<Contribution> out;
  for (const auto& msg : mailboxes_[agent_id]) {
    if (msg.step == k) out.push_back(msg.payload);
  }
  std::sort(out.begin(), out.end(),
            [](const Contribution& a, const Contribution& b) {
              return a.agent_id < b.agent_id;
            });
  return out;
}

void SyncBus::clear_tick() {
  for (auto& box : mailboxes_) box.clear();
}

void SyncBus::expire_before(std::uint64_t min_step) {
  for (auto& box : mailboxes_) {
    std::erase_if(box, [min_step](const BusMessage& m) {
      return m.step < min_step;
    });
  }
}

}  // namespace multilift
