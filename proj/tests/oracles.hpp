#pragma once

// Reference implementations used only by tests.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ultrashare/allocator.hpp"

namespace ushare::oracle {

struct AllocInstance {
  std::vector<bool> idle;               // k
  std::vector<std::vector<bool>> rows;  // t x k
  std::vector<std::size_t> depth;       // t
  std::size_t rr = 0;
};

struct AllocAnswer {
  std::size_t queue;
  std::size_t acc;
  friend bool operator==(const AllocAnswer&, const AllocAnswer&) = default;
};

// Enumerates every (queue, accelerator) pair that could be served and keeps
// the one that comes first in scan order from rr, then lowest accelerator.
inline std::optional<AllocAnswer> brute_force_allocate(const AllocInstance& in) {
  const std::size_t t = in.rows.size();
  std::optional<AllocAnswer> best;
  std::size_t best_dist = t;
  for (std::size_t q = 0; q < t; ++q) {
    if (in.depth[q] == 0) continue;
    const std::size_t dist = (q + t - in.rr) % t;
    for (std::size_t i = 0; i < in.idle.size(); ++i) {
      if (!in.idle[i] || !in.rows[q][i]) continue;
      if (!best || dist < best_dist || (dist == best_dist && i < best->acc)) {
        best = AllocAnswer{q, i};
        best_dist = dist;
      }
    }
  }
  return best;
}

inline AllocInstance random_instance(std::mt19937_64& rng) {
  AllocInstance in;
  const std::size_t t = 1 + rng() % 4;
  const std::size_t k = 1 + rng() % 8;
  in.idle.resize(k);
  for (std::size_t i = 0; i < k; ++i) in.idle[i] = rng() % 2;
  in.rows.assign(t, std::vector<bool>(k));
  for (auto& r : in.rows)
    for (std::size_t i = 0; i < k; ++i) r[i] = rng() % 3 == 0;
  in.depth.resize(t);
  for (auto& d : in.depth) d = rng() % 6;
  in.rr = rng() % t;
  return in;
}

// Runs allocate_step on the instance and checks every post-condition against
// the brute-force answer. Returns false on any mismatch.
inline bool allocator_matches(const AllocInstance& in) {
  const std::size_t t = in.rows.size();
  const std::size_t k = in.idle.size();
  AcceleratorStatus status(k);
  for (std::size_t i = 0; i < k; ++i)
    if (!in.idle[i]) status.mark_busy(i);
  GroupTable table(t, k);
  for (std::size_t q = 0; q < t; ++q)
    for (std::size_t i = 0; i < k; ++i) table.set(q, i, in.rows[q][i]);
  std::vector<CommandQueue> queues;
  std::uint64_t id = 0;
  std::vector<std::uint64_t> heads(t, 0);
  for (std::size_t q = 0; q < t; ++q) {
    queues.emplace_back(q, 8);
    heads[q] = id;
    for (std::size_t d = 0; d < in.depth[q]; ++d) {
      Command c;
      c.command_id = id++;
      queues[q].enqueue(c);
    }
  }
  RoundRobinCursor rr{in.rr};
  const auto got = allocate_step(status, table, queues, rr);
  const auto want = brute_force_allocate(in);
  if (!got || !want) return !got && !want && rr.next == in.rr && status.mask() == in.idle;
  if (got->queue != want->queue || got->acc != want->acc) return false;
  if (got->command.command_id != heads[want->queue]) return false;
  if (rr.next != (want->queue + 1) % t) return false;
  if (status.idle(want->acc)) return false;
  return queues[want->queue].size() == in.depth[want->queue] - 1;
}

}  // namespace ushare::oracle
