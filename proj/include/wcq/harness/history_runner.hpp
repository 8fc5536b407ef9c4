#ifndef WCQ_HARNESS_HISTORY_RUNNER_HPP
#define WCQ_HARNESS_HISTORY_RUNNER_HPP

#include <atomic>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "wcq/harness/history.hpp"
#include "wcq/harness/hooks.hpp"
#include "wcq/indirect_queue.hpp"

namespace wcq::harness {

struct history_spec {
  std::uint32_t threads = 3;
  std::uint32_t ops_per_thread = 6;
  queue_config config = small_config();
  std::uint64_t seed = 1;
  double enqueue_ratio = 0.5;
  double yield_probability = 0.3;  // chance of yielding at each protocol yield point

  static queue_config small_config() {
    queue_config c;
    c.ring_order = 3;
    c.num_threads = 3;
    return c;
  }
};

/// Runs one short concurrent workload on a fresh queue and returns its
/// history. Threads yield at random protocol steps so that operations
/// overlap even on a single core. Enqueued values are unique.
inline std::vector<history_event> record_queue_history(const history_spec& spec) {
  indirect_queue<std::uint64_t, harness_traits> q(spec.config);
  history_recorder rec(spec.threads, 2 * spec.ops_per_thread);
  std::atomic<std::uint32_t> ready{0};
  std::atomic<bool> go{false};

  auto body = [&](std::uint32_t t) {
    std::mt19937_64 rng(spec.seed * 1000003 + t);
    std::bernoulli_distribution pick_enqueue(spec.enqueue_ratio);
    std::bernoulli_distribution pick_yield(spec.yield_probability);
    scoped_hook hook([&](yield_point, std::uint64_t) {
      if (pick_yield(rng)) std::this_thread::yield();
    });
    thread_handle h = q.register_thread();
    ready.fetch_add(1);
    while (!go.load()) std::this_thread::yield();
    for (std::uint32_t k = 0; k < spec.ops_per_thread; ++k) {
      if (pick_enqueue(rng)) {
        const std::uint64_t v = (std::uint64_t{t} << 32) | k;
        rec.invoke_enqueue(t, v);
        const bool ok = q.enqueue(h, v);
        rec.respond_enqueue(t, v, ok);
      } else {
        rec.invoke_dequeue(t);
        const auto v = q.dequeue(h);
        rec.respond_dequeue(t, v);
      }
      if (pick_yield(rng)) std::this_thread::yield();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(spec.threads);
  for (std::uint32_t t = 0; t < spec.threads; ++t) threads.emplace_back(body, t);
  while (ready.load() < spec.threads) std::this_thread::yield();
  go.store(true);
  for (auto& th : threads) th.join();
  return rec.events();
}

}  // namespace wcq::harness

#endif  // WCQ_HARNESS_HISTORY_RUNNER_HPP
