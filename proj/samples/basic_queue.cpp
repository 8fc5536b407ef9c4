// Two producers and two consumers sharing a bounded wait-free queue.

#include <atomic>
#include <cstdint>
#include <iostream>
#include <thread>
#include <vector>

#include "wcq/wcq.hpp"

int main() {
  wcq::queue_config cfg;
  cfg.ring_order = 12;  // 4096 slots, capacity 2048
  cfg.num_threads = 4;
  wcq::indirect_queue<std::uint64_t> queue(cfg);

  constexpr std::uint64_t per_producer = 100000;
  std::atomic<std::uint64_t> received{0}, sum{0};
  std::vector<std::thread> threads;

  for (int p = 0; p < 2; ++p)
    threads.emplace_back([&] {
      wcq::thread_handle h = queue.register_thread();
      for (std::uint64_t i = 1; i <= per_producer; ++i)
        while (!queue.enqueue(h, i)) std::this_thread::yield();  // full
    });
  for (int c = 0; c < 2; ++c)
    threads.emplace_back([&] {
      wcq::thread_handle h = queue.register_thread();
      while (received.load() < 2 * per_producer) {
        if (auto v = queue.dequeue(h)) {
          sum += *v;
          ++received;
        } else {
          std::this_thread::yield();
        }
      }
    });
  for (auto& t : threads) t.join();

  const std::uint64_t expected = 2 * per_producer * (per_producer + 1) / 2;
  std::cout << "received " << received << " items, sum " << sum << " (expected " << expected << ")\n";
  return sum == expected ? 0 : 1;
}
