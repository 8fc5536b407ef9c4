// Using one index ring directly and inspecting its slots.

#include <iostream>

#include "wcq/ring.hpp"

int main() {
  wcq::queue_config cfg;
  cfg.ring_order = 3;          // 8 slots, indices 0..3
  cfg.num_threads = 1;
  cfg.cache_line_bytes = 0;    // identity slot order, easier to read
  wcq::ring<> ring(cfg);
  wcq::thread_handle h = ring.register_thread();

  for (std::uint64_t i = 0; i < ring.capacity(); ++i) ring.enqueue(h, i);

  std::cout << "threshold " << ring.threshold() << ", tail " << ring.tail().cnt << '\n';
  for (std::size_t j = 0; j < ring.format().slots(); ++j) {
    const wcq::entry_fields f = ring.slot_fields(j);
    std::cout << "slot " << j << ": cycle " << f.cycle << " safe " << f.safe << " enq " << f.enq
              << " index " << f.index << '\n';
  }

  while (auto i = ring.dequeue(h)) std::cout << "dequeued " << *i << '\n';
  std::cout << "empty, threshold " << ring.threshold() << '\n';
}
