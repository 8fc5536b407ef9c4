#ifndef WCQ_CONFIG_HPP
#define WCQ_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wcq {

/// Runtime parameters of a ring (and of both rings of an indirect_queue).
struct queue_config {
  unsigned ring_order = 16;          // the ring has 2^ring_order slots, capacity half that
  std::uint32_t num_threads = 8;     // size of the static thread-record array
  std::uint32_t patience_enq = 16;   // fast-path attempts before requesting help
  std::uint32_t patience_deq = 64;
  std::uint32_t help_delay = 64;     // operations between two help scans
  std::uint32_t catchup_bound = 8;
  bool scq_mode = false;             // unlimited patience, no helping
  std::size_t cache_line_bytes = 128;  // 0 selects the identity slot permutation

  std::uint64_t capacity() const noexcept { return std::uint64_t{1} << (ring_order - 1); }

  void validate() const {
    if (ring_order < 2 || ring_order > 40)
      throw std::invalid_argument("ring_order must be in [2, 40], got " +
                                  std::to_string(ring_order));
    if (num_threads == 0) throw std::invalid_argument("num_threads must be positive");
    if (num_threads > capacity())
      throw std::invalid_argument("num_threads (" + std::to_string(num_threads) +
                                  ") exceeds ring capacity (" + std::to_string(capacity()) + ")");
    if (num_threads > 0xffffu) throw std::invalid_argument("num_threads must fit in 16 bits");
    if (patience_enq == 0 || patience_deq == 0)
      throw std::invalid_argument("patience must be at least one attempt");
    if (help_delay == 0) throw std::invalid_argument("help_delay must be positive");
    if (cache_line_bytes & (cache_line_bytes - 1))
      throw std::invalid_argument("cache_line_bytes must be a power of two");
  }
};

/// Instrumentation seams inside the protocol. Hooks compiled with no_hooks vanish.
enum class yield_point : std::uint8_t {
  after_tail_faa,
  before_entry_cas,
  after_head_faa,
  before_finalize,
  slow_path_begin,
  slow_faa_loaded,
  before_global_install,
  after_global_install,
  slow_faa_done,
  phase2_snapshot_loaded,
  phase2_clear_failed,
  after_enq0,
  catchup_before_cas,
  count_
};

inline constexpr const char* to_string(yield_point p) noexcept {
  switch (p) {
    case yield_point::after_tail_faa: return "after-tail-faa";
    case yield_point::before_entry_cas: return "before-entry-cas";
    case yield_point::after_head_faa: return "after-head-faa";
    case yield_point::before_finalize: return "before-finalize";
    case yield_point::slow_path_begin: return "slow-path-begin";
    case yield_point::slow_faa_loaded: return "slow-faa-loaded";
    case yield_point::before_global_install: return "before-global-install";
    case yield_point::after_global_install: return "after-global-install";
    case yield_point::slow_faa_done: return "slow-faa-done";
    case yield_point::phase2_snapshot_loaded: return "phase2-snapshot-loaded";
    case yield_point::phase2_clear_failed: return "phase2-clear-failed";
    case yield_point::after_enq0: return "after-enq0";
    case yield_point::catchup_before_cas: return "catchup-before-cas";
    case yield_point::count_: break;
  }
  return "?";
}

/// `arg` carries the counter in play at the point (the claimed Tail/Head
/// value, the agreed slow_faa value, ...), or 0.
struct no_hooks {
  static constexpr void at(yield_point, std::uint64_t = 0) noexcept {}
};

/// Compile-time policy. `instrumented` enables per-thread statistics;
/// `packed_global_counters` selects the single-word Head/Tail fallback.
struct default_traits {
  using hooks = no_hooks;
  static constexpr bool instrumented = false;
  static constexpr bool packed_global_counters = false;
};

struct instrumented_traits : default_traits {
  static constexpr bool instrumented = true;
};

}  // namespace wcq

#endif  // WCQ_CONFIG_HPP
