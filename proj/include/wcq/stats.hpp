#ifndef WCQ_STATS_HPP
#define WCQ_STATS_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>

namespace wcq {

/// Monotonic instrumentation counters. All zero unless the ring is built
/// with an instrumented traits type.
struct queue_stats {
  std::uint64_t enq_attempts = 0;        // try_enq calls
  std::uint64_t deq_attempts = 0;        // try_deq calls
  std::uint64_t enq_retries = 0;         // try_enq returned "try again"
  std::uint64_t deq_retries = 0;
  std::uint64_t slow_enq = 0;            // enqueue help requests published
  std::uint64_t slow_deq = 0;
  std::uint64_t slow_faa_rounds = 0;     // successful global installs
  std::uint64_t help_dispatches = 0;     // helper entered another thread's slow path
  std::uint64_t threshold_resets = 0;
  std::uint64_t slot_writes = 0;         // successful writes to ring slots
  std::uint64_t slow_inserts = 0;        // Enq=0 entries produced by slow enqueues
  std::uint64_t phase2_clear_failures = 0;
  std::uint64_t catchup_attempts = 0;
  std::uint64_t cycle_regressions = 0;   // must stay zero
  std::uint64_t note_regressions = 0;    // must stay zero
  std::uint64_t max_slot_loop = 0;       // longest slot-local retry loop seen

  queue_stats& operator+=(const queue_stats& o) noexcept {
    enq_attempts += o.enq_attempts;
    deq_attempts += o.deq_attempts;
    enq_retries += o.enq_retries;
    deq_retries += o.deq_retries;
    slow_enq += o.slow_enq;
    slow_deq += o.slow_deq;
    slow_faa_rounds += o.slow_faa_rounds;
    help_dispatches += o.help_dispatches;
    threshold_resets += o.threshold_resets;
    slot_writes += o.slot_writes;
    slow_inserts += o.slow_inserts;
    phase2_clear_failures += o.phase2_clear_failures;
    catchup_attempts += o.catchup_attempts;
    cycle_regressions += o.cycle_regressions;
    note_regressions += o.note_regressions;
    max_slot_loop = std::max(max_slot_loop, o.max_slot_loop);
    return *this;
  }

  friend queue_stats operator+(queue_stats a, const queue_stats& b) noexcept { return a += b; }
  friend bool operator==(const queue_stats&, const queue_stats&) = default;
};

/// Per-record counter block. Only the owning thread writes it.
struct record_stats {
  std::atomic<std::uint64_t> enq_attempts{0}, deq_attempts{0}, enq_retries{0}, deq_retries{0},
      slow_enq{0}, slow_deq{0}, slow_faa_rounds{0}, help_dispatches{0}, threshold_resets{0},
      slot_writes{0}, slow_inserts{0}, phase2_clear_failures{0}, catchup_attempts{0},
      cycle_regressions{0}, note_regressions{0}, max_slot_loop{0};

  static void bump(std::atomic<std::uint64_t>& c) noexcept {
    c.store(c.load(std::memory_order_relaxed) + 1, std::memory_order_relaxed);
  }
  static void raise(std::atomic<std::uint64_t>& c, std::uint64_t v) noexcept {
    if (v > c.load(std::memory_order_relaxed)) c.store(v, std::memory_order_relaxed);
  }

  queue_stats snapshot() const noexcept {
    constexpr auto r = std::memory_order_relaxed;
    queue_stats s;
    s.enq_attempts = enq_attempts.load(r);
    s.deq_attempts = deq_attempts.load(r);
    s.enq_retries = enq_retries.load(r);
    s.deq_retries = deq_retries.load(r);
    s.slow_enq = slow_enq.load(r);
    s.slow_deq = slow_deq.load(r);
    s.slow_faa_rounds = slow_faa_rounds.load(r);
    s.help_dispatches = help_dispatches.load(r);
    s.threshold_resets = threshold_resets.load(r);
    s.slot_writes = slot_writes.load(r);
    s.slow_inserts = slow_inserts.load(r);
    s.phase2_clear_failures = phase2_clear_failures.load(r);
    s.catchup_attempts = catchup_attempts.load(r);
    s.cycle_regressions = cycle_regressions.load(r);
    s.note_regressions = note_regressions.load(r);
    s.max_slot_loop = max_slot_loop.load(r);
    return s;
  }

  void reset() noexcept {
    for (auto* c : {&enq_attempts, &deq_attempts, &enq_retries, &deq_retries, &slow_enq,
                    &slow_deq, &slow_faa_rounds, &help_dispatches, &threshold_resets,
                    &slot_writes, &slow_inserts, &phase2_clear_failures, &catchup_attempts,
                    &cycle_regressions, &note_regressions, &max_slot_loop})
      c->store(0, std::memory_order_relaxed);
  }
};

}  // namespace wcq

#endif  // WCQ_STATS_HPP
