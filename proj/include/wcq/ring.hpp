#ifndef WCQ_RING_HPP
#define WCQ_RING_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <type_traits>

#include "wcq/atomic_pair.hpp"
#include "wcq/config.hpp"
#include "wcq/entry.hpp"
#include "wcq/global_counter.hpp"
#include "wcq/stats.hpp"
#include "wcq/thread_registry.hpp"

namespace wcq {

/// Descriptor through which a thread that installed a global increment asks
/// others to clear the INC flag on the matching local counter.
struct phase2_record {
  std::atomic<std::uint64_t> seq1{1};
  std::atomic<std::atomic<std::uint64_t>*> local{nullptr};
  std::atomic<std::uint64_t> cnt{0};
  std::atomic<std::uint64_t> seq2{0};
};

/// Per-thread helping state. A request is open while pending is set and
/// seq1 == seq2; seq1 is bumped when the owner finishes its slow path.
struct alignas(128) thread_record {
  // Owner-only.
  std::uint32_t next_check = 0;
  std::uint32_t next_tid = 0;

  // Shared.
  phase2_record phase2;
  std::atomic<std::uint64_t> seq1{1};
  std::atomic<bool> enqueue{false};
  std::atomic<bool> pending{false};
  std::atomic<std::uint64_t> local_tail{0};
  std::atomic<std::uint64_t> init_tail{0};
  std::atomic<std::uint64_t> local_head{0};
  std::atomic<std::uint64_t> init_head{0};
  std::atomic<std::uint64_t> index{0};
  std::atomic<std::uint64_t> seq2{0};

  record_stats stats;
};

/// Outcome of one fast-path attempt.
struct attempt {
  enum class status : std::uint8_t { ok, empty, retry };

  status st;
  std::uint64_t value;  // dequeued index for ok, the claimed counter for retry

  static constexpr attempt ok(std::uint64_t index = 0) noexcept { return {status::ok, index}; }
  static constexpr attempt empty() noexcept { return {status::empty, 0}; }
  static constexpr attempt retry(std::uint64_t counter) noexcept {
    return {status::retry, counter};
  }
  constexpr bool is_ok() const noexcept { return st == status::ok; }
  constexpr bool is_empty() const noexcept { return st == status::empty; }
  constexpr bool is_retry() const noexcept { return st == status::retry; }
};

/**
 * Bounded wait-free ring of indices in [0, n) with 2n slots.
 *
 * Operations first run the lock-free SCQ fast path up to the configured
 * patience; a thread that runs out publishes a help request in its
 * thread_record and finishes through the cooperative slow path, which any
 * other thread may execute on its behalf. Memory is allocated only in the
 * constructor.
 *
 * Enqueue never reports "full": callers must never hold more than n indices
 * in one ring, which the indirect_queue pairing guarantees.
 */
template <class Traits = default_traits>
class ring {
 public:
  using traits_type = Traits;
  using hooks = typename Traits::hooks;
  using global_counter = std::conditional_t<Traits::packed_global_counters,
                                            packed_global_counter, paired_global_counter>;

  explicit ring(const queue_config& cfg);

  ring(const ring&) = delete;
  ring& operator=(const ring&) = delete;

  thread_handle register_thread() { return registry_.acquire(); }

  void enqueue(const thread_handle& h, std::uint64_t index) { enqueue(h.id(), index); }
  std::optional<std::uint64_t> dequeue(const thread_handle& h) { return dequeue(h.id()); }

  void enqueue(thread_id self, std::uint64_t index);
  std::optional<std::uint64_t> dequeue(thread_id self);

  queue_stats stats() const noexcept;
  queue_stats stats(thread_id id) const noexcept { return records_[id.value].stats.snapshot(); }
  void reset_stats() noexcept;

  const queue_config& config() const noexcept { return cfg_; }
  const entry_format& format() const noexcept { return fmt_; }
  const slot_remap& remap() const noexcept { return remap_; }
  std::uint64_t capacity() const noexcept { return fmt_.capacity(); }
  std::uint32_t num_threads() const noexcept { return cfg_.num_threads; }

  // ---- Protocol steps, public so the verification harness can drive them. ----

  attempt try_enq(thread_id self, std::uint64_t index);
  attempt try_deq(thread_id self);
  void consume(thread_id self, std::uint64_t h, std::size_t j, std::uint64_t e);
  void catchup(thread_id self, std::uint64_t tail, std::uint64_t head);

  void help_threads(thread_id self);
  void help_record(thread_id self, thread_id target);
  void finalize_request(thread_id self, std::uint64_t h);

  std::optional<std::uint64_t> load_global_help_phase2(thread_id self, global_counter& global,
                                                       const std::atomic<std::uint64_t>& mylocal);
  bool slow_faa(thread_id self, global_counter& global, const thread_record& owner,
                std::atomic<std::uint64_t>& local, std::uint64_t& v,
                std::atomic<std::int64_t>* thld, std::uint64_t seq);
  bool try_enq_slow(thread_id self, std::uint64_t t, std::uint64_t index, thread_record& r);
  bool try_deq_slow(thread_id self, std::uint64_t h, thread_record& r);
  void enqueue_slow(thread_id self, std::uint64_t t, std::uint64_t index, thread_record& r,
                    std::uint64_t seq);
  void dequeue_slow(thread_id self, std::uint64_t h, thread_record& r, std::uint64_t seq);

  // ---- Inspection. ----

  std::size_t slot_of(std::uint64_t counter) const noexcept {
    return remap_(fmt_.position_of(counter));
  }
  std::uint64_t slot_value(std::size_t j) const noexcept { return entries_[j].load(word::first); }
  std::int64_t slot_note(std::size_t j) const noexcept {
    return static_cast<std::int64_t>(entries_[j].load(word::second));
  }
  entry_fields slot_fields(std::size_t j) const noexcept { return fmt_.unpack(slot_value(j)); }
  pair_cell& slot_cell(std::size_t j) noexcept { return entries_[j]; }

  counter_ref head() const noexcept { return head_.load(); }
  counter_ref tail() const noexcept { return tail_.load(); }
  global_counter& head_counter() noexcept { return head_; }
  global_counter& tail_counter() noexcept { return tail_; }
  const global_counter& head_counter() const noexcept { return head_; }
  const global_counter& tail_counter() const noexcept { return tail_; }
  std::int64_t threshold() const noexcept { return threshold_.load(); }
  std::atomic<std::int64_t>& threshold_word() noexcept { return threshold_; }

  thread_record& record(thread_id id) noexcept { return records_[id.value]; }
  const thread_record& record(thread_id id) const noexcept { return records_[id.value]; }

 private:
  static const queue_config& checked(const queue_config& cfg) {
    cfg.validate();
    return cfg;
  }
  static constexpr std::uint64_t note_word(std::int64_t note) noexcept {
    return static_cast<std::uint64_t>(note);
  }
  static constexpr std::int64_t as_note(std::uint64_t w) noexcept {
    return static_cast<std::int64_t>(w);
  }

  record_stats& stats_of(thread_id self) noexcept { return records_[self.value].stats; }
  void bump(thread_id self, std::atomic<std::uint64_t> record_stats::*field) noexcept {
    if constexpr (Traits::instrumented) record_stats::bump(stats_of(self).*field);
  }
  void note_value_write(thread_id self, std::uint64_t before, std::uint64_t after) noexcept;
  void note_note_write(thread_id self, std::int64_t before, std::int64_t after) noexcept;
  void note_loop(thread_id self, std::uint64_t iterations) noexcept {
    if constexpr (Traits::instrumented) record_stats::raise(stats_of(self).max_slot_loop, iterations);
  }
  void reset_threshold(thread_id self) noexcept;
  void prepare_phase2(phase2_record& phase2, std::atomic<std::uint64_t>& local,
                      std::uint64_t cnt) noexcept;

  queue_config cfg_;
  entry_format fmt_;
  slot_remap remap_;
  std::unique_ptr<pair_cell[]> entries_;
  std::unique_ptr<thread_record[]> records_;
  thread_registry registry_;

  alignas(128) global_counter head_;
  alignas(128) global_counter tail_;
  alignas(128) std::atomic<std::int64_t> threshold_;
};

template <class Traits>
ring<Traits>::ring(const queue_config& cfg)
    : cfg_(checked(cfg)),
      fmt_(cfg.ring_order),
      remap_(cfg.ring_order, cfg.cache_line_bytes / sizeof(pair_cell)),
      entries_(std::make_unique<pair_cell[]>(fmt_.slots())),
      records_(std::make_unique<thread_record[]>(cfg.num_threads)),
      registry_(cfg.num_threads),
      head_(fmt_.slots()),
      tail_(fmt_.slots()),
      threshold_(-1) {
  for (std::size_t j = 0; j < fmt_.slots(); ++j) {
    entries_[j].store(word::first, fmt_.initial_value());
    entries_[j].store(word::second, note_word(-1));
  }
  for (std::uint32_t i = 0; i < cfg_.num_threads; ++i) {
    records_[i].next_check = cfg_.help_delay;
    records_[i].next_tid = i;
  }
}

template <class Traits>
queue_stats ring<Traits>::stats() const noexcept {
  queue_stats total;
  for (std::uint32_t i = 0; i < cfg_.num_threads; ++i) total += records_[i].stats.snapshot();
  return total;
}

template <class Traits>
void ring<Traits>::reset_stats() noexcept {
  for (std::uint32_t i = 0; i < cfg_.num_threads; ++i) records_[i].stats.reset();
}

template <class Traits>
void ring<Traits>::note_value_write(thread_id self, std::uint64_t before,
                                    std::uint64_t after) noexcept {
  if constexpr (Traits::instrumented) {
    record_stats& s = stats_of(self);
    record_stats::bump(s.slot_writes);
    if (fmt_.cycle(after) < fmt_.cycle(before)) record_stats::bump(s.cycle_regressions);
  }
}

template <class Traits>
void ring<Traits>::note_note_write(thread_id self, std::int64_t before,
                                   std::int64_t after) noexcept {
  if constexpr (Traits::instrumented) {
    record_stats& s = stats_of(self);
    record_stats::bump(s.slot_writes);
    if (after <= before) record_stats::bump(s.note_regressions);
  }
}

template <class Traits>
void ring<Traits>::reset_threshold(thread_id self) noexcept {
  const auto max = static_cast<std::int64_t>(fmt_.threshold_max());
  if (threshold_.load() != max) {
    threshold_.store(max);
    bump(self, &record_stats::threshold_resets);
  }
}

template <class Traits>
void ring<Traits>::enqueue(thread_id self, std::uint64_t index) {
  if (cfg_.scq_mode) {
    while (!try_enq(self, index).is_ok()) {
    }
    return;
  }

  help_threads(self);

  std::uint64_t tail = 0;
  for (std::uint32_t n = 0; n < cfg_.patience_enq; ++n) {
    const attempt a = try_enq(self, index);
    if (a.is_ok()) return;
    tail = a.value;
  }

  thread_record& r = records_[self.value];
  const std::uint64_t seq = r.seq1.load();
  r.local_tail.store(tail);
  r.init_tail.store(tail);
  r.index.store(index);
  r.enqueue.store(true);
  r.seq2.store(seq);
  r.pending.store(true);
  bump(self, &record_stats::slow_enq);
  hooks::at(yield_point::slow_path_begin, tail);

  enqueue_slow(self, tail, index, r, seq);

  r.pending.store(false);
  r.seq1.store(seq + 1);
}

template <class Traits>
std::optional<std::uint64_t> ring<Traits>::dequeue(thread_id self) {
  if (threshold_.load() < 0) return std::nullopt;

  if (cfg_.scq_mode) {
    for (;;) {
      const attempt a = try_deq(self);
      if (a.is_ok()) return a.value;
      if (a.is_empty()) return std::nullopt;
    }
  }

  help_threads(self);

  std::uint64_t head = 0;
  for (std::uint32_t n = 0; n < cfg_.patience_deq; ++n) {
    const attempt a = try_deq(self);
    if (a.is_ok()) return a.value;
    if (a.is_empty()) return std::nullopt;
    head = a.value;
  }

  thread_record& r = records_[self.value];
  const std::uint64_t seq = r.seq1.load();
  r.local_head.store(head);
  r.init_head.store(head);
  r.enqueue.store(false);
  r.seq2.store(seq);
  r.pending.store(true);
  bump(self, &record_stats::slow_deq);
  hooks::at(yield_point::slow_path_begin, head);

  dequeue_slow(self, head, r, seq);

  r.pending.store(false);
  r.seq1.store(seq + 1);

  // Gather the slow-path result.
  const std::uint64_t h = counter_of(r.local_head.load());
  const std::size_t j = slot_of(h);
  const std::uint64_t e = entries_[j].load(word::first);
  if (fmt_.cycle(e) == fmt_.cycle_of(h) && fmt_.index(e) != fmt_.bottom()) {
    consume(self, h, j, e);
    return fmt_.index(e);
  }
  return std::nullopt;
}

}  // namespace wcq

#include "wcq/detail/fast_path.hpp"
#include "wcq/detail/slow_path.hpp"

#endif  // WCQ_RING_HPP
