#ifndef WCQ_DETAIL_FAST_PATH_HPP
#define WCQ_DETAIL_FAST_PATH_HPP

// Out-of-class definitions for ring: fast path, consume and helping dispatch.
// Included from wcq/ring.hpp.

namespace wcq {

template <class Traits>
attempt ring<Traits>::try_enq(thread_id self, std::uint64_t index) {
  bump(self, &record_stats::enq_attempts);
  const std::uint64_t t = tail_.fetch_add_cnt(1);
  hooks::at(yield_point::after_tail_faa, t);

  const std::size_t j = slot_of(t);
  const std::uint64_t cycle = fmt_.cycle_of(t);
  pair_cell& cell = entries_[j];
  std::uint64_t e = cell.load(word::first);
  std::uint64_t loops = 0;
  for (;; ++loops) {
    if (fmt_.cycle(e) < cycle && (fmt_.is_safe(e) || head_.load_cnt() <= t) &&
        fmt_.is_vacant(fmt_.index(e))) {
      const std::uint64_t produced = fmt_.pack(cycle, true, true, index);
      hooks::at(yield_point::before_entry_cas, t);
      if (!cell.compare_exchange(word::first, e, produced)) continue;
      note_value_write(self, e, produced);
      note_loop(self, loops);
      reset_threshold(self);
      return attempt::ok();
    }
    break;
  }
  note_loop(self, loops);
  bump(self, &record_stats::enq_retries);
  return attempt::retry(t);
}

template <class Traits>
attempt ring<Traits>::try_deq(thread_id self) {
  bump(self, &record_stats::deq_attempts);
  const std::uint64_t h = head_.fetch_add_cnt(1);
  hooks::at(yield_point::after_head_faa, h);

  const std::size_t j = slot_of(h);
  const std::uint64_t cycle = fmt_.cycle_of(h);
  pair_cell& cell = entries_[j];
  std::uint64_t e = cell.load(word::first);
  std::uint64_t loops = 0;
  for (;; ++loops) {
    if (fmt_.cycle(e) == cycle) {
      note_loop(self, loops);
      consume(self, h, j, e);
      return attempt::ok(fmt_.index(e));
    }
    std::uint64_t next = fmt_.pack(fmt_.cycle(e), false, fmt_.enq(e), fmt_.index(e));
    if (fmt_.is_vacant(fmt_.index(e))) next = fmt_.pack(cycle, fmt_.is_safe(e), true, fmt_.bottom());
    if (fmt_.cycle(e) < cycle) {
      hooks::at(yield_point::before_entry_cas, h);
      if (!cell.compare_exchange(word::first, e, next)) continue;
      note_value_write(self, e, next);
    }
    break;
  }
  note_loop(self, loops);

  const std::uint64_t t = tail_.load_cnt();
  if (t <= h + 1) {
    catchup(self, t, h + 1);
    threshold_.fetch_sub(1);
    return attempt::empty();
  }
  if (threshold_.fetch_sub(1) <= 0) return attempt::empty();
  bump(self, &record_stats::deq_retries);
  return attempt::retry(h);
}

template <class Traits>
void ring<Traits>::consume(thread_id self, std::uint64_t h, std::size_t j, std::uint64_t e) {
  if (!fmt_.enq(e)) {
    hooks::at(yield_point::before_finalize, h);
    finalize_request(self, h);
  }
  entries_[j].fetch_or(word::first, fmt_.consume_mask());
}

template <class Traits>
void ring<Traits>::catchup(thread_id self, std::uint64_t tail, std::uint64_t head) {
  for (std::uint32_t i = 0; i < cfg_.catchup_bound; ++i) {
    hooks::at(yield_point::catchup_before_cas, tail);
    bump(self, &record_stats::catchup_attempts);
    if (tail_.compare_exchange_cnt(tail, head)) return;
    head = head_.load_cnt();
    tail = tail_.load_cnt();
    if (tail >= head) return;
  }
}

// Marks the slow enqueue that produced the Enq=0 entry at position h as
// finished. The producing record holds exactly h (no INC) in local_tail.
// Every record is scanned, the caller's own last: a thread may consume the
// entry its own request produced.
template <class Traits>
void ring<Traits>::finalize_request(thread_id self, std::uint64_t h) {
  const std::uint32_t n = cfg_.num_threads;
  for (std::uint32_t k = 1; k <= n; ++k) {
    std::atomic<std::uint64_t>& tail = records_[(self.value + k) % n].local_tail;
    std::uint64_t cur = tail.load();
    if (counter_of(cur) == h && !(cur & inc_flag)) {
      if (cur == h) tail.compare_exchange_strong(cur, h | fin_flag);
      return;
    }
  }
}

template <class Traits>
void ring<Traits>::help_threads(thread_id self) {
  if (cfg_.scq_mode) return;
  thread_record& r = records_[self.value];
  if (--r.next_check != 0) return;
  help_record(self, thread_id{r.next_tid});
  r.next_check = cfg_.help_delay;
  r.next_tid = (r.next_tid + 1) % cfg_.num_threads;
}

template <class Traits>
void ring<Traits>::help_record(thread_id self, thread_id target) {
  thread_record& thr = records_[target.value];
  if (!thr.pending.load()) return;
  const std::uint64_t seq = thr.seq2.load();
  const bool enqueue = thr.enqueue.load();
  if (enqueue) {
    const std::uint64_t idx = thr.index.load();
    const std::uint64_t tail = thr.init_tail.load();
    if (thr.seq1.load() == seq) {
      bump(self, &record_stats::help_dispatches);
      enqueue_slow(self, tail, idx, thr, seq);
    }
  } else {
    const std::uint64_t head = thr.init_head.load();
    if (thr.seq1.load() == seq) {
      bump(self, &record_stats::help_dispatches);
      dequeue_slow(self, head, thr, seq);
    }
  }
}

}  // namespace wcq

#endif  // WCQ_DETAIL_FAST_PATH_HPP
