#ifndef WCQ_DETAIL_SLOW_PATH_HPP
#define WCQ_DETAIL_SLOW_PATH_HPP

// Out-of-class definitions for ring: the cooperative slow path.
// Included from wcq/ring.hpp.

namespace wcq {

template <class Traits>
void ring<Traits>::prepare_phase2(phase2_record& phase2, std::atomic<std::uint64_t>& local,
                                  std::uint64_t cnt) noexcept {
  const std::uint64_t seq = phase2.seq1.load() + 1;  // only the owner writes seq1
  phase2.seq1.store(seq);
  phase2.local.store(&local);
  phase2.cnt.store(cnt);
  phase2.seq2.store(seq);
}

// Loads the global counter, first completing any second-phase request
// installed in it. Returns nullopt once mylocal carries FIN.
template <class Traits>
std::optional<std::uint64_t> ring<Traits>::load_global_help_phase2(
    thread_id self, global_counter& global, const std::atomic<std::uint64_t>& mylocal) {
  for (;;) {
    if (mylocal.load() & fin_flag) return std::nullopt;
    const counter_ref gp = global.load();
    if (gp.ref == no_ref) return gp.cnt;
    hooks::at(yield_point::phase2_snapshot_loaded, gp.cnt);

    phase2_record& phase2 = records_[gp.ref - 1].phase2;
    const std::uint64_t seq = phase2.seq2.load();
    std::atomic<std::uint64_t>* local = phase2.local.load();
    const std::uint64_t cnt = phase2.cnt.load();
    // cnt < gp.cnt rules out a record already prepared for a later install.
    if (phase2.seq1.load() == seq && local != nullptr && cnt < gp.cnt) {
      std::uint64_t expected = cnt | inc_flag;
      local->compare_exchange_strong(expected, cnt);
    }

    counter_ref expected = gp;
    if (global.compare_exchange(expected, {gp.cnt, no_ref})) return gp.cnt;
    bump(self, &record_stats::phase2_clear_failures);
    hooks::at(yield_point::phase2_clear_failed, gp.cnt);
  }
}

// Advances `local` and `global` together, once per round across every
// cooperative thread of the request. On success v holds the claimed counter.
template <class Traits>
bool ring<Traits>::slow_faa(thread_id self, global_counter& global, const thread_record& owner,
                            std::atomic<std::uint64_t>& local, std::uint64_t& v,
                            std::atomic<std::int64_t>* thld, std::uint64_t seq) {
  phase2_record& phase2 = records_[self.value].phase2;
  const std::uint32_t my_ref = self.value + 1;
  std::uint64_t cnt = 0;
  for (;;) {
    const std::optional<std::uint64_t> loaded = load_global_help_phase2(self, global, local);
    hooks::at(yield_point::slow_faa_loaded, loaded.value_or(0));
    std::uint64_t expected = v;
    if (!loaded || !local.compare_exchange_strong(expected, *loaded | inc_flag)) {
      v = local.load();
      if (owner.seq1.load() != seq) return false;  // v may belong to a newer request
      if (v & fin_flag) return false;
      if (!(v & inc_flag)) {
        hooks::at(yield_point::slow_faa_done, v);
        return true;
      }
      cnt = counter_of(v);
    } else {
      cnt = *loaded;
      v = cnt | inc_flag;
    }
    prepare_phase2(phase2, local, cnt);
    hooks::at(yield_point::before_global_install, cnt);
    counter_ref installed{cnt, no_ref};
    if (global.compare_exchange(installed, {cnt + 1, my_ref})) break;
  }
  hooks::at(yield_point::after_global_install, cnt);
  bump(self, &record_stats::slow_faa_rounds);

  if (thld != nullptr) thld->fetch_sub(1);
  std::uint64_t expected = cnt | inc_flag;
  local.compare_exchange_strong(expected, cnt);
  counter_ref installed{cnt + 1, my_ref};
  global.compare_exchange(installed, {cnt + 1, no_ref});
  v = cnt;
  hooks::at(yield_point::slow_faa_done, v);
  return true;
}

template <class Traits>
bool ring<Traits>::try_enq_slow(thread_id self, std::uint64_t t, std::uint64_t index,
                                thread_record& r) {
  const std::size_t j = slot_of(t);
  const std::uint64_t cycle = fmt_.cycle_of(t);
  const auto note_cycle = static_cast<std::int64_t>(cycle);
  pair_cell& cell = entries_[j];
  word_pair pair = cell.load();
  std::uint64_t loops = 0;
  for (;; ++loops) {
    const std::uint64_t ent = pair.first;
    const std::int64_t note = as_note(pair.second);
    if (!(fmt_.cycle(ent) < cycle && note < note_cycle)) break;

    if (!(fmt_.is_safe(ent) || head_.load_cnt() <= t) || !fmt_.is_vacant(fmt_.index(ent))) {
      // Unusable: make every later helper skip it too.
      hooks::at(yield_point::before_entry_cas, t);
      if (!cell.compare_exchange(pair, {ent, note_word(note_cycle)})) continue;
      note_note_write(self, note, note_cycle);
      note_loop(self, loops);
      return false;
    }

    const word_pair produced{fmt_.pack(cycle, true, false, index), pair.second};
    hooks::at(yield_point::before_entry_cas, t);
    if (!cell.compare_exchange(pair, produced)) continue;
    note_value_write(self, ent, produced.first);
    note_loop(self, loops);
    bump(self, &record_stats::slow_inserts);
    hooks::at(yield_point::after_enq0, t);

    std::uint64_t expected = t;
    if (r.local_tail.compare_exchange_strong(expected, t | fin_flag)) {
      word_pair current = produced;
      const word_pair ready{produced.first | fmt_.enq_bit(), produced.second};
      if (cell.compare_exchange(current, ready)) note_value_write(self, produced.first, ready.first);
    }
    reset_threshold(self);
    return true;
  }
  note_loop(self, loops);
  // A dequeuer may have closed the slot with bottom at this cycle.
  return fmt_.cycle(pair.first) == cycle && fmt_.index(pair.first) != fmt_.bottom();
}

template <class Traits>
bool ring<Traits>::try_deq_slow(thread_id self, std::uint64_t h, thread_record& r) {
  const std::size_t j = slot_of(h);
  const std::uint64_t cycle = fmt_.cycle_of(h);
  const auto note_cycle = static_cast<std::int64_t>(cycle);
  pair_cell& cell = entries_[j];
  // The request is done only if this thread is the one that sets FIN at h.
  auto finish = [&] {
    std::uint64_t expected = h;
    return r.local_head.compare_exchange_strong(expected, h | fin_flag);
  };

  word_pair pair = cell.load();
  std::uint64_t loops = 0;
  for (;; ++loops) {
    const std::uint64_t ent = pair.first;
    if (fmt_.cycle(ent) == cycle && fmt_.index(ent) != fmt_.bottom()) {
      note_loop(self, loops);
      return finish();
    }

    word_pair next{fmt_.pack(cycle, fmt_.is_safe(ent), true, fmt_.bottom()), pair.second};
    if (!fmt_.is_vacant(fmt_.index(ent))) {
      const std::int64_t note = as_note(pair.second);
      if (fmt_.cycle(ent) < cycle && note < note_cycle) {
        const word_pair averted{ent, note_word(note_cycle)};
        hooks::at(yield_point::before_entry_cas, h);
        if (!cell.compare_exchange(pair, averted)) continue;
        note_note_write(self, note, note_cycle);
        pair = averted;
        next.second = averted.second;
      }
      next.first = fmt_.pack(fmt_.cycle(ent), false, fmt_.enq(ent), fmt_.index(ent));
    }
    if (fmt_.cycle(ent) < cycle) {
      hooks::at(yield_point::before_entry_cas, h);
      if (!cell.compare_exchange(pair, next)) continue;
      note_value_write(self, ent, next.first);
    }
    break;
  }
  note_loop(self, loops);

  const std::uint64_t t = tail_.load_cnt();
  if (t <= h + 1) catchup(self, t, h + 1);
  if (threshold_.load() < 0) return finish();
  return false;
}

template <class Traits>
void ring<Traits>::enqueue_slow(thread_id self, std::uint64_t t, std::uint64_t index,
                                thread_record& r, std::uint64_t seq) {
  while (slow_faa(self, tail_, r, r.local_tail, t, nullptr, seq)) {
    if (try_enq_slow(self, t, index, r)) break;
  }
}

template <class Traits>
void ring<Traits>::dequeue_slow(thread_id self, std::uint64_t h, thread_record& r,
                                std::uint64_t seq) {
  while (slow_faa(self, head_, r, r.local_head, h, &threshold_, seq)) {
    if (try_deq_slow(self, h, r)) break;
  }
}

}  // namespace wcq

#endif  // WCQ_DETAIL_SLOW_PATH_HPP
