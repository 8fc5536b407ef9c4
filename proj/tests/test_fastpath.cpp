#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "wcq/harness/hooks.hpp"
#include "wcq/ring.hpp"

namespace {

using wcq::entry_fields;
using wcq::queue_config;
using wcq::thread_id;
using wcq::word;
using ring_t = wcq::ring<wcq::instrumented_traits>;
using hooked_ring = wcq::ring<wcq::harness::harness_traits>;

constexpr thread_id t0{0};
constexpr thread_id t1{1};
constexpr thread_id t2{2};

queue_config small_config(unsigned order = 4) {
  queue_config c;
  c.ring_order = order;
  c.num_threads = 4;
  return c;
}

template <class Ring>
void set_slot(Ring& r, std::uint64_t counter, entry_fields f) {
  r.slot_cell(r.slot_of(counter)).store(word::first, r.format().pack(f));
}

TEST(Ring, FreshState) {
  ring_t r(small_config());
  EXPECT_EQ(r.capacity(), 8u);
  EXPECT_EQ(r.threshold(), -1);
  EXPECT_EQ(r.head().cnt, 16u);
  EXPECT_EQ(r.tail().cnt, 16u);
  EXPECT_EQ(r.head().ref, wcq::no_ref);
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_EQ(r.slot_fields(j), (entry_fields{0, true, true, 14}));
    EXPECT_EQ(r.slot_note(j), -1);
  }
}

TEST(TryEnq, FreshRingInsertsAtCycleOne) {
  ring_t r(small_config());
  const wcq::attempt a = r.try_enq(t0, 3);
  ASSERT_TRUE(a.is_ok());
  EXPECT_EQ(r.slot_fields(r.slot_of(16)), (entry_fields{1, true, true, 3}));
  EXPECT_EQ(r.threshold(), 23);
  EXPECT_EQ(r.tail().cnt, 17u);
}

TEST(TryEnq, SlotAlreadyAtCurrentCycleRetries) {
  ring_t r(small_config());
  set_slot(r, 16, {1, true, true, 5});
  const wcq::attempt a = r.try_enq(t0, 3);
  ASSERT_TRUE(a.is_retry());
  EXPECT_EQ(a.value, 16u);
  EXPECT_EQ(r.slot_fields(r.slot_of(16)), (entry_fields{1, true, true, 5}));
}

TEST(TryEnq, UnsafeSlotWithHeadPastTailRetries) {
  ring_t r(small_config());
  set_slot(r, 16, {0, false, true, 14});
  r.head_counter().fetch_add_cnt(4);
  const wcq::attempt a = r.try_enq(t0, 3);
  ASSERT_TRUE(a.is_retry());
  EXPECT_EQ(a.value, 16u);
}

TEST(TryEnq, UnsafeSlotUsableWhenHeadNotPast) {
  ring_t r(small_config());
  set_slot(r, 16, {0, false, true, 14});
  ASSERT_TRUE(r.try_enq(t0, 3).is_ok());
  EXPECT_EQ(r.slot_fields(r.slot_of(16)), (entry_fields{1, true, true, 3}));
}

TEST(TryDeq, ConsumesWhatWasEnqueued) {
  ring_t r(small_config());
  ASSERT_TRUE(r.try_enq(t0, 3).is_ok());
  const wcq::attempt a = r.try_deq(t1);
  ASSERT_TRUE(a.is_ok());
  EXPECT_EQ(a.value, 3u);
  EXPECT_EQ(r.slot_fields(r.slot_of(16)), (entry_fields{1, true, true, 15}));
}

TEST(TryDeq, FreshRingForcedReportsEmpty) {
  ring_t r(small_config());
  const wcq::attempt a = r.try_deq(t0);
  ASSERT_TRUE(a.is_empty());
  EXPECT_EQ(r.threshold(), -2);
  EXPECT_EQ(r.slot_fields(r.slot_of(16)), (entry_fields{1, true, true, 14}));
  EXPECT_EQ(r.tail().cnt, 17u);  // caught up with Head
}

TEST(TryDeq, OvertakenLiveEntryLosesIsSafe) {
  ring_t r(small_config());
  set_slot(r, 16, {0, true, true, 5});
  r.tail_counter().fetch_add_cnt(4);
  r.threshold_word().store(10);
  const wcq::attempt a = r.try_deq(t0);
  ASSERT_TRUE(a.is_retry());
  EXPECT_EQ(r.slot_fields(r.slot_of(16)), (entry_fields{0, false, true, 5}));
  EXPECT_EQ(r.threshold(), 9);
}

TEST(Consume, SetsConsumedIndexAndEnq) {
  ring_t r(small_config());
  const std::size_t j = r.slot_of(5 * 16);
  set_slot(r, 5 * 16, {5, true, true, 12});
  r.consume(t0, 5 * 16, j, r.slot_value(j));
  EXPECT_EQ(r.slot_fields(j), (entry_fields{5, true, true, 15}));
}

TEST(Consume, EnqZeroFinalizesProducer) {
  ring_t r(small_config());
  const std::uint64_t h = 5 * 16;
  const std::size_t j = r.slot_of(h);
  set_slot(r, h, {5, true, false, 12});
  r.record(t2).local_tail.store(h);
  r.consume(t0, h, j, r.slot_value(j));
  EXPECT_EQ(r.record(t2).local_tail.load(), h | wcq::fin_flag);
  EXPECT_EQ(r.slot_fields(j), (entry_fields{5, true, true, 15}));
}

TEST(Consume, PreservesClearedIsSafe) {
  ring_t r(small_config());
  const std::size_t j = r.slot_of(5 * 16);
  set_slot(r, 5 * 16, {5, false, true, 12});
  r.consume(t0, 5 * 16, j, r.slot_value(j));
  EXPECT_EQ(r.slot_fields(j), (entry_fields{5, false, true, 15}));
}

TEST(Catchup, SingleCasWithoutContention) {
  ring_t r(small_config());
  r.catchup(t0, 16, 20);
  EXPECT_EQ(r.tail().cnt, 20u);
  EXPECT_EQ(r.stats().catchup_attempts, 1u);
}

TEST(Catchup, StopsWhenTailAlreadyAhead) {
  ring_t r(small_config());
  r.tail_counter().fetch_add_cnt(9);  // 25
  r.head_counter().fetch_add_cnt(4);  // 20
  r.catchup(t0, 16, 20);
  EXPECT_EQ(r.tail().cnt, 25u);
  EXPECT_EQ(r.stats().catchup_attempts, 1u);
}

TEST(Catchup, GivesUpAfterBound) {
  queue_config c = small_config();
  c.catchup_bound = 5;
  hooked_ring r(c);
  r.head_counter().fetch_add_cnt(1000);
  std::uint32_t cas_points = 0;
  wcq::harness::scoped_hook hook([&](wcq::yield_point p, std::uint64_t) {
    if (p != wcq::yield_point::catchup_before_cas) return;
    ++cas_points;
    r.tail_counter().fetch_add_cnt(1);  // every CAS loses
  });
  r.catchup(t0, 16, 1016);
  EXPECT_EQ(cas_points, 5u);
  EXPECT_EQ(r.stats().catchup_attempts, 5u);
  EXPECT_EQ(r.tail().cnt, 21u);
}

TEST(HelpThreads, CountsDownWithoutScanning) {
  ring_t r(small_config());
  r.record(t0).next_check = 5;
  r.help_threads(t0);
  EXPECT_EQ(r.record(t0).next_check, 4u);
  EXPECT_EQ(r.record(t0).next_tid, 0u);
}

TEST(HelpThreads, AdvancesCursorPastIdleTarget) {
  ring_t r(small_config());
  r.record(t0).next_check = 1;
  r.help_threads(t0);
  EXPECT_EQ(r.record(t0).next_check, r.config().help_delay);
  EXPECT_EQ(r.record(t0).next_tid, 1u);
  EXPECT_EQ(r.stats().help_dispatches, 0u);
}

TEST(HelpThreads, DisabledInScqMode) {
  queue_config c = small_config();
  c.scq_mode = true;
  ring_t r(c);
  r.record(t0).next_check = 5;
  r.help_threads(t0);
  EXPECT_EQ(r.record(t0).next_check, 5u);
}

TEST(FinalizeRequest, SetsFinOnMatchingRecord) {
  ring_t r(small_config());
  r.record(t2).local_tail.store(40);
  r.finalize_request(t0, 40);
  EXPECT_EQ(r.record(t2).local_tail.load(), 40 | wcq::fin_flag);
}

TEST(FinalizeRequest, NoMatchNoWrites) {
  ring_t r(small_config());
  for (std::uint32_t i = 0; i < 4; ++i) r.record(thread_id{i}).local_tail.store(100 + i);
  r.finalize_request(t0, 40);
  for (std::uint32_t i = 0; i < 4; ++i) EXPECT_EQ(r.record(thread_id{i}).local_tail.load(), 100 + i);
}

TEST(FinalizeRequest, Idempotent) {
  ring_t r(small_config());
  r.record(t2).local_tail.store(40 | wcq::fin_flag);
  r.finalize_request(t0, 40);
  EXPECT_EQ(r.record(t2).local_tail.load(), 40 | wcq::fin_flag);
}

TEST(FinalizeRequest, IgnoresInFlightIncrement) {
  ring_t r(small_config());
  r.record(t1).local_tail.store(40 | wcq::inc_flag);
  r.record(t2).local_tail.store(40);
  r.finalize_request(t0, 40);
  EXPECT_EQ(r.record(t1).local_tail.load(), 40 | wcq::inc_flag);
  EXPECT_EQ(r.record(t2).local_tail.load(), 40 | wcq::fin_flag);
}

TEST(FinalizeRequest, ScansCallersOwnRecord) {
  ring_t r(small_config());
  r.record(t0).local_tail.store(40);
  r.finalize_request(t0, 40);
  EXPECT_EQ(r.record(t0).local_tail.load(), 40 | wcq::fin_flag);
}

// Single-threaded equivalence with a FIFO over every sequence of three
// operation kinds: enqueue the smallest free index, dequeue from thread 0,
// dequeue from thread 1.
TEST(FastPath, MatchesSequentialFifoExhaustively) {
  constexpr int length = 10;
  int total = 1;
  for (int i = 0; i < length; ++i) total *= 3;
  for (bool remapped : {false, true}) {
    queue_config c = small_config(3);
    c.cache_line_bytes = remapped ? 64 : 0;
    for (int code = 0; code < total; ++code) {
      ring_t r(c);
      std::deque<std::uint64_t> model;
      std::vector<bool> held(r.capacity(), false);
      int rest = code;
      for (int step = 0; step < length; ++step, rest /= 3) {
        const int op = rest % 3;
        if (op == 0) {
          if (model.size() == r.capacity()) continue;
          std::uint64_t idx = 0;
          while (held[idx]) ++idx;
          held[idx] = true;
          model.push_back(idx);
          r.enqueue(t0, idx);
        } else {
          const std::optional<std::uint64_t> got = r.dequeue(thread_id{static_cast<std::uint32_t>(op - 1)});
          std::optional<std::uint64_t> want;
          if (!model.empty()) {
            want = model.front();
            model.pop_front();
            held[*want] = false;
          }
          ASSERT_EQ(got, want) << "sequence " << code << " step " << step;
        }
      }
      const wcq::queue_stats s = r.stats();
      ASSERT_EQ(s.slow_enq + s.slow_deq, 0u) << "sequence " << code;
      ASSERT_EQ(s.cycle_regressions, 0u);
    }
  }
}

TEST(FastPath, LongSequentialRunWrapsManyCycles) {
  ring_t r(small_config(3));
  std::deque<std::uint64_t> model;
  std::uint64_t next = 0;
  for (int round = 0; round < 5000; ++round) {
    const int burst = round % 5;
    for (int i = 0; i < burst && model.size() < r.capacity(); ++i) {
      const std::uint64_t idx = next++ % r.capacity();
      if (std::find(model.begin(), model.end(), idx) != model.end()) break;
      r.enqueue(t0, idx);
      model.push_back(idx);
    }
    for (int i = 0; i < (round % 3) + 1; ++i) {
      const auto got = r.dequeue(t1);
      if (model.empty()) {
        ASSERT_FALSE(got.has_value());
      } else {
        ASSERT_EQ(got, model.front());
        model.pop_front();
      }
    }
  }
  EXPECT_GT(r.tail().cnt, 1000u);
  EXPECT_EQ(r.stats().cycle_regressions, 0u);
}

TEST(Threshold, ResetToMaximumAfterEnqueue) {
  ring_t r(small_config());
  r.enqueue(t0, 1);
  EXPECT_EQ(r.threshold(), 3 * 8 - 1);
  r.enqueue(t0, 2);
  EXPECT_EQ(r.threshold(), 3 * 8 - 1);
  EXPECT_EQ(r.stats().threshold_resets, 1u);
}

TEST(Threshold, NeverExceedsMaximumAtAnyYieldPoint) {
  hooked_ring r(small_config(4));
  std::int64_t max_seen = -1;
  wcq::harness::scoped_hook hook(
      [&](wcq::yield_point, std::uint64_t) { max_seen = std::max(max_seen, r.threshold()); });
  for (int i = 0; i < 2000; ++i) {
    r.enqueue(t0, static_cast<std::uint64_t>(i % 4));
    if (i % 2) {
      r.dequeue(t1);
      r.dequeue(t1);
    }
  }
  while (r.dequeue(t1)) {
  }
  EXPECT_EQ(max_seen, 23);
}

class DrainBound : public ::testing::TestWithParam<bool> {};

TEST_P(DrainBound, EmptyWithinThreeNIterations) {
  queue_config c = small_config(4);
  c.scq_mode = GetParam();
  ring_t r(c);
  r.enqueue(t0, 1);
  ASSERT_EQ(r.dequeue(t1), 1u);
  // Tail far ahead keeps every dequeue attempt on the threshold countdown.
  r.tail_counter().fetch_add_cnt(1000);
  r.reset_stats();
  EXPECT_EQ(r.dequeue(t1), std::nullopt);
  const std::uint64_t iterations = r.stats().deq_attempts;
  EXPECT_LE(iterations, 3 * r.capacity());
  EXPECT_EQ(iterations, 3 * r.capacity());
  EXPECT_LT(r.threshold(), 0);
}

INSTANTIATE_TEST_SUITE_P(Modes, DrainBound, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "scq" : "wcq"; });

TEST(EmptyDequeue, FreshRingWritesNothing) {
  ring_t r(small_config());
  EXPECT_EQ(r.dequeue(t0), std::nullopt);
  const wcq::queue_stats s = r.stats();
  EXPECT_EQ(s.slot_writes, 0u);
  EXPECT_EQ(s.deq_attempts, 0u);
}

TEST(EmptyDequeue, DrainedRingWritesNothing) {
  ring_t r(small_config());
  for (std::uint64_t i = 0; i < 8; ++i) r.enqueue(t0, i);
  while (r.dequeue(t1)) {
  }
  while (r.threshold() >= 0) r.dequeue(t1);
  r.reset_stats();
  for (int i = 0; i < 100000; ++i) ASSERT_EQ(r.dequeue(t1), std::nullopt);
  EXPECT_EQ(r.stats().slot_writes, 0u);
  EXPECT_EQ(r.stats().deq_attempts, 0u);
}

}  // namespace
