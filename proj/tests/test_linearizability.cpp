#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "wcq/harness/history.hpp"
#include "wcq/harness/history_runner.hpp"

namespace {

using namespace wcq::harness;

// Builds histories from explicit [invoke, respond) intervals.
class builder {
 public:
  builder& enq(std::uint32_t t, std::uint64_t v, std::uint64_t from, std::uint64_t to, bool ok = true) {
    events_.push_back({t, event_kind::invoke, op_kind::enqueue, v, true, from});
    events_.push_back({t, event_kind::respond, op_kind::enqueue, v, ok, to});
    return *this;
  }
  builder& deq(std::uint32_t t, std::optional<std::uint64_t> v, std::uint64_t from, std::uint64_t to) {
    events_.push_back({t, event_kind::invoke, op_kind::dequeue, 0, true, from});
    events_.push_back({t, event_kind::respond, op_kind::dequeue, v.value_or(0), v.has_value(), to});
    return *this;
  }
  std::vector<history_event> build() const {
    auto e = events_;
    std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return e;
  }

 private:
  std::vector<history_event> events_;
};

constexpr std::uint64_t a = 10, b = 20, c = 30;

TEST(Checker, SequentialEnqueueThenDequeue) {
  const auto r = check_linearizable(builder().enq(0, a, 0, 1).deq(1, a, 2, 3).build());
  EXPECT_TRUE(r);
  EXPECT_EQ(r.witness, (std::vector<std::size_t>{0, 1}));
}

TEST(Checker, UnknownValueRejected) {
  EXPECT_FALSE(check_linearizable(builder().enq(0, a, 0, 1).deq(1, b, 2, 3).build()));
}

TEST(Checker, DuplicateDequeueRejected) {
  EXPECT_FALSE(check_linearizable(builder().enq(0, a, 0, 1).deq(1, a, 2, 3).deq(2, a, 4, 5).build()));
}

TEST(Checker, SequentialOrderViolationRejected) {
  EXPECT_FALSE(check_linearizable(builder().enq(0, a, 0, 1).enq(0, b, 2, 3).deq(1, b, 4, 5).build()));
}

TEST(Checker, OverlappingEnqueuesMayReorder) {
  EXPECT_TRUE(check_linearizable(
      builder().enq(0, a, 0, 5).enq(1, b, 1, 4).deq(2, b, 6, 7).deq(2, a, 8, 9).build()));
}

TEST(Checker, DequeueBeforeEnqueueInvokedRejected) {
  EXPECT_FALSE(check_linearizable(builder().deq(1, a, 0, 1).enq(0, a, 2, 3).build()));
}

TEST(Checker, DequeueOverlappingEnqueueAccepted) {
  EXPECT_TRUE(check_linearizable(builder().enq(0, a, 0, 3).deq(1, a, 1, 2).build()));
}

TEST(Checker, EmptyWhileItemPresentRejected) {
  EXPECT_FALSE(check_linearizable(builder().enq(0, a, 0, 1).deq(1, std::nullopt, 2, 3).build()));
}

TEST(Checker, EmptyOverlappingEnqueueAccepted) {
  EXPECT_TRUE(check_linearizable(builder().enq(0, a, 0, 3).deq(1, std::nullopt, 1, 2).build()));
}

TEST(Checker, EmptyAfterDrainAccepted) {
  EXPECT_TRUE(check_linearizable(
      builder().enq(0, a, 0, 1).deq(1, a, 2, 3).deq(1, std::nullopt, 4, 5).build()));
}

TEST(Checker, FullOnlyWhenAtCapacity) {
  EXPECT_TRUE(check_linearizable(builder().enq(0, a, 0, 1).enq(0, b, 2, 3, false).build(), 1));
  EXPECT_FALSE(check_linearizable(builder().enq(0, b, 0, 1, false).build(), 1));
  EXPECT_FALSE(check_linearizable(builder().enq(0, a, 0, 1).enq(0, b, 2, 3).build(), 1));
}

TEST(Checker, FullExplainedByInFlightEnqueue) {
  // The slow enqueue of a already holds the only free index when b fails,
  // yet a is linearized after the empty dequeue.
  const auto h = builder().enq(0, a, 0, 10).enq(1, b, 2, 3, false).deq(2, std::nullopt, 4, 5).build();
  EXPECT_TRUE(check_linearizable(h, 1));
  EXPECT_FALSE(check_linearizable(h, 2));
}

TEST(Checker, WitnessRespectsRealTime) {
  const auto r = check_linearizable(
      builder().enq(0, a, 0, 1).enq(1, b, 2, 3).enq(0, c, 4, 5).deq(2, a, 6, 7).deq(2, b, 8, 9).deq(2, c, 10, 11).build());
  ASSERT_TRUE(r);
  for (std::size_t i = 1; i < r.witness.size(); ++i)
    EXPECT_LT(r.ops[r.witness[i - 1]].invoked, r.ops[r.witness[i]].responded);
}

TEST(Checker, MalformedHistory) {
  std::vector<history_event> e = builder().enq(0, a, 0, 1).build();
  e.pop_back();
  const auto r = check_linearizable(e);
  EXPECT_FALSE(r);
  EXPECT_EQ(r.reason, "malformed history");
}

TEST(Checker, TooManyOperations) {
  builder h;
  for (std::uint64_t i = 0; i < 65; ++i) h.enq(0, i, 2 * i, 2 * i + 1);
  const auto r = check_linearizable(h.build());
  EXPECT_FALSE(r);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Checker, WideConcurrentHistoryTerminates) {
  builder h;
  for (std::uint32_t t = 0; t < 6; ++t) h.enq(t, t, t, 100 + t);
  for (std::uint32_t t = 6; t < 12; ++t) h.deq(t, 11 - t, t, 100 + t);
  EXPECT_TRUE(check_linearizable(h.build()));
}

TEST(Recorder, PairsInvokeAndRespond) {
  history_recorder rec(2, 8);
  rec.invoke_enqueue(0, 5);
  rec.invoke_dequeue(1);
  rec.respond_enqueue(0, 5, true);
  rec.respond_dequeue(1, std::nullopt);
  const auto ops = to_operations(rec.events());
  ASSERT_TRUE(ops.has_value());
  ASSERT_EQ(ops->size(), 2u);
  EXPECT_EQ((*ops)[0].op, op_kind::enqueue);
  EXPECT_EQ((*ops)[1].op, op_kind::dequeue);
  EXPECT_FALSE((*ops)[1].ok);
  EXPECT_LT((*ops)[0].invoked, (*ops)[1].invoked);
  EXPECT_GT((*ops)[0].responded, (*ops)[1].invoked);
}

TEST(RecordedHistories, AllLinearizable) {
  history_spec spec;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    spec.seed = seed;
    const auto events = record_queue_history(spec);
    const auto r = check_linearizable(events, spec.config.capacity());
    ASSERT_TRUE(r) << "seed " << seed << " " << r.reason;
  }
}

TEST(RecordedHistories, AllLinearizableOnForcedSlowPath) {
  history_spec spec;
  spec.config.patience_enq = 1;
  spec.config.patience_deq = 1;
  spec.config.help_delay = 1;
  spec.ops_per_thread = 8;
  spec.yield_probability = 0.5;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    spec.seed = seed;
    const auto r = check_linearizable(record_queue_history(spec), spec.config.capacity());
    ASSERT_TRUE(r) << "seed " << seed;
  }
}

TEST(RecordedHistories, CorruptedHistoryDetected) {
  history_spec spec;
  spec.enqueue_ratio = 0.7;
  int corrupted = 0;
  for (std::uint64_t seed = 1; seed <= 50 && corrupted < 10; ++seed) {
    spec.seed = seed;
    auto events = record_queue_history(spec);
    auto it = std::find_if(events.begin(), events.end(), [](const history_event& e) {
      return e.kind == event_kind::respond && e.op == op_kind::dequeue && e.ok;
    });
    if (it == events.end()) continue;
    it->value += 12345;  // a value nobody enqueued
    ++corrupted;
    EXPECT_FALSE(check_linearizable(events, spec.config.capacity())) << "seed " << seed;
  }
  EXPECT_GT(corrupted, 0);
}

}  // namespace
