#ifndef WCQ_TESTS_HELPING_REPLAY_HPP
#define WCQ_TESTS_HELPING_REPLAY_HPP

// Scripted replay of the enqueue slow-path example: T3 loses its fast path,
// T1 and T2 help it concurrently and converge on one Tail increment.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcq/harness/hooks.hpp"
#include "wcq/harness/scheduler.hpp"
#include "wcq/ring.hpp"

namespace helping_replay {

inline constexpr wcq::thread_id id_t1{0};
inline constexpr wcq::thread_id id_t2{1};
inline constexpr wcq::thread_id id_t3{2};
inline constexpr wcq::thread_id id_d{3};

inline wcq::queue_config scripted_config() {
  wcq::queue_config c;
  c.ring_order = 3;  // 2n = 8, n = 4
  c.num_threads = 4;
  c.patience_enq = 1;
  c.help_delay = 1000;
  c.cache_line_bytes = 0;
  return c;
}

inline std::string local_str(std::uint64_t v) {
  std::string s = std::to_string(wcq::counter_of(v));
  if (v & wcq::inc_flag) s += "|INC";
  if (v & wcq::fin_flag) s += "|FIN";
  return s;
}

template <class Ring>
std::string slot_str(const Ring& q, std::size_t j) {
  const wcq::entry_fields f = q.slot_fields(j);
  return "{" + std::to_string(f.cycle) + "," + std::to_string(f.safe) + "," + std::to_string(f.enq) +
         "," + std::to_string(f.index) + "}";
}

template <class Ring>
std::string snapshot(const Ring& q) {
  const wcq::counter_ref t = q.tail();
  return "Tail={" + std::to_string(t.cnt) + "," + std::to_string(t.ref) +
         "} T3.local=" + local_str(q.record(id_t3).local_tail.load()) + " s1=" + slot_str(q, 1) +
         " s2=" + slot_str(q, 2);
}

// Leaves Tail = Head = 9 with slot 0 consumed, so the next enqueue claims
// position 9 and a dequeuer can steal its slot.
template <class Ring>
bool prelude(Ring& q) {
  q.enqueue(id_d, 0);
  return q.dequeue(id_d) == 0u && q.tail().cnt == 9 && q.head().cnt == 9;
}

inline const std::vector<std::string>& expected_trace() {
  static const std::vector<std::string> trace = {
      "T3 -> after-tail-faa | Tail={10,0} T3.local=0 s1={0,1,1,6} s2={0,1,1,6}",
      "D -> end | Tail={10,0} T3.local=0 s1={1,1,1,6} s2={0,1,1,6}",
      "T3 -> slow-path-begin | Tail={10,0} T3.local=9 s1={1,1,1,6} s2={0,1,1,6}",
      "T1 -> after-global-install | Tail={11,1} T3.local=10|INC s1={1,1,1,6} s2={0,1,1,6}",
      "T2 -> slow-faa-done | Tail={11,0} T3.local=10 s1={1,1,1,6} s2={0,1,1,6}",
      "T1 -> end | Tail={11,0} T3.local=10|FIN s1={1,1,1,6} s2={1,1,1,3}",
      "T2 -> end | Tail={11,0} T3.local=10|FIN s1={1,1,1,6} s2={1,1,1,3}",
      "T3 -> end | Tail={11,0} T3.local=10|FIN s1={1,1,1,6} s2={1,1,1,3}",
  };
  return trace;
}

struct outcome {
  bool prelude_ok = false;
  wcq::harness::scripted_scheduler::replay_result replay;
  std::optional<std::uint64_t> t1_agreed, t2_agreed;  // slow_faa results
  std::size_t installs_t1 = 0, installs_t2 = 0, installs_t3 = 0;
  wcq::queue_stats total, t1, t2, t3;
  std::uint64_t t3_local = 0;
  bool t3_pending = true;
  std::uint64_t t3_seq1 = 0;
  std::uint64_t tail_after = 0;
  std::optional<std::uint64_t> d_result{99};
  std::optional<std::uint64_t> drained_first, drained_second{99};
};

template <class Traits>
outcome run() {
  using wcq::yield_point;
  outcome out;
  wcq::ring<Traits> q(scripted_config());
  out.prelude_ok = prelude(q);
  if (!out.prelude_ok) return out;

  {
    wcq::harness::scripted_scheduler s;
    const auto t1 = s.spawn("T1", [&] { q.help_record(id_t1, id_t3); });
    const auto t2 = s.spawn("T2", [&] { q.help_record(id_t2, id_t3); });
    const auto t3 = s.spawn("T3", [&] { q.enqueue(id_t3, 3); });
    const auto d = s.spawn("D", [&] { out.d_result = q.dequeue(id_d); });

    out.replay = s.replay(
        {
            {t3, yield_point::after_tail_faa},
            {d, std::nullopt},
            {t3, yield_point::slow_path_begin},
            {t1, yield_point::after_global_install},
            {t2, yield_point::slow_faa_done},
            {t1, std::nullopt},
            {t2, std::nullopt},
            {t3, std::nullopt},
        },
        [&](std::size_t) { return snapshot(q); });
    out.t1_agreed = s.last_arg(t1, yield_point::slow_faa_done);
    out.t2_agreed = s.last_arg(t2, yield_point::slow_faa_done);
    out.installs_t1 = s.hits(t1, yield_point::after_global_install);
    out.installs_t2 = s.hits(t2, yield_point::after_global_install);
    out.installs_t3 = s.hits(t3, yield_point::after_global_install);
  }
  out.total = q.stats();
  out.t1 = q.stats(id_t1);
  out.t2 = q.stats(id_t2);
  out.t3 = q.stats(id_t3);
  out.t3_local = q.record(id_t3).local_tail.load();
  out.t3_pending = q.record(id_t3).pending.load();
  out.t3_seq1 = q.record(id_t3).seq1.load();
  out.tail_after = q.tail().cnt;
  out.drained_first = q.dequeue(id_d);
  out.drained_second = q.dequeue(id_d);
  return out;
}

}  // namespace helping_replay

#endif  // WCQ_TESTS_HELPING_REPLAY_HPP
