#ifndef WCQ_HARNESS_HISTORY_HPP
#define WCQ_HARNESS_HISTORY_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace wcq::harness {

enum class op_kind : std::uint8_t { enqueue, dequeue };
enum class event_kind : std::uint8_t { invoke, respond };

/// One invocation or response. For an enqueue response `ok` is false when
/// the queue reported full; for a dequeue response `ok` is false on empty.
struct history_event {
  std::uint32_t thread;
  event_kind kind;
  op_kind op;
  std::uint64_t value;
  bool ok;
  std::uint64_t timestamp;
};

/// Records events into per-thread buffers reserved up front, stamping them
/// from one shared counter.
class history_recorder {
 public:
  history_recorder(std::uint32_t threads, std::size_t events_per_thread) : logs_(threads) {
    for (auto& log : logs_) log.reserve(events_per_thread);
  }

  void invoke_enqueue(std::uint32_t t, std::uint64_t v) { push(t, event_kind::invoke, op_kind::enqueue, v, true); }
  void respond_enqueue(std::uint32_t t, std::uint64_t v, bool ok) {
    push(t, event_kind::respond, op_kind::enqueue, v, ok);
  }
  void invoke_dequeue(std::uint32_t t) { push(t, event_kind::invoke, op_kind::dequeue, 0, true); }
  void respond_dequeue(std::uint32_t t, std::optional<std::uint64_t> v) {
    push(t, event_kind::respond, op_kind::dequeue, v.value_or(0), v.has_value());
  }

  std::vector<history_event> events() const {
    std::vector<history_event> all;
    for (const auto& log : logs_) all.insert(all.end(), log.begin(), log.end());
    std::sort(all.begin(), all.end(),
              [](const history_event& a, const history_event& b) { return a.timestamp < b.timestamp; });
    return all;
  }

  void clear() {
    for (auto& log : logs_) log.clear();
  }

 private:
  void push(std::uint32_t t, event_kind k, op_kind op, std::uint64_t v, bool ok) {
    logs_[t].push_back({t, k, op, v, ok, clock_.fetch_add(1)});
  }

  std::vector<std::vector<history_event>> logs_;
  std::atomic<std::uint64_t> clock_{0};
};

/// A completed operation: matched invoke/respond pair.
struct operation {
  std::uint32_t thread;
  op_kind op;
  std::uint64_t value;
  bool ok;
  std::uint64_t invoked;
  std::uint64_t responded;
};

struct linearizability_result {
  bool linearizable = false;
  std::string reason;                 // set when the history is malformed
  std::vector<std::size_t> witness;   // indices into `ops`, in linearization order
  std::vector<operation> ops;

  explicit operator bool() const noexcept { return linearizable; }
};

/// Pairs each thread's invoke with its next respond. Returns nullopt if the
/// history is malformed (unmatched or out-of-order events).
inline std::optional<std::vector<operation>> to_operations(const std::vector<history_event>& events) {
  std::vector<operation> ops;
  std::vector<std::optional<std::size_t>> open;
  for (const history_event& e : events) {
    if (e.thread >= open.size()) open.resize(e.thread + 1);
    auto& slot = open[e.thread];
    if (e.kind == event_kind::invoke) {
      if (slot) return std::nullopt;
      slot = ops.size();
      ops.push_back({e.thread, e.op, e.value, true, e.timestamp, 0});
    } else {
      if (!slot || ops[*slot].op != e.op) return std::nullopt;
      operation& o = ops[*slot];
      o.responded = e.timestamp;
      o.ok = e.ok;
      if (e.op == op_kind::dequeue) o.value = e.value;
      slot.reset();
    }
  }
  for (const auto& slot : open)
    if (slot) return std::nullopt;
  return ops;
}

namespace detail {

class fifo_search {
 public:
  fifo_search(const std::vector<operation>& ops, std::optional<std::uint64_t> capacity)
      : ops_(ops), capacity_(capacity), overlap_(ops.size(), 0) {
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t j = 0; j < ops.size(); ++j)
        if (i != j && ops[j].invoked < ops[i].responded && ops[i].invoked < ops[j].responded)
          ++overlap_[i];
  }

  bool run(std::vector<std::size_t>& witness) {
    std::deque<std::uint64_t> state;
    return dfs(0, state, witness);
  }

 private:
  bool dfs(std::uint64_t done, std::deque<std::uint64_t>& state, std::vector<std::size_t>& witness) {
    const std::size_t n = ops_.size();
    if (witness.size() == n) return true;
    if (!seen_.insert(key(done, state)).second) return false;

    std::uint64_t first_response = ~std::uint64_t{0};
    for (std::size_t i = 0; i < n; ++i)
      if (!(done >> i & 1)) first_response = std::min(first_response, ops_[i].responded);

    for (std::size_t i = 0; i < n; ++i) {
      if ((done >> i & 1) || ops_[i].invoked > first_response) continue;
      const operation& o = ops_[i];
      witness.push_back(i);
      const std::uint64_t next = done | (std::uint64_t{1} << i);
      if (o.op == op_kind::enqueue) {
        if (o.ok) {
          if (!capacity_ || state.size() < *capacity_) {
            state.push_back(o.value);
            if (dfs(next, state, witness)) return true;
            state.pop_back();
          }
        } else if (full_allowed(i, state.size()) && dfs(next, state, witness)) {
          return true;
        }
      } else if (o.ok) {
        if (!state.empty() && state.front() == o.value) {
          state.pop_front();
          if (dfs(next, state, witness)) return true;
          state.push_front(o.value);
        }
      } else if (state.empty() && dfs(next, state, witness)) {
        return true;
      }
      witness.pop_back();
    }
    return false;
  }

  // A queue of indirection slots may report full while indices are held by
  // operations still in flight; each overlapping operation holds at most one.
  bool full_allowed(std::size_t i, std::size_t size) const {
    return capacity_ && size + overlap_[i] >= *capacity_;
  }

  static std::string key(std::uint64_t done, const std::deque<std::uint64_t>& state) {
    std::string k(reinterpret_cast<const char*>(&done), sizeof done);
    for (std::uint64_t v : state) k.append(reinterpret_cast<const char*>(&v), sizeof v);
    return k;
  }

  const std::vector<operation>& ops_;
  std::optional<std::uint64_t> capacity_;
  std::vector<std::size_t> overlap_;
  std::unordered_set<std::string> seen_;
};

}  // namespace detail

/**
 * Wing-Gong style search for a sequential FIFO witness that respects
 * real-time order. Visited (done-set, queue-contents) states are memoized.
 * Supports up to 64 operations. With a capacity, successful enqueues may not
 * exceed it and a "full" response must be explainable (see fifo_search).
 */
inline linearizability_result check_linearizable(const std::vector<history_event>& events,
                                                 std::optional<std::uint64_t> capacity = std::nullopt) {
  linearizability_result r;
  auto ops = to_operations(events);
  if (!ops) {
    r.reason = "malformed history";
    return r;
  }
  if (ops->size() > 64) {
    r.reason = "history has more than 64 operations";
    return r;
  }
  r.ops = std::move(*ops);
  detail::fifo_search search(r.ops, capacity);
  r.linearizable = search.run(r.witness);
  if (!r.linearizable) r.witness.clear();
  return r;
}

}  // namespace wcq::harness

#endif  // WCQ_HARNESS_HISTORY_HPP
