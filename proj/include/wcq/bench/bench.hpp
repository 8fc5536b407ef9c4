#ifndef WCQ_BENCH_BENCH_HPP
#define WCQ_BENCH_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <barrier>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

#include "wcq/harness/alloc_tracking.hpp"
#include "wcq/indirect_queue.hpp"
#include "wcq/mutex_queue.hpp"

namespace wcq::bench {

enum class scenario { pairwise, mixed50, empty, memory };
enum class queue_kind { wcq, scq, mutex };

inline const char* to_string(scenario s) noexcept {
  switch (s) {
    case scenario::pairwise: return "pairwise";
    case scenario::mixed50: return "mixed50";
    case scenario::empty: return "empty";
    case scenario::memory: return "memory";
  }
  return "?";
}

inline const char* to_string(queue_kind q) noexcept {
  switch (q) {
    case queue_kind::wcq: return "wcq";
    case queue_kind::scq: return "scq";
    case queue_kind::mutex: return "mutex";
  }
  return "?";
}

inline std::optional<scenario> parse_scenario(const std::string& s) {
  for (scenario v : {scenario::pairwise, scenario::mixed50, scenario::empty, scenario::memory})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

inline std::optional<queue_kind> parse_queue(const std::string& s) {
  for (queue_kind v : {queue_kind::wcq, queue_kind::scq, queue_kind::mutex})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

struct bench_spec {
  scenario sc = scenario::pairwise;
  queue_kind queue = queue_kind::wcq;
  std::uint32_t threads = 8;
  std::uint64_t ops = 10'000'000;  // per measurement, split across threads
  std::uint32_t repeats = 10;
  unsigned ring_order = 16;
  std::uint32_t patience_enq = 16;
  std::uint32_t patience_deq = 64;
  std::uint32_t help_delay = 64;
  std::uint64_t seed = 1;
  bool pin = true;
  bool delays = true;              // memory scenario only
  std::uint32_t max_delay = 512;   // spin iterations, uniform in [0, max_delay]

  queue_config config() const {
    queue_config c;
    c.ring_order = ring_order;
    c.num_threads = threads;
    c.patience_enq = patience_enq;
    c.patience_deq = patience_deq;
    c.help_delay = help_delay;
    c.scq_mode = queue == queue_kind::scq;
    return c;
  }

  void validate() const {
    if (threads == 0) throw std::invalid_argument("threads must be positive");
    if (repeats == 0) throw std::invalid_argument("repeats must be positive");
    if (ops < threads) throw std::invalid_argument("ops must be at least the thread count");
    config().validate();
  }
};

struct bench_row {
  std::string scenario;
  std::string queue;
  std::uint32_t threads = 0;
  std::uint64_t ops = 0;
  std::uint64_t ns = 0;
  double mops = 0;
  double cv = 0;
  std::uint64_t slow_enq = 0;
  std::uint64_t slow_deq = 0;
  std::uint64_t alloc_bytes = 0;

  friend bool operator==(const bench_row&, const bench_row&) = default;
};

inline constexpr const char* csv_header = "scenario,queue,threads,ops,ns,mops,cv,slow_enq,slow_deq,alloc_bytes";

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

inline void emit_csv(const std::vector<bench_row>& rows, std::ostream& out) {
  out << csv_header << '\n';
  for (const bench_row& r : rows)
    out << r.scenario << ',' << r.queue << ',' << r.threads << ',' << r.ops << ',' << r.ns << ','
        << format_fixed(r.mops, 4) << ',' << format_fixed(r.cv, 4) << ',' << r.slow_enq << ','
        << r.slow_deq << ',' << r.alloc_bytes << '\n';
}

/// Parses the output of emit_csv. Throws std::runtime_error on malformed input.
inline std::vector<bench_row> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header) throw std::runtime_error("missing CSV header");
  std::vector<bench_row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw std::runtime_error("expected 10 fields: " + line);
    bench_row r;
    r.scenario = f[0];
    r.queue = f[1];
    r.threads = static_cast<std::uint32_t>(std::stoul(f[2]));
    r.ops = std::stoull(f[3]);
    r.ns = std::stoull(f[4]);
    r.mops = std::stod(f[5]);
    r.cv = std::stod(f[6]);
    r.slow_enq = std::stoull(f[7]);
    r.slow_deq = std::stoull(f[8]);
    r.alloc_bytes = std::stoull(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

inline void pin_to_cpu(std::uint32_t index) {
#if defined(__linux__)
  const unsigned n = std::max(1u, std::thread::hardware_concurrency());
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(index % n, &set);
  pthread_setaffinity_np(pthread_self(), sizeof set, &set);
#else
  (void)index;
#endif
}

inline void spin(std::uint32_t iterations) {
  for (std::uint32_t i = 0; i < iterations; ++i) std::atomic_signal_fence(std::memory_order_seq_cst);
}

struct slow_counts {
  std::uint64_t enq = 0;
  std::uint64_t deq = 0;
};

template <class Queue>
slow_counts read_slow(const Queue& q) {
  if constexpr (requires { q.stats(); }) {
    const queue_stats s = q.stats();
    return {s.slow_enq, s.slow_deq};
  } else {
    return {};
  }
}

// Worker threads live across all repeats; every measured section starts and
// ends on a barrier shared with the timing thread.
template <class Queue>
std::vector<bench_row> run_on(Queue& q, const bench_spec& spec) {
  const std::uint32_t n = spec.threads;
  const std::uint64_t per_thread = spec.ops / n;
  const std::uint64_t total_ops = per_thread * n;
  const std::uint32_t rounds = spec.repeats + 1;  // first round is warmup
  const bool delays = spec.sc == scenario::memory && spec.delays;

  std::barrier sync(static_cast<std::ptrdiff_t>(n) + 1);
  auto worker = [&](std::uint32_t t) {
    if (spec.pin) pin_to_cpu(t);
    thread_handle h = q.register_thread();
    std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + t);
    std::uniform_int_distribution<std::uint32_t> delay(0, spec.max_delay);
    std::uint64_t next = std::uint64_t{t} << 40;
    for (std::uint32_t round = 0; round < rounds; ++round) {
      sync.arrive_and_wait();
      const std::uint64_t count = round == 0 ? std::min<std::uint64_t>(per_thread, 100000) : per_thread;
      switch (spec.sc) {
        case scenario::pairwise:
          for (std::uint64_t i = 0; i + 1 < count; i += 2) {
            q.enqueue(h, next++);
            (void)q.dequeue(h);
          }
          break;
        case scenario::mixed50:
        case scenario::memory:
          for (std::uint64_t i = 0; i < count; ++i) {
            if (rng() >> 63) q.enqueue(h, next++);
            else (void)q.dequeue(h);
            if (delays) spin(delay(rng));
          }
          break;
        case scenario::empty:
          for (std::uint64_t i = 0; i < count; ++i) (void)q.dequeue(h);
          break;
      }
      sync.arrive_and_wait();
      // Leave the queue empty for the next round.
      if (t == 0)
        while (q.dequeue(h)) {
        }
      sync.arrive_and_wait();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::uint32_t t = 0; t < n; ++t) threads.emplace_back(worker, t);

  std::vector<bench_row> rows;
  rows.reserve(spec.repeats + 1);
  for (std::uint32_t round = 0; round < rounds; ++round) {
    const slow_counts before = read_slow(q);
    const auto alloc_before = harness::allocation_counters::now();
    const auto start = std::chrono::steady_clock::now();
    sync.arrive_and_wait();
    sync.arrive_and_wait();
    const auto stop = std::chrono::steady_clock::now();
    const auto alloc_after = harness::allocation_counters::now();
    const slow_counts after = read_slow(q);
    sync.arrive_and_wait();
    if (round == 0) continue;

    bench_row r;
    r.scenario = to_string(spec.sc);
    r.queue = to_string(spec.queue);
    r.threads = n;
    r.ops = total_ops;
    r.ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
    r.mops = r.ns ? static_cast<double>(total_ops) * 1e3 / static_cast<double>(r.ns) : 0.0;
    r.slow_enq = after.enq - before.enq;
    r.slow_deq = after.deq - before.deq;
    r.alloc_bytes = alloc_after.bytes - alloc_before.bytes;
    rows.push_back(r);
  }
  for (auto& t : threads) t.join();
  return rows;
}

}  // namespace detail

/// Appends the summary row: means over the repeats and the coefficient of
/// variation of throughput (sample standard deviation over mean).
inline bench_row summarize(const std::vector<bench_row>& repeats) {
  bench_row s = repeats.front();
  double ns = 0, mops = 0, enq = 0, deq = 0;
  std::uint64_t alloc = 0;
  for (const bench_row& r : repeats) {
    ns += static_cast<double>(r.ns);
    mops += r.mops;
    enq += static_cast<double>(r.slow_enq);
    deq += static_cast<double>(r.slow_deq);
    alloc = std::max(alloc, r.alloc_bytes);
  }
  const double k = static_cast<double>(repeats.size());
  s.ns = static_cast<std::uint64_t>(std::llround(ns / k));
  s.mops = mops / k;
  s.slow_enq = static_cast<std::uint64_t>(std::llround(enq / k));
  s.slow_deq = static_cast<std::uint64_t>(std::llround(deq / k));
  s.alloc_bytes = alloc;
  double var = 0;
  for (const bench_row& r : repeats) var += (r.mops - s.mops) * (r.mops - s.mops);
  s.cv = repeats.size() > 1 && s.mops > 0 ? std::sqrt(var / (k - 1)) / s.mops : 0.0;
  return s;
}

/// One row per repeat followed by the summary row.
inline std::vector<bench_row> run_bench(const bench_spec& spec) {
  spec.validate();
  const queue_config cfg = spec.config();
  std::vector<bench_row> rows;
  if (spec.queue == queue_kind::mutex) {
    mutex_queue<std::uint64_t> q(cfg);
    rows = detail::run_on(q, spec);
  } else {
    indirect_queue<std::uint64_t, instrumented_traits> q(cfg);
    rows = detail::run_on(q, spec);
  }
  rows.push_back(summarize(rows));
  return rows;
}

}  // namespace wcq::bench

#endif  // WCQ_BENCH_BENCH_HPP
