#ifndef WCQ_HARNESS_STRESS_HPP
#define WCQ_HARNESS_STRESS_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "wcq/harness/invariants.hpp"
#include "wcq/indirect_queue.hpp"

namespace wcq::harness {

enum class stress_mix {
  split,     // dedicated producers and consumers
  pairwise,  // every thread alternates enqueue and dequeue
  random     // every thread flips a seeded coin per operation
};

struct stress_spec {
  stress_mix mix = stress_mix::split;
  std::uint32_t producers = 1;   // split mix
  std::uint32_t consumers = 1;   // split mix
  std::uint32_t threads = 2;     // pairwise and random mixes
  std::uint64_t ops_per_thread = 100000;
  queue_config config;           // carries ring order and patience overrides
  std::uint64_t seed = 1;
  bool sample_invariants = false;

  std::uint32_t worker_count() const noexcept {
    return mix == stress_mix::split ? producers + consumers : threads;
  }
};

struct violation {
  std::string kind;  // loss, duplication, order, unknown, invariant
  std::string detail;
};

struct stress_report {
  std::vector<std::uint64_t> enqueued;  // per worker
  std::vector<std::uint64_t> dequeued;  // per worker
  std::uint64_t residual = 0;           // drained after the workers joined
  std::uint64_t full_rejections = 0;
  std::uint64_t invariant_samples = 0;
  std::vector<violation> violations;
  queue_stats stats;
  double seconds = 0;

  bool passed() const noexcept { return violations.empty(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["passed"] = passed();
    j["enqueued"] = enqueued;
    j["dequeued"] = dequeued;
    j["residual"] = residual;
    j["full_rejections"] = full_rejections;
    j["invariant_samples"] = invariant_samples;
    j["seconds"] = seconds;
    auto& v = j["violations"] = nlohmann::json::array();
    for (const auto& x : violations) v.push_back({{"kind", x.kind}, {"detail", x.detail}});
    j["stats"] = {{"enq_attempts", stats.enq_attempts},
                  {"deq_attempts", stats.deq_attempts},
                  {"enq_retries", stats.enq_retries},
                  {"deq_retries", stats.deq_retries},
                  {"slow_enq", stats.slow_enq},
                  {"slow_deq", stats.slow_deq},
                  {"slow_faa_rounds", stats.slow_faa_rounds},
                  {"help_dispatches", stats.help_dispatches},
                  {"threshold_resets", stats.threshold_resets},
                  {"slot_writes", stats.slot_writes},
                  {"slow_inserts", stats.slow_inserts},
                  {"phase2_clear_failures", stats.phase2_clear_failures},
                  {"catchup_attempts", stats.catchup_attempts},
                  {"cycle_regressions", stats.cycle_regressions},
                  {"note_regressions", stats.note_regressions},
                  {"max_slot_loop", stats.max_slot_loop}};
    return j;
  }
};

inline constexpr unsigned payload_seq_bits = 40;

constexpr std::uint64_t make_payload(std::uint64_t producer, std::uint64_t seq) noexcept {
  return producer << payload_seq_bits | seq;
}

namespace detail {

// Shared bookkeeping of one stress run. Dequeued payloads are checked as they
// arrive: a per-producer "seen" bitmap catches duplicates and, at the end,
// losses; per-consumer last sequence numbers catch reordering.
class stress_ledger {
 public:
  stress_ledger(std::uint32_t producers, std::uint64_t per_producer, std::uint32_t streams)
      : per_producer_(per_producer),
        seen_(producers),
        last_seq_(static_cast<std::size_t>(streams) * producers, -1) {
    for (auto& s : seen_) s = std::make_unique<std::atomic<std::uint8_t>[]>(per_producer);
  }

  void observe(std::uint32_t stream, std::uint64_t payload) {
    const std::uint64_t producer = payload >> payload_seq_bits;
    const std::uint64_t seq = payload & ((std::uint64_t{1} << payload_seq_bits) - 1);
    if (producer >= seen_.size() || seq >= per_producer_) {
      record("unknown", "payload " + std::to_string(payload) + " was never enqueued");
      return;
    }
    if (seen_[producer][seq].exchange(1) != 0)
      record("duplication", "producer " + std::to_string(producer) + " item " + std::to_string(seq));
    std::int64_t& last = last_seq_[static_cast<std::size_t>(stream) * seen_.size() + producer];
    if (static_cast<std::int64_t>(seq) <= last)
      record("order", "stream " + std::to_string(stream) + " saw producer " + std::to_string(producer) +
                          " item " + std::to_string(seq) + " after " + std::to_string(last));
    last = static_cast<std::int64_t>(seq);
  }

  void check_losses(const std::vector<std::uint64_t>& produced) {
    for (std::size_t p = 0; p < seen_.size(); ++p) {
      std::uint64_t missing = 0, first = 0;
      for (std::uint64_t s = 0; s < produced[p]; ++s)
        if (seen_[p][s].load() == 0 && missing++ == 0) first = s;
      if (missing)
        record("loss", "producer " + std::to_string(p) + " lost " + std::to_string(missing) +
                           " items, first " + std::to_string(first));
    }
  }

  void record(std::string kind, std::string detail) {
    std::lock_guard<std::mutex> lock(mu_);
    ++total_;
    if (violations_.size() < 64) violations_.push_back({std::move(kind), std::move(detail)});
  }

  std::vector<violation> take() { return std::move(violations_); }

 private:
  std::uint64_t per_producer_;
  std::vector<std::unique_ptr<std::atomic<std::uint8_t>[]>> seen_;
  std::vector<std::int64_t> last_seq_;  // indexed by stream * producers + producer
  std::mutex mu_;
  std::vector<violation> violations_;
  std::uint64_t total_ = 0;
};

}  // namespace detail

/**
 * Runs a concurrent workload on an indirect_queue and checks no loss, no
 * duplication, per-producer FIFO order, index conservation at quiescence and
 * the instrumentation invariants (no Cycle or Note regression, exactly one
 * insertion per slow enqueue request).
 */
template <class Traits = instrumented_traits>
stress_report run_stress(const stress_spec& spec) {
  queue_config cfg = spec.config;
  const std::uint32_t workers = spec.worker_count();
  if (cfg.num_threads < workers + 1) cfg.num_threads = workers + 1;  // +1 for the drain
  indirect_queue<std::uint64_t, Traits> q(cfg);

  const bool split = spec.mix == stress_mix::split;
  const std::uint32_t producers = split ? spec.producers : spec.threads;
  // Streams: one per worker plus the final drain.
  detail::stress_ledger ledger(producers, spec.ops_per_thread, workers + 1);

  stress_report report;
  report.enqueued.assign(workers, 0);
  report.dequeued.assign(workers, 0);
  std::vector<std::uint64_t> full(workers, 0);

  const std::uint64_t total_items = split ? std::uint64_t{spec.producers} * spec.ops_per_thread : 0;
  std::atomic<std::uint64_t> consumed{0};
  std::atomic<std::uint32_t> ready{0};
  std::atomic<bool> go{false}, done{false};

  auto worker = [&](std::uint32_t w) {
    thread_handle h = q.register_thread();
    std::uint64_t& enq = report.enqueued[w];
    std::uint64_t& deq = report.dequeued[w];
    auto take = [&] {
      if (auto v = q.dequeue(h)) {
        ledger.observe(w, *v);
        ++deq;
        return true;
      }
      return false;
    };
    auto put = [&](std::uint32_t producer) {
      while (!q.enqueue(h, make_payload(producer, enq))) {
        ++full[w];
        std::this_thread::yield();
      }
      ++enq;
    };
    ready.fetch_add(1);
    while (!go.load()) std::this_thread::yield();

    if (split) {
      if (w < spec.producers) {
        for (std::uint64_t i = 0; i < spec.ops_per_thread; ++i) put(w);
      } else {
        while (consumed.load() < total_items) {
          if (take()) consumed.fetch_add(1);
          else std::this_thread::yield();
        }
      }
    } else if (spec.mix == stress_mix::pairwise) {
      for (std::uint64_t i = 0; i < spec.ops_per_thread; ++i) {
        put(w);
        take();
      }
    } else {
      std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + w);
      for (std::uint64_t i = 0; i < spec.ops_per_thread; ++i) {
        if (!(rng() & 1)) {
          take();
        } else if (q.enqueue(h, make_payload(w, enq))) {
          ++enq;
        } else {
          ++full[w];  // every worker may be enqueueing, so a full queue is not waited on
        }
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::uint32_t w = 0; w < workers; ++w) threads.emplace_back(worker, w);

  std::vector<invariant_sampler<Traits>> samplers;
  std::thread sampler;
  if (spec.sample_invariants) {
    samplers.emplace_back(q.aq());
    samplers.emplace_back(q.fq());
    sampler = std::thread([&] {
      while (!done.load()) {
        for (auto& s : samplers) s.sample();
        std::this_thread::yield();
      }
    });
  }

  while (ready.load() < workers) std::this_thread::yield();
  const auto start = std::chrono::steady_clock::now();
  go.store(true);
  for (auto& t : threads) t.join();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  done.store(true);
  if (sampler.joinable()) sampler.join();

  thread_handle drain = q.register_thread();
  while (auto v = q.dequeue(drain)) {
    ledger.observe(workers, *v);
    ++report.residual;
  }

  std::vector<std::uint64_t> produced(producers, 0);
  for (std::uint32_t p = 0; p < producers; ++p) produced[p] = report.enqueued[p];
  ledger.check_losses(produced);
  if (!q.indices_conserved(drain.id())) ledger.record("invariant", "index conservation failed");

  report.stats = q.stats();
  const queue_stats& s = report.stats;
  if (s.cycle_regressions) ledger.record("invariant", std::to_string(s.cycle_regressions) + " cycle regressions");
  if (s.note_regressions) ledger.record("invariant", std::to_string(s.note_regressions) + " note regressions");
  if (Traits::instrumented && s.slow_inserts != s.slow_enq)
    ledger.record("invariant", std::to_string(s.slow_enq) + " slow enqueue requests but " +
                                   std::to_string(s.slow_inserts) + " slow insertions");
  for (auto& smp : samplers) {
    report.invariant_samples += smp.samples();
    for (const auto& msg : smp.violations()) ledger.record("invariant", msg);
  }
  for (std::uint64_t f : full) report.full_rejections += f;
  report.violations = ledger.take();
  return report;
}

}  // namespace wcq::harness

#endif  // WCQ_HARNESS_STRESS_HPP
