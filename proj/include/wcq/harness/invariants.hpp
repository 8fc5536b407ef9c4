#ifndef WCQ_HARNESS_INVARIANTS_HPP
#define WCQ_HARNESS_INVARIANTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wcq/ring.hpp"

namespace wcq::harness {

/**
 * Concurrent observer for per-record invariants of one ring:
 *
 *  - Counter(local_tail) <= Tail.cnt and Counter(local_head) <= Head.cnt
 *  - within one request, a local word that carries FIN never changes again
 *
 * A sample of a local word is attributed to request s only when seq1 and
 * seq2 both read s before and after it, which brackets the owner's
 * publication of that word. Call sample() from any thread; it only reads.
 */
template <class Traits>
class invariant_sampler {
 public:
  explicit invariant_sampler(const ring<Traits>& r) : ring_(r), last_(r.num_threads()) {}

  void sample() {
    for (std::uint32_t i = 0; i < ring_.num_threads(); ++i) {
      const thread_record& rec = ring_.record(thread_id{i});
      check_local(i, rec, rec.local_tail, ring_.tail_counter(), last_[i].tail, "tail");
      check_local(i, rec, rec.local_head, ring_.head_counter(), last_[i].head, "head");
    }
    ++samples_;
  }

  std::uint64_t samples() const noexcept { return samples_; }
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  struct fin_seen {
    std::uint64_t seq = 0;
    std::uint64_t word = 0;
  };
  struct per_record {
    fin_seen tail, head;
  };

  template <class Global>
  void check_local(std::uint32_t id, const thread_record& rec, const std::atomic<std::uint64_t>& local,
                   const Global& global, fin_seen& last, const char* which) {
    const std::uint64_t s1 = rec.seq1.load();
    const std::uint64_t s2 = rec.seq2.load();
    const std::uint64_t w = local.load();
    const std::uint64_t g = global.load_cnt();
    if (counter_of(w) > g)
      report("record " + std::to_string(id) + " local " + which + " " + std::to_string(counter_of(w)) +
             " ahead of global " + std::to_string(g));
    if (rec.seq1.load() != s1 || rec.seq2.load() != s2 || s1 != s2) return;
    if (last.seq == s1 && last.word != w)
      report("record " + std::to_string(id) + " local " + which + " changed after FIN in request " +
             std::to_string(s1));
    if ((w & fin_flag) && last.seq != s1) last = {s1, w};
  }

  void report(std::string msg) {
    if (violations_.size() < 32) violations_.push_back(std::move(msg));
  }

  const ring<Traits>& ring_;
  std::vector<per_record> last_;
  std::vector<std::string> violations_;
  std::uint64_t samples_ = 0;
};

}  // namespace wcq::harness

#endif  // WCQ_HARNESS_INVARIANTS_HPP
