#ifndef WCQ_INDIRECT_QUEUE_HPP
#define WCQ_INDIRECT_QUEUE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "wcq/ring.hpp"

namespace wcq {

/**
 * Bounded MPMC FIFO of T built from two index rings.
 *
 * fq holds free indices into an n-element payload array, aq holds the
 * indices of published payloads in FIFO order. Enqueue takes a free index,
 * writes the payload and publishes the index; dequeue does the reverse.
 * The payload slot needs no synchronization of its own: the write happens
 * before the aq enqueue and the read before the fq enqueue.
 *
 * All storage is allocated by the constructor.
 */
template <class T = std::uint64_t, class Traits = default_traits>
class indirect_queue {
 public:
  using value_type = T;
  using ring_type = ring<Traits>;

  explicit indirect_queue(const queue_config& cfg)
      : aq_(cfg), fq_(cfg), data_(std::make_unique<T[]>(cfg.capacity())), registry_(cfg.num_threads) {
    const thread_id init{0};
    for (std::uint64_t i = 0; i < capacity(); ++i) fq_.enqueue(init, i);
    fq_.reset_stats();
  }

  indirect_queue(const indirect_queue&) = delete;
  indirect_queue& operator=(const indirect_queue&) = delete;

  /// The handle's id addresses the same record slot in both rings.
  thread_handle register_thread() { return registry_.acquire(); }

  /// Returns false when the queue is full.
  bool enqueue(const thread_handle& h, const T& value) { return enqueue(h.id(), value); }
  std::optional<T> dequeue(const thread_handle& h) { return dequeue(h.id()); }

  bool enqueue(thread_id self, const T& value) {
    const std::optional<std::uint64_t> index = fq_.dequeue(self);
    if (!index) return false;
    data_[*index] = value;
    aq_.enqueue(self, *index);
    return true;
  }

  std::optional<T> dequeue(thread_id self) {
    const std::optional<std::uint64_t> index = aq_.dequeue(self);
    if (!index) return std::nullopt;
    T value = std::move(data_[*index]);
    fq_.enqueue(self, *index);
    return value;
  }

  std::uint64_t capacity() const noexcept { return aq_.capacity(); }
  const queue_config& config() const noexcept { return aq_.config(); }

  queue_stats stats() const noexcept { return aq_.stats() + fq_.stats(); }
  queue_stats stats(thread_id id) const noexcept { return aq_.stats(id) + fq_.stats(id); }
  void reset_stats() noexcept {
    aq_.reset_stats();
    fq_.reset_stats();
  }

  ring_type& aq() noexcept { return aq_; }
  ring_type& fq() noexcept { return fq_; }
  const ring_type& aq() const noexcept { return aq_; }
  const ring_type& fq() const noexcept { return fq_; }

  /// Quiescent check that every index sits in exactly one of the two rings.
  /// Drains both rings through `self` and restores their contents in order.
  bool indices_conserved(thread_id self) {
    std::vector<std::uint64_t> in_aq, in_fq;
    while (auto i = aq_.dequeue(self)) in_aq.push_back(*i);
    while (auto i = fq_.dequeue(self)) in_fq.push_back(*i);
    std::vector<unsigned char> seen(capacity(), 0);
    bool ok = in_aq.size() + in_fq.size() == capacity();
    for (const auto* list : {&in_aq, &in_fq})
      for (std::uint64_t i : *list) {
        if (i >= capacity() || seen[i]) ok = false;
        else seen[i] = 1;
      }
    for (std::uint64_t i : in_fq) fq_.enqueue(self, i);
    for (std::uint64_t i : in_aq) aq_.enqueue(self, i);
    return ok;
  }

 private:
  ring_type aq_;
  ring_type fq_;
  std::unique_ptr<T[]> data_;
  thread_registry registry_;
};

}  // namespace wcq

#endif  // WCQ_INDIRECT_QUEUE_HPP
