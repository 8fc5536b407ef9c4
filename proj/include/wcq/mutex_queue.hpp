#ifndef WCQ_MUTEX_QUEUE_HPP
#define WCQ_MUTEX_QUEUE_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>

#include "wcq/config.hpp"
#include "wcq/thread_registry.hpp"

namespace wcq {

/// Lock-based bounded FIFO with the same interface and capacity as
/// indirect_queue. Benchmark baseline only.
template <class T = std::uint64_t>
class mutex_queue {
 public:
  using value_type = T;

  explicit mutex_queue(const queue_config& cfg)
      : capacity_(cfg.capacity()), items_(std::make_unique<T[]>(capacity_)), registry_(cfg.num_threads) {
    cfg.validate();
  }

  thread_handle register_thread() { return registry_.acquire(); }

  bool enqueue(const thread_handle&, const T& value) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (tail_ - head_ == capacity_) return false;
    items_[tail_++ % capacity_] = value;
    return true;
  }

  std::optional<T> dequeue(const thread_handle&) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (tail_ == head_) return std::nullopt;
    return std::move(items_[head_++ % capacity_]);
  }

  std::uint64_t capacity() const noexcept { return capacity_; }

 private:
  std::mutex mutex_;
  std::uint64_t capacity_;
  std::unique_ptr<T[]> items_;
  std::uint64_t head_ = 0;
  std::uint64_t tail_ = 0;
  thread_registry registry_;
};

}  // namespace wcq

#endif  // WCQ_MUTEX_QUEUE_HPP
