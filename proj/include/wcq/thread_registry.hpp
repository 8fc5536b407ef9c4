#ifndef WCQ_THREAD_REGISTRY_HPP
#define WCQ_THREAD_REGISTRY_HPP

#include <atomic>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace wcq {

struct thread_id {
  std::uint32_t value;

  friend constexpr bool operator==(thread_id, thread_id) = default;
};

class thread_registry;

/// Owns one thread id of a registry for its lifetime. Move-only. A handle
/// must not be used by two threads at the same time.
class thread_handle {
 public:
  thread_handle() noexcept = default;
  thread_handle(thread_handle&& o) noexcept
      : owner_(std::exchange(o.owner_, nullptr)), id_(o.id_) {}
  thread_handle& operator=(thread_handle&& o) noexcept {
    if (this != &o) {
      reset();
      owner_ = std::exchange(o.owner_, nullptr);
      id_ = o.id_;
    }
    return *this;
  }
  thread_handle(const thread_handle&) = delete;
  thread_handle& operator=(const thread_handle&) = delete;
  ~thread_handle() { reset(); }

  thread_id id() const noexcept { return id_; }
  bool valid() const noexcept { return owner_ != nullptr; }
  const thread_registry* registry() const noexcept { return owner_; }

  inline void reset() noexcept;

 private:
  friend class thread_registry;
  thread_handle(thread_registry* owner, thread_id id) noexcept : owner_(owner), id_(id) {}

  thread_registry* owner_ = nullptr;
  thread_id id_{0};
};

/// Hands out ids in [0, capacity) from a free bitmap.
class thread_registry {
 public:
  explicit thread_registry(std::uint32_t capacity)
      : capacity_(capacity), words_(std::make_unique<std::atomic<std::uint64_t>[]>(word_count())) {}

  std::uint32_t capacity() const noexcept { return capacity_; }

  std::optional<thread_id> try_acquire() noexcept {
    for (std::uint32_t w = 0; w < word_count(); ++w) {
      std::uint64_t cur = words_[w].load();
      for (;;) {
        const std::uint64_t free = ~cur & usable_mask(w);
        if (free == 0) break;
        const unsigned bit = static_cast<unsigned>(std::countr_zero(free));
        if (words_[w].compare_exchange_weak(cur, cur | (std::uint64_t{1} << bit)))
          return thread_id{w * 64 + bit};
      }
    }
    return std::nullopt;
  }

  /// Throws std::length_error when every id is taken.
  thread_handle acquire() {
    if (auto id = try_acquire()) return thread_handle(this, *id);
    throw std::length_error("all " + std::to_string(capacity_) + " thread slots are registered");
  }

  void release(thread_id id) noexcept {
    words_[id.value / 64].fetch_and(~(std::uint64_t{1} << (id.value % 64)));
  }

  std::uint32_t registered() const noexcept {
    std::uint32_t n = 0;
    for (std::uint32_t w = 0; w < word_count(); ++w)
      n += static_cast<std::uint32_t>(std::popcount(words_[w].load()));
    return n;
  }

 private:
  std::uint32_t word_count() const noexcept { return (capacity_ + 63) / 64; }
  std::uint64_t usable_mask(std::uint32_t w) const noexcept {
    const std::uint32_t left = capacity_ - w * 64;
    return left >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << left) - 1;
  }

  std::uint32_t capacity_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> words_;
};

inline void thread_handle::reset() noexcept {
  if (owner_) owner_->release(id_);
  owner_ = nullptr;
}

}  // namespace wcq

#endif  // WCQ_THREAD_REGISTRY_HPP
