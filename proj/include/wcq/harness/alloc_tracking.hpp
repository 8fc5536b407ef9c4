#ifndef WCQ_HARNESS_ALLOC_TRACKING_HPP
#define WCQ_HARNESS_ALLOC_TRACKING_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <new>

namespace wcq::harness {

/// Process-wide allocation counters. They only move in a program that
/// expands WCQ_DEFINE_ALLOCATION_COUNTERS() once at namespace scope.
struct allocation_counters {
  static inline std::atomic<std::uint64_t> calls{0};
  static inline std::atomic<std::uint64_t> bytes{0};

  struct snapshot {
    std::uint64_t calls;
    std::uint64_t bytes;
  };
  static snapshot now() noexcept { return {calls.load(), bytes.load()}; }

  static void* allocate(std::size_t n) {
    calls.fetch_add(1, std::memory_order_relaxed);
    bytes.fetch_add(n, std::memory_order_relaxed);
    if (void* p = std::malloc(n ? n : 1)) return p;
    throw std::bad_alloc();
  }
  static void* allocate(std::size_t n, std::align_val_t al) {
    calls.fetch_add(1, std::memory_order_relaxed);
    bytes.fetch_add(n, std::memory_order_relaxed);
    const std::size_t a = static_cast<std::size_t>(al);
    if (void* p = std::aligned_alloc(a, (n + a - 1) / a * a)) return p;
    throw std::bad_alloc();
  }
};

}  // namespace wcq::harness

// Replaces the global allocation functions with counting versions.
#define WCQ_DEFINE_ALLOCATION_COUNTERS()                                                        \
  void* operator new(std::size_t n) { return ::wcq::harness::allocation_counters::allocate(n); } \
  void* operator new[](std::size_t n) {                                                        \
    return ::wcq::harness::allocation_counters::allocate(n);                                   \
  }                                                                                            \
  void* operator new(std::size_t n, std::align_val_t a) {                                      \
    return ::wcq::harness::allocation_counters::allocate(n, a);                                \
  }                                                                                            \
  void* operator new[](std::size_t n, std::align_val_t a) {                                    \
    return ::wcq::harness::allocation_counters::allocate(n, a);                                \
  }                                                                                            \
  void operator delete(void* p) noexcept { std::free(p); }                                     \
  void operator delete[](void* p) noexcept { std::free(p); }                                   \
  void operator delete(void* p, std::size_t) noexcept { std::free(p); }                        \
  void operator delete[](void* p, std::size_t) noexcept { std::free(p); }                      \
  void operator delete(void* p, std::align_val_t) noexcept { std::free(p); }                   \
  void operator delete[](void* p, std::align_val_t) noexcept { std::free(p); }                 \
  void operator delete(void* p, std::size_t, std::align_val_t) noexcept { std::free(p); }      \
  void operator delete[](void* p, std::size_t, std::align_val_t) noexcept { std::free(p); }

#endif  // WCQ_HARNESS_ALLOC_TRACKING_HPP
