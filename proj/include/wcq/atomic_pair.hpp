#ifndef WCQ_ATOMIC_PAIR_HPP
#define WCQ_ATOMIC_PAIR_HPP

#include <cstddef>
#include <cstdint>

namespace wcq {

/// Snapshot of a pair_cell's two words.
struct word_pair {
  std::uint64_t first;
  std::uint64_t second;

  friend constexpr bool operator==(const word_pair&, const word_pair&) = default;
};

enum class word : std::size_t { first = 0, second = 1 };

/**
 * Two contiguous machine words aligned to twice the word size.
 *
 * The cell supports double-width load/compare-exchange on the whole pair as
 * well as ordinary single-word atomics on either half. Mixed-width accesses
 * to the same cell are coherent on the reference substrate (x86-64
 * `lock cmpxchg16b` plus regular `lock`-prefixed word RMWs).
 *
 * All operations are sequentially consistent.
 */
class alignas(16) pair_cell {
 public:
  constexpr pair_cell() noexcept = default;
  constexpr explicit pair_cell(word_pair init) noexcept : words_{init.first, init.second} {}

  pair_cell(const pair_cell&) = delete;
  pair_cell& operator=(const pair_cell&) = delete;

  /// Atomic snapshot of both words.
  word_pair load() const noexcept {
#if defined(__x86_64__)
    // cmpxchg16b with expected == desired: either rewrites the same value or
    // loads the current one into rdx:rax. Both outcomes are a snapshot.
    word_pair cur{0, 0};
    asm volatile("lock cmpxchg16b %0"
                 : "+m"(words_), "+a"(cur.first), "+d"(cur.second)
                 : "b"(std::uint64_t{0}), "c"(std::uint64_t{0})
                 : "memory", "cc");
    return cur;
#else
    const unsigned __int128 v = __atomic_load_n(as_wide(), __ATOMIC_SEQ_CST);
    return {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
#endif
  }

  /// Double-width CAS. On failure `expected` receives the current contents.
  bool compare_exchange(word_pair& expected, word_pair desired) noexcept {
#if defined(__x86_64__)
    bool ok;
    asm volatile("lock cmpxchg16b %1"
                 : "=@ccz"(ok), "+m"(words_), "+a"(expected.first), "+d"(expected.second)
                 : "b"(desired.first), "c"(desired.second)
                 : "memory");
    return ok;
#else
    unsigned __int128 exp = widen(expected);
    const bool ok = __atomic_compare_exchange_n(as_wide(), &exp, widen(desired), false,
                                                __ATOMIC_SEQ_CST, __ATOMIC_SEQ_CST);
    if (!ok) expected = {static_cast<std::uint64_t>(exp), static_cast<std::uint64_t>(exp >> 64)};
    return ok;
#endif
  }

  std::uint64_t load(word w) const noexcept {
    return __atomic_load_n(&words_[idx(w)], __ATOMIC_SEQ_CST);
  }

  void store(word w, std::uint64_t v) noexcept {
    __atomic_store_n(&words_[idx(w)], v, __ATOMIC_SEQ_CST);
  }

  std::uint64_t fetch_add(word w, std::uint64_t delta) noexcept {
    return __atomic_fetch_add(&words_[idx(w)], delta, __ATOMIC_SEQ_CST);
  }

  std::uint64_t fetch_or(word w, std::uint64_t mask) noexcept {
    return __atomic_fetch_or(&words_[idx(w)], mask, __ATOMIC_SEQ_CST);
  }

  /// Single-word CAS on one half. On failure `expected` receives the current word.
  bool compare_exchange(word w, std::uint64_t& expected, std::uint64_t desired) noexcept {
    return __atomic_compare_exchange_n(&words_[idx(w)], &expected, desired, false,
                                       __ATOMIC_SEQ_CST, __ATOMIC_SEQ_CST);
  }

 private:
  static constexpr std::size_t idx(word w) noexcept { return static_cast<std::size_t>(w); }

#if !defined(__x86_64__)
  unsigned __int128* as_wide() const noexcept {
    return reinterpret_cast<unsigned __int128*>(words_);
  }
  static unsigned __int128 widen(word_pair p) noexcept {
    return (static_cast<unsigned __int128>(p.second) << 64) | p.first;
  }
#endif

  mutable std::uint64_t words_[2]{0, 0};
};

static_assert(sizeof(pair_cell) == 16 && alignof(pair_cell) == 16);

}  // namespace wcq

#endif  // WCQ_ATOMIC_PAIR_HPP
