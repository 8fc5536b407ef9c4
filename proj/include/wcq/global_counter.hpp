#ifndef WCQ_GLOBAL_COUNTER_HPP
#define WCQ_GLOBAL_COUNTER_HPP

#include <atomic>
#include <cstdint>

#include "wcq/atomic_pair.hpp"

namespace wcq {

/// Head/Tail value: a position counter plus an optional phase-2 help reference.
struct counter_ref {
  std::uint64_t cnt;
  std::uint32_t ref;  // record index + 1, or no_ref

  friend constexpr bool operator==(const counter_ref&, const counter_ref&) = default;
};

inline constexpr std::uint32_t no_ref = 0;

/// Global counter backed by a double-width cell: {cnt, ref} in two words.
/// Fast paths only touch the cnt word.
class paired_global_counter {
 public:
  static constexpr std::uint32_t max_ref = 0xffffffffu;

  explicit paired_global_counter(std::uint64_t init) noexcept : cell_(word_pair{init, no_ref}) {}

  std::uint64_t load_cnt() const noexcept { return cell_.load(word::first); }
  std::uint64_t fetch_add_cnt(std::uint64_t delta) noexcept {
    return cell_.fetch_add(word::first, delta);
  }
  bool compare_exchange_cnt(std::uint64_t expected, std::uint64_t desired) noexcept {
    return cell_.compare_exchange(word::first, expected, desired);
  }

  counter_ref load() const noexcept {
    const word_pair p = cell_.load();
    return {p.first, static_cast<std::uint32_t>(p.second)};
  }
  bool compare_exchange(counter_ref& expected, counter_ref desired) noexcept {
    word_pair exp{expected.cnt, expected.ref};
    const bool ok = cell_.compare_exchange(exp, {desired.cnt, desired.ref});
    if (!ok) expected = {exp.first, static_cast<std::uint32_t>(exp.second)};
    return ok;
  }

 private:
  pair_cell cell_;
};

/// Single-word fallback: a 48-bit counter with a 16-bit reference packed above
/// it, for substrates without double-width CAS. Entry pairs still need the
/// double-width cell; only Head/Tail can use this.
class packed_global_counter {
 public:
  static constexpr unsigned cnt_bits = 48;
  static constexpr std::uint64_t cnt_mask = (std::uint64_t{1} << cnt_bits) - 1;
  static constexpr std::uint32_t max_ref = 0xffffu;

  explicit packed_global_counter(std::uint64_t init) noexcept : word_(init & cnt_mask) {}

  std::uint64_t load_cnt() const noexcept { return word_.load() & cnt_mask; }

  // Carries out of the counter field after 2^48 increments; not a practical limit.
  std::uint64_t fetch_add_cnt(std::uint64_t delta) noexcept {
    return word_.fetch_add(delta) & cnt_mask;
  }

  bool compare_exchange_cnt(std::uint64_t expected, std::uint64_t desired) noexcept {
    std::uint64_t cur = word_.load();
    while ((cur & cnt_mask) == expected) {
      if (word_.compare_exchange_weak(cur, (cur & ~cnt_mask) | (desired & cnt_mask))) return true;
    }
    return false;
  }

  counter_ref load() const noexcept { return unpack(word_.load()); }

  bool compare_exchange(counter_ref& expected, counter_ref desired) noexcept {
    std::uint64_t exp = pack(expected);
    const bool ok = word_.compare_exchange_strong(exp, pack(desired));
    if (!ok) expected = unpack(exp);
    return ok;
  }

 private:
  static constexpr std::uint64_t pack(counter_ref v) noexcept {
    return (static_cast<std::uint64_t>(v.ref) << cnt_bits) | (v.cnt & cnt_mask);
  }
  static constexpr counter_ref unpack(std::uint64_t w) noexcept {
    return {w & cnt_mask, static_cast<std::uint32_t>(w >> cnt_bits)};
  }

  std::atomic<std::uint64_t> word_;
};

}  // namespace wcq

#endif  // WCQ_GLOBAL_COUNTER_HPP
