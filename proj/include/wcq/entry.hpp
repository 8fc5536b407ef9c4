#ifndef WCQ_ENTRY_HPP
#define WCQ_ENTRY_HPP

#include <cstddef>
#include <cstdint>

namespace wcq {

// Flag bits stolen from per-request local counter words.
inline constexpr std::uint64_t fin_flag = std::uint64_t{1} << 63;
inline constexpr std::uint64_t inc_flag = std::uint64_t{1} << 62;

constexpr std::uint64_t counter_of(std::uint64_t x) noexcept {
  return x & ~(fin_flag | inc_flag);
}

/// Unpacked view of a slot word.
struct entry_fields {
  std::uint64_t cycle;
  bool safe;
  bool enq;
  std::uint64_t index;

  friend constexpr bool operator==(const entry_fields&, const entry_fields&) = default;
};

/**
 * Bit layout of a ring slot word for a ring of 2^order slots.
 *
 *   bits [0, order)        Index (payload index, or one of the two sentinels)
 *   bit  order             Enq
 *   bit  order + 1         IsSafe
 *   bits [order + 2, 64)   Cycle
 *
 * The sentinels are the two largest index values: bottom() = 2n-2 marks an
 * empty slot, consumed() = 2n-1 (all index bits set) marks a consumed one.
 */
class entry_format {
 public:
  constexpr explicit entry_format(unsigned order) noexcept : order_(order) {}

  constexpr unsigned order() const noexcept { return order_; }
  constexpr std::uint64_t slots() const noexcept { return std::uint64_t{1} << order_; }
  constexpr std::uint64_t capacity() const noexcept { return slots() / 2; }
  constexpr std::uint64_t threshold_max() const noexcept { return 3 * capacity() - 1; }

  constexpr std::uint64_t index_mask() const noexcept { return slots() - 1; }
  constexpr std::uint64_t consumed() const noexcept { return index_mask(); }
  constexpr std::uint64_t bottom() const noexcept { return index_mask() - 1; }
  constexpr std::uint64_t enq_bit() const noexcept { return std::uint64_t{1} << order_; }
  constexpr std::uint64_t safe_bit() const noexcept { return std::uint64_t{1} << (order_ + 1); }
  constexpr unsigned cycle_shift() const noexcept { return order_ + 2; }

  constexpr std::uint64_t cycle_of(std::uint64_t counter) const noexcept {
    return counter >> order_;
  }
  constexpr std::uint64_t position_of(std::uint64_t counter) const noexcept {
    return counter & index_mask();
  }

  constexpr std::uint64_t pack(std::uint64_t cycle, bool safe, bool enq,
                               std::uint64_t index) const noexcept {
    return (cycle << cycle_shift()) | (safe ? safe_bit() : 0) | (enq ? enq_bit() : 0) |
           (index & index_mask());
  }
  constexpr std::uint64_t pack(const entry_fields& f) const noexcept {
    return pack(f.cycle, f.safe, f.enq, f.index);
  }
  constexpr entry_fields unpack(std::uint64_t v) const noexcept {
    return {cycle(v), is_safe(v), enq(v), index(v)};
  }

  constexpr std::uint64_t cycle(std::uint64_t v) const noexcept { return v >> cycle_shift(); }
  constexpr bool is_safe(std::uint64_t v) const noexcept { return (v & safe_bit()) != 0; }
  constexpr bool enq(std::uint64_t v) const noexcept { return (v & enq_bit()) != 0; }
  constexpr std::uint64_t index(std::uint64_t v) const noexcept { return v & index_mask(); }

  /// True for the two sentinels: the slot holds no live index.
  constexpr bool is_vacant(std::uint64_t index) const noexcept { return index >= bottom(); }

  /// OR mask used to consume a slot: Enq=1, Index=consumed, Cycle/IsSafe kept.
  constexpr std::uint64_t consume_mask() const noexcept { return enq_bit() | index_mask(); }

  constexpr std::uint64_t initial_value() const noexcept { return pack(0, true, true, bottom()); }

 private:
  unsigned order_;
};

/**
 * Permutes ring positions so that consecutive positions land in different
 * cache lines. With L entries per line and R = 2n / L rows:
 *
 *   remap(i) = (i mod R) * L + (i div R)
 *
 * which is a bijection on [0, 2n) for power-of-two shapes. L is clamped to
 * n so tiny rings still interleave; L = 1 is the identity.
 */
class slot_remap {
 public:
  constexpr slot_remap(unsigned order, std::size_t entries_per_line) noexcept
      : order_(order), line_shift_(clamp_shift(order, entries_per_line)) {}

  static constexpr slot_remap identity(unsigned order) noexcept { return {order, 1}; }

  constexpr std::size_t operator()(std::size_t pos) const noexcept {
    const unsigned row_shift = order_ - line_shift_;
    const std::size_t row_mask = (std::size_t{1} << row_shift) - 1;
    return ((pos & row_mask) << line_shift_) | (pos >> row_shift);
  }

  constexpr std::size_t entries_per_line() const noexcept {
    return std::size_t{1} << line_shift_;
  }
  constexpr bool is_identity() const noexcept { return line_shift_ == 0; }

 private:
  static constexpr unsigned clamp_shift(unsigned order, std::size_t per_line) noexcept {
    unsigned shift = 0;
    while ((std::size_t{2} << shift) <= per_line) ++shift;
    const unsigned max_shift = order > 0 ? order - 1 : 0;
    return shift < max_shift ? shift : max_shift;
  }

  unsigned order_;
  unsigned line_shift_;
};

}  // namespace wcq

#endif  // WCQ_ENTRY_HPP
