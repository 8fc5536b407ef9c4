#ifndef WCQ_HARNESS_HOOKS_HPP
#define WCQ_HARNESS_HOOKS_HPP

#include <cstdint>
#include <functional>

#include "wcq/config.hpp"

namespace wcq::harness {

using hook_fn = std::function<void(yield_point, std::uint64_t)>;

/// Per-thread callback consulted at every yield point of a ring built with
/// harness_traits. Null means the hooks are inert.
inline thread_local const hook_fn* current_hook = nullptr;

struct callback_hooks {
  static void at(yield_point p, std::uint64_t arg = 0) {
    if (const hook_fn* fn = current_hook) (*fn)(p, arg);
  }
};

struct harness_traits {
  using hooks = callback_hooks;
  static constexpr bool instrumented = true;
  static constexpr bool packed_global_counters = false;
};

struct packed_harness_traits : harness_traits {
  static constexpr bool packed_global_counters = true;
};

/// Installs a hook for the calling thread for the lifetime of the object.
class scoped_hook {
 public:
  explicit scoped_hook(hook_fn fn) : fn_(std::move(fn)), prev_(current_hook) { current_hook = &fn_; }
  ~scoped_hook() { current_hook = prev_; }
  scoped_hook(const scoped_hook&) = delete;
  scoped_hook& operator=(const scoped_hook&) = delete;

 private:
  hook_fn fn_;
  const hook_fn* prev_;
};

}  // namespace wcq::harness

#endif  // WCQ_HARNESS_HOOKS_HPP
