#ifndef WCQ_HARNESS_SCHEDULER_HPP
#define WCQ_HARNESS_SCHEDULER_HPP

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wcq/harness/hooks.hpp"

namespace wcq::harness {

/**
 * Drives real threads through an exact interleaving of yield points.
 *
 * Each participant starts parked. run_until() lets exactly one participant
 * run until it reaches the requested yield point (or its body returns), so
 * at most one participant executes protocol code at any time. A participant
 * that fails to reach the point within the timeout is a script error; the
 * scheduler then releases every thread and lets them run freely.
 */
class scripted_scheduler {
 public:
  struct step {
    std::size_t thread;
    std::optional<yield_point> label;  // nullopt runs the body to completion
    unsigned occurrence = 1;
  };

  struct hook_event {
    yield_point point;
    std::uint64_t arg;
  };

  struct replay_result {
    bool ok = true;
    std::string error;
    std::vector<std::string> trace;
  };

  explicit scripted_scheduler(std::chrono::milliseconds timeout = std::chrono::seconds(10))
      : timeout_(timeout) {}

  ~scripted_scheduler() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      free_run_ = true;
      for (auto& p : parts_)
        if (p->st == run_state::parked) p->st = run_state::running;
    }
    cv_.notify_all();
    for (auto& p : parts_)
      if (p->thread.joinable()) p->thread.join();
  }

  scripted_scheduler(const scripted_scheduler&) = delete;
  scripted_scheduler& operator=(const scripted_scheduler&) = delete;

  std::size_t spawn(std::string name, std::function<void()> body) {
    auto p = std::make_unique<participant>();
    p->name = std::move(name);
    participant* raw = p.get();
    {
      std::lock_guard<std::mutex> lock(mu_);
      parts_.push_back(std::move(p));
    }
    raw->thread = std::thread([this, raw, body = std::move(body)] { thread_main(*raw, body); });
    return parts_.size() - 1;
  }

  /// Empty string on success, otherwise a description of the script error.
  std::string run_until(std::size_t who, yield_point label, unsigned occurrence = 1) {
    return resume(who, label, occurrence);
  }
  std::string run_to_end(std::size_t who) { return resume(who, std::nullopt, 1); }

  /// Runs the script step by step. `observe` is called after each successful
  /// step and its result appended to the trace.
  replay_result replay(const std::vector<step>& script,
                       const std::function<std::string(std::size_t)>& observe = {}) {
    replay_result out;
    for (std::size_t i = 0; i < script.size(); ++i) {
      const step& s = script[i];
      std::string err = s.label ? run_until(s.thread, *s.label, s.occurrence) : run_to_end(s.thread);
      if (!err.empty()) {
        out.ok = false;
        out.error = "step " + std::to_string(i) + ": " + err;
        return out;
      }
      std::string line = name(s.thread) + " -> " + (s.label ? to_string(*s.label) : "end");
      if (observe) line += " | " + observe(i);
      out.trace.push_back(std::move(line));
    }
    return out;
  }

  std::size_t hits(std::size_t who, yield_point p) const {
    std::lock_guard<std::mutex> lock(mu_);
    return parts_[who]->counts[static_cast<std::size_t>(p)];
  }
  /// Every yield point the participant passed, in order, with its argument.
  std::vector<hook_event> events(std::size_t who) const {
    std::lock_guard<std::mutex> lock(mu_);
    return parts_[who]->events;
  }
  /// Argument of the most recent pass through `p`, if any.
  std::optional<std::uint64_t> last_arg(std::size_t who, yield_point p) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto& ev = parts_[who]->events;
    for (auto it = ev.rbegin(); it != ev.rend(); ++it)
      if (it->point == p) return it->arg;
    return std::nullopt;
  }
  bool finished(std::size_t who) const {
    std::lock_guard<std::mutex> lock(mu_);
    return parts_[who]->st == run_state::done;
  }
  const std::string& name(std::size_t who) const { return parts_[who]->name; }

 private:
  enum class run_state { parked, running, done };

  struct participant {
    std::string name;
    std::thread thread;
    run_state st = run_state::parked;
    std::optional<yield_point> target;
    unsigned remaining = 0;
    std::array<std::size_t, static_cast<std::size_t>(yield_point::count_)> counts{};
    std::string failure;
    std::vector<hook_event> events;
  };

  void thread_main(participant& p, const std::function<void()>& body) {
    const hook_fn fn = [this, &p](yield_point y, std::uint64_t arg) { on_yield(p, y, arg); };
    scoped_hook guard(fn);
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_.wait(lock, [&] { return p.st == run_state::running; });
    }
    std::string failure;
    try {
      body();
    } catch (const std::exception& e) {
      failure = e.what();
    } catch (...) {
      failure = "unknown exception";
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      p.failure = std::move(failure);
      p.st = run_state::done;
    }
    cv_.notify_all();
  }

  void on_yield(participant& p, yield_point y, std::uint64_t arg) {
    std::unique_lock<std::mutex> lock(mu_);
    ++p.counts[static_cast<std::size_t>(y)];
    p.events.push_back({y, arg});
    if (free_run_ || !p.target || *p.target != y || --p.remaining != 0) return;
    p.target.reset();
    p.st = run_state::parked;
    cv_.notify_all();
    cv_.wait(lock, [&] { return p.st == run_state::running; });
  }

  std::string resume(std::size_t who, std::optional<yield_point> label, unsigned occurrence) {
    if (who >= parts_.size()) return "no participant " + std::to_string(who);
    participant& p = *parts_[who];
    std::unique_lock<std::mutex> lock(mu_);
    if (free_run_) return "scheduler already failed";
    if (p.st == run_state::done) return p.name + " has already finished";
    p.target = label;
    p.remaining = occurrence;
    p.st = run_state::running;
    cv_.notify_all();
    const bool settled =
        cv_.wait_for(lock, timeout_, [&] { return p.st != run_state::running; });
    if (!settled) {
      free_run_ = true;
      for (auto& q : parts_)
        if (q->st == run_state::parked) q->st = run_state::running;
      cv_.notify_all();
      return p.name + " did not reach " + (label ? to_string(*label) : "the end") +
             " before the timeout";
    }
    if (!p.failure.empty()) return p.name + " threw: " + p.failure;
    if (label && p.st == run_state::done)
      return p.name + " finished without reaching " + to_string(*label);
    return {};
  }

  std::chrono::milliseconds timeout_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<participant>> parts_;
  bool free_run_ = false;
};

}  // namespace wcq::harness

#endif  // WCQ_HARNESS_SCHEDULER_HPP
