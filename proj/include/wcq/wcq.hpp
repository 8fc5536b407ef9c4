#ifndef WCQ_WCQ_HPP
#define WCQ_WCQ_HPP

#include "wcq/atomic_pair.hpp"
#include "wcq/config.hpp"
#include "wcq/entry.hpp"
#include "wcq/global_counter.hpp"
#include "wcq/indirect_queue.hpp"
#include "wcq/ring.hpp"
#include "wcq/stats.hpp"
#include "wcq/thread_registry.hpp"

#endif  // WCQ_WCQ_HPP
