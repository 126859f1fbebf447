#pragma once

#include <cstddef>
#include <functional>
#include <memory>

#include "dfoq/linalg.hpp"

namespace dfoq {

/// Deterministic scalar objective with an evaluation counter and an optional
/// value cache keyed by the exact bytes of the point. Copies share the cache
/// and the counters, and concurrent calls are safe.
class Oracle {
 public:
  using Fn = std::function<double(const Vec&)>;

  explicit Oracle(Fn fn, bool cache = true);

  /// Throws kEvaluation naming the point if the function returns a non-finite value.
  double operator()(const Vec& x) const;

  /// Number of underlying function evaluations (cache misses).
  std::size_t calls() const;
  /// Number of requests, hits included.
  std::size_t requests() const;
  std::size_t cache_size() const;
  bool caching() const;
  void reset_counters() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

}  // namespace dfoq
