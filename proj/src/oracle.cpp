#include "dfoq/oracle.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>

#include "dfoq/errors.hpp"

namespace dfoq {

struct Oracle::State {
  Fn fn;
  bool cache = true;
  mutable std::mutex mu;
  std::unordered_map<std::string, double> values;
  std::size_t calls = 0;
  std::size_t requests = 0;
};

namespace {

std::string key_of(const Vec& x) {
  std::string key(static_cast<std::size_t>(x.size()) * sizeof(double), '\0');
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // -0.0 and +0.0 are the same point.
    const double v = x(i) == 0.0 ? 0.0 : x(i);
    std::memcpy(key.data() + static_cast<std::size_t>(i) * sizeof(double), &v, sizeof(double));
  }
  return key;
}

std::string describe(const Vec& x) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << "]";
  return os.str();
}

}  // namespace

Oracle::Oracle(Fn fn, bool cache) : state_(std::make_shared<State>()) {
  require(static_cast<bool>(fn), ErrorKind::kInvalidInput, "Oracle: empty function");
  state_->fn = std::move(fn);
  state_->cache = cache;
}

double Oracle::operator()(const Vec& x) const {
  std::string key;
  {
    std::lock_guard<std::mutex> lock(state_->mu);
    ++state_->requests;
    if (state_->cache) {
      key = key_of(x);
      if (auto it = state_->values.find(key); it != state_->values.end()) return it->second;
    }
  }
  const double value = state_->fn(x);
  if (!std::isfinite(value)) {
    fail(ErrorKind::kEvaluation, "objective returned a non-finite value at " + describe(x));
  }
  std::lock_guard<std::mutex> lock(state_->mu);
  ++state_->calls;
  if (state_->cache) state_->values.emplace(std::move(key), value);
  return value;
}

std::size_t Oracle::calls() const {
  std::lock_guard<std::mutex> lock(state_->mu);
  return state_->calls;
}

std::size_t Oracle::requests() const {
  std::lock_guard<std::mutex> lock(state_->mu);
  return state_->requests;
}

std::size_t Oracle::cache_size() const {
  std::lock_guard<std::mutex> lock(state_->mu);
  return state_->values.size();
}

bool Oracle::caching() const { return state_->cache; }

void Oracle::reset_counters() const {
  std::lock_guard<std::mutex> lock(state_->mu);
  state_->calls = 0;
  state_->requests = 0;
}

}  // namespace dfoq
