#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "regreg/errors.hpp"

namespace regreg::dataflow {

template <class V>
struct Lattice {
  V bottom;
  std::function<V(const V&, const V&)> join;
  std::function<bool(const V&, const V&)> eq;
};

struct Options {
  std::size_t height_budget = std::size_t{1} << 16;  // increases per key
  bool check_monotone = true;
};

// Lazy worklist solver. Values are computed only for keys reachable from the
// roots passed to solve(); dependencies are learned from depends() calls made
// while a flow function runs and are re-learned on each re-evaluation.
template <class Key, class V, class Hash = std::hash<Key>>
class Solver {
 public:
  using Flow = std::function<V(const Key&, Solver&)>;

  Solver(Lattice<V> lattice, Flow flow, Options opts = {})
      : lat_(std::move(lattice)), flow_(std::move(flow)), opts_(opts) {}

  V solve(const Key& root) {
    if (current_) throw Error(ErrorCode::InvalidArgument, "solve() called from inside a flow function");
    touch(root);
    while (!work_.empty()) {
      Key el = work_.front();
      work_.pop_front();
      State& st = state_.at(el);
      st.active = false;
      drop_incoming(el);
      ++st.evaluations;
      ++total_evaluations_;
      const Key* saved = current_;
      current_ = &el;
      V val;
      try {
        val = flow_(el, *this);
      } catch (...) {
        current_ = saved;
        throw;
      }
      current_ = saved;
      State& s = state_.at(el);
      V joined = lat_.join(s.value, val);
      if (lat_.eq(joined, s.value)) {
        if (opts_.check_monotone && !lat_.eq(val, s.value)) {
          throw Error(ErrorCode::NonMonotoneDetected, "flow result fell below the stored value");
        }
        continue;
      }
      if (++s.increases > opts_.height_budget) {
        throw Error(ErrorCode::HeightBudgetExceeded,
                    "key exceeded " + std::to_string(opts_.height_budget) + " increases");
      }
      s.value = std::move(joined);
      for (const Key& d : s.dependents) activate(d);
    }
    return state_.at(root).value;
  }

  // Only legal inside a flow function: records that the key being evaluated
  // reads `k` and returns k's current value.
  V depends(const Key& k) {
    if (!current_) throw Error(ErrorCode::CalledOutsideFlow, "depends() called outside a flow evaluation");
    touch(k);
    Key from = *current_;
    State& src = state_.at(k);
    if (src.dependents.insert(from).second) state_.at(from).inputs.push_back(k);
    return src.value;
  }

  const V* value(const Key& k) const {
    auto it = state_.find(k);
    return it == state_.end() ? nullptr : &it->second.value;
  }
  bool visited(const Key& k) const { return state_.count(k) != 0; }
  std::size_t visited_count() const { return state_.size(); }
  std::size_t evaluations(const Key& k) const {
    auto it = state_.find(k);
    return it == state_.end() ? 0 : it->second.evaluations;
  }
  std::size_t total_evaluations() const { return total_evaluations_; }
  std::size_t dependent_count(const Key& k) const {
    auto it = state_.find(k);
    return it == state_.end() ? 0 : it->second.dependents.size();
  }
  std::size_t enqueue_count(const Key& k) const {
    auto it = state_.find(k);
    return it == state_.end() ? 0 : it->second.enqueued;
  }

 private:
  struct State {
    V value;
    bool active = false;
    std::size_t evaluations = 0;
    std::size_t increases = 0;
    std::size_t enqueued = 0;
    std::unordered_set<Key, Hash> dependents;  // keys whose flow read this one
    std::vector<Key> inputs;                   // keys this one read last time
  };

  void touch(const Key& k) {
    if (state_.count(k)) return;
    State s;
    s.value = lat_.bottom;
    state_.emplace(k, std::move(s));
    activate(k);
  }

  void activate(const Key& k) {
    State& s = state_.at(k);
    if (s.active) return;
    s.active = true;
    ++s.enqueued;
    work_.push_back(k);
  }

  void drop_incoming(const Key& el) {
    State& s = state_.at(el);
    for (const Key& in : s.inputs) state_.at(in).dependents.erase(el);
    s.inputs.clear();
  }

  Lattice<V> lat_;
  Flow flow_;
  Options opts_;
  std::unordered_map<Key, State, Hash> state_;
  std::deque<Key> work_;
  const Key* current_ = nullptr;
  std::size_t total_evaluations_ = 0;
};

}  // namespace regreg::dataflow
