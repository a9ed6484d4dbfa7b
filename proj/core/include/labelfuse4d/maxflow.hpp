// Copyright 2026 The labelfuse4d Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace lf4d {

// s-t max-flow / min-cut with the Boykov-Kolmogorov augmenting-path
// algorithm: two search trees grown from the terminals, reused across
// augmentations through orphan adoption.
//
// Terminal capacities are accumulated per node as a single signed residual
// (positive: source side, negative: sink side), so add_tweights may be called
// with any nonnegative pair any number of times.
class MaxFlowGraph {
 public:
  enum class Segment { kSource, kSink };

  explicit MaxFlowGraph(std::size_t node_count = 0, std::size_t edge_hint = 0);

  std::int32_t add_node();
  std::size_t node_count() const { return nodes_.size(); }

  // Edge i->j with capacity `cap` and j->i with `rev_cap`.
  void add_edge(std::int32_t i, std::int32_t j, double cap, double rev_cap);
  void add_tweights(std::int32_t i, double cap_source, double cap_sink);

  // Runs to completion and returns the max-flow value (which includes the
  // constant absorbed by add_tweights).
  double maxflow();

  // After maxflow(): nodes not reachable from either tree are reported as
  // kSource.
  Segment segment(std::int32_t i) const;

 private:
  static constexpr std::int32_t kNone = -1;
  static constexpr std::int32_t kTerminal = -2;
  static constexpr std::int32_t kOrphan = -3;

  struct Arc {
    std::int32_t head;
    std::int32_t next;  // next arc out of the same tail
    double r_cap;
  };

  struct Node {
    std::int32_t first = kNone;
    std::int32_t parent = kNone;
    std::int64_t ts = 0;
    std::int32_t dist = 0;
    bool is_sink = false;
    bool active = false;
    double tr_cap = 0.0;
  };

  static std::int32_t sister(std::int32_t a) { return a ^ 1; }

  void set_active(std::int32_t i);
  std::int32_t next_active();
  void augment(std::int32_t middle_arc);
  void process_source_orphan(std::int32_t i);
  void process_sink_orphan(std::int32_t i);
  void set_orphan_front(std::int32_t i);
  void set_orphan_rear(std::int32_t i);

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<std::int32_t> active_;
  std::deque<std::int32_t> orphans_;
  double flow_ = 0.0;
  std::int64_t time_ = 0;
};

}  // namespace lf4d
