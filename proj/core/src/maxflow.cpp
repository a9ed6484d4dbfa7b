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

#include "labelfuse4d/maxflow.hpp"

#include <algorithm>
#include <limits>

#include "labelfuse4d/error.hpp"

namespace lf4d {

MaxFlowGraph::MaxFlowGraph(std::size_t node_count, std::size_t edge_hint) : nodes_(node_count) {
  arcs_.reserve(2 * edge_hint);
}

std::int32_t MaxFlowGraph::add_node() {
  nodes_.emplace_back();
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

void MaxFlowGraph::add_edge(std::int32_t i, std::int32_t j, double cap, double rev_cap) {
  if (i == j) fail(ErrorKind::kInvalid, "maxflow: self-loop edge");
  if (cap < 0.0 || rev_cap < 0.0) fail(ErrorKind::kInvalid, "maxflow: negative edge capacity");
  const auto a = static_cast<std::int32_t>(arcs_.size());
  arcs_.push_back({j, nodes_[static_cast<std::size_t>(i)].first, cap});
  nodes_[static_cast<std::size_t>(i)].first = a;
  arcs_.push_back({i, nodes_[static_cast<std::size_t>(j)].first, rev_cap});
  nodes_[static_cast<std::size_t>(j)].first = a + 1;
}

void MaxFlowGraph::add_tweights(std::int32_t i, double cap_source, double cap_sink) {
  Node& n = nodes_[static_cast<std::size_t>(i)];
  const double delta = n.tr_cap;
  if (delta > 0) {
    cap_source += delta;
  } else {
    cap_sink -= delta;
  }
  flow_ += std::min(cap_source, cap_sink);
  n.tr_cap = cap_source - cap_sink;
}

void MaxFlowGraph::set_active(std::int32_t i) {
  Node& n = nodes_[static_cast<std::size_t>(i)];
  if (!n.active) {
    n.active = true;
    active_.push_back(i);
  }
}

std::int32_t MaxFlowGraph::next_active() {
  while (!active_.empty()) {
    const std::int32_t i = active_.front();
    active_.pop_front();
    Node& n = nodes_[static_cast<std::size_t>(i)];
    n.active = false;
    if (n.parent != kNone) return i;
  }
  return kNone;
}

void MaxFlowGraph::set_orphan_front(std::int32_t i) {
  nodes_[static_cast<std::size_t>(i)].parent = kOrphan;
  orphans_.push_front(i);
}

void MaxFlowGraph::set_orphan_rear(std::int32_t i) {
  nodes_[static_cast<std::size_t>(i)].parent = kOrphan;
  orphans_.push_back(i);
}

void MaxFlowGraph::augment(std::int32_t middle_arc) {
  auto node = [this](std::int32_t i) -> Node& { return nodes_[static_cast<std::size_t>(i)]; };
  auto arc = [this](std::int32_t a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  // Bottleneck along source tree, middle arc and sink tree.
  double bottleneck = arc(middle_arc).r_cap;
  std::int32_t i = arc(sister(middle_arc)).head;
  for (;;) {
    const std::int32_t a = node(i).parent;
    if (a == kTerminal) break;
    bottleneck = std::min(bottleneck, arc(sister(a)).r_cap);
    i = arc(a).head;
  }
  bottleneck = std::min(bottleneck, node(i).tr_cap);
  i = arc(middle_arc).head;
  for (;;) {
    const std::int32_t a = node(i).parent;
    if (a == kTerminal) break;
    bottleneck = std::min(bottleneck, arc(a).r_cap);
    i = arc(a).head;
  }
  bottleneck = std::min(bottleneck, -node(i).tr_cap);

  arc(sister(middle_arc)).r_cap += bottleneck;
  arc(middle_arc).r_cap -= bottleneck;

  i = arc(sister(middle_arc)).head;
  for (;;) {
    const std::int32_t a = node(i).parent;
    if (a == kTerminal) {
      node(i).tr_cap -= bottleneck;
      if (node(i).tr_cap == 0.0) set_orphan_front(i);
      break;
    }
    arc(a).r_cap += bottleneck;
    arc(sister(a)).r_cap -= bottleneck;
    if (arc(sister(a)).r_cap == 0.0) set_orphan_front(i);
    i = arc(a).head;
  }
  i = arc(middle_arc).head;
  for (;;) {
    const std::int32_t a = node(i).parent;
    if (a == kTerminal) {
      node(i).tr_cap += bottleneck;
      if (node(i).tr_cap == 0.0) set_orphan_front(i);
      break;
    }
    arc(sister(a)).r_cap += bottleneck;
    arc(a).r_cap -= bottleneck;
    if (arc(a).r_cap == 0.0) set_orphan_front(i);
    i = arc(a).head;
  }
  flow_ += bottleneck;
}

void MaxFlowGraph::process_source_orphan(std::int32_t i) {
  constexpr std::int32_t kInfinite = std::numeric_limits<std::int32_t>::max();
  auto node = [this](std::int32_t k) -> Node& { return nodes_[static_cast<std::size_t>(k)]; };
  auto arc = [this](std::int32_t a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  std::int32_t best_arc = kNone;
  std::int32_t best_dist = kInfinite;
  for (std::int32_t a0 = node(i).first; a0 != kNone; a0 = arc(a0).next) {
    if (arc(sister(a0)).r_cap <= 0.0) continue;
    std::int32_t j = arc(a0).head;
    if (node(j).is_sink || node(j).parent == kNone) continue;
    // Walk to the root to check that j still hangs off the source.
    std::int32_t d = 0;
    for (;;) {
      if (node(j).ts == time_) {
        d += node(j).dist;
        break;
      }
      const std::int32_t a = node(j).parent;
      ++d;
      if (a == kTerminal) {
        node(j).ts = time_;
        node(j).dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfinite;
        break;
      }
      j = arc(a).head;
    }
    if (d < kInfinite) {
      if (d < best_dist) {
        best_arc = a0;
        best_dist = d;
      }
      for (j = arc(a0).head; node(j).ts != time_; j = arc(node(j).parent).head) {
        node(j).ts = time_;
        node(j).dist = d--;
      }
    }
  }

  node(i).parent = best_arc;
  if (best_arc != kNone) {
    node(i).ts = time_;
    node(i).dist = best_dist + 1;
    return;
  }
  node(i).parent = kNone;
  for (std::int32_t a0 = node(i).first; a0 != kNone; a0 = arc(a0).next) {
    const std::int32_t j = arc(a0).head;
    const std::int32_t a = node(j).parent;
    if (node(j).is_sink || a == kNone) continue;
    if (arc(sister(a0)).r_cap > 0.0) set_active(j);
    if (a != kTerminal && a != kOrphan && arc(a).head == i) set_orphan_rear(j);
  }
}

void MaxFlowGraph::process_sink_orphan(std::int32_t i) {
  constexpr std::int32_t kInfinite = std::numeric_limits<std::int32_t>::max();
  auto node = [this](std::int32_t k) -> Node& { return nodes_[static_cast<std::size_t>(k)]; };
  auto arc = [this](std::int32_t a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  std::int32_t best_arc = kNone;
  std::int32_t best_dist = kInfinite;
  for (std::int32_t a0 = node(i).first; a0 != kNone; a0 = arc(a0).next) {
    if (arc(a0).r_cap <= 0.0) continue;
    std::int32_t j = arc(a0).head;
    if (!node(j).is_sink || node(j).parent == kNone) continue;
    std::int32_t d = 0;
    for (;;) {
      if (node(j).ts == time_) {
        d += node(j).dist;
        break;
      }
      const std::int32_t a = node(j).parent;
      ++d;
      if (a == kTerminal) {
        node(j).ts = time_;
        node(j).dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfinite;
        break;
      }
      j = arc(a).head;
    }
    if (d < kInfinite) {
      if (d < best_dist) {
        best_arc = a0;
        best_dist = d;
      }
      for (j = arc(a0).head; node(j).ts != time_; j = arc(node(j).parent).head) {
        node(j).ts = time_;
        node(j).dist = d--;
      }
    }
  }

  node(i).parent = best_arc;
  if (best_arc != kNone) {
    node(i).ts = time_;
    node(i).dist = best_dist + 1;
    return;
  }
  node(i).parent = kNone;
  for (std::int32_t a0 = node(i).first; a0 != kNone; a0 = arc(a0).next) {
    const std::int32_t j = arc(a0).head;
    const std::int32_t a = node(j).parent;
    if (!node(j).is_sink || a == kNone) continue;
    if (arc(a0).r_cap > 0.0) set_active(j);
    if (a != kTerminal && a != kOrphan && arc(a).head == i) set_orphan_rear(j);
  }
}

double MaxFlowGraph::maxflow() {
  active_.clear();
  orphans_.clear();
  time_ = 0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    Node& n = nodes_[k];
    n.active = false;
    n.ts = 0;
    if (n.tr_cap > 0.0) {
      n.is_sink = false;
      n.parent = kTerminal;
      n.dist = 1;
      set_active(static_cast<std::int32_t>(k));
    } else if (n.tr_cap < 0.0) {
      n.is_sink = true;
      n.parent = kTerminal;
      n.dist = 1;
      set_active(static_cast<std::int32_t>(k));
    } else {
      n.parent = kNone;
    }
  }

  auto node = [this](std::int32_t k) -> Node& { return nodes_[static_cast<std::size_t>(k)]; };
  auto arc = [this](std::int32_t a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  std::int32_t current = kNone;
  for (;;) {
    std::int32_t i = current;
    if (i != kNone) {
      node(i).active = false;
      if (node(i).parent == kNone) i = kNone;
    }
    if (i == kNone) {
      i = next_active();
      if (i == kNone) break;
    }

    // Grow the tree containing i until it touches the other tree.
    std::int32_t found = kNone;
    if (!node(i).is_sink) {
      for (std::int32_t a = node(i).first; a != kNone; a = arc(a).next) {
        if (arc(a).r_cap <= 0.0) continue;
        const std::int32_t j = arc(a).head;
        Node& nj = node(j);
        if (nj.parent == kNone) {
          nj.is_sink = false;
          nj.parent = sister(a);
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
          set_active(j);
        } else if (nj.is_sink) {
          found = a;
          break;
        } else if (nj.ts <= node(i).ts && nj.dist > node(i).dist) {
          nj.parent = sister(a);
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
        }
      }
    } else {
      for (std::int32_t a = node(i).first; a != kNone; a = arc(a).next) {
        if (arc(sister(a)).r_cap <= 0.0) continue;
        const std::int32_t j = arc(a).head;
        Node& nj = node(j);
        if (nj.parent == kNone) {
          nj.is_sink = true;
          nj.parent = sister(a);
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
          set_active(j);
        } else if (!nj.is_sink) {
          found = sister(a);
          break;
        } else if (nj.ts <= node(i).ts && nj.dist > node(i).dist) {
          nj.parent = sister(a);
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
        }
      }
    }

    ++time_;
    if (found == kNone) {
      current = kNone;
      continue;
    }
    // Keep expanding i after this augmentation; mark it so it is not queued.
    node(i).active = true;
    current = i;
    augment(found);
    while (!orphans_.empty()) {
      const std::int32_t o = orphans_.front();
      orphans_.pop_front();
      if (node(o).is_sink) {
        process_sink_orphan(o);
      } else {
        process_source_orphan(o);
      }
    }
  }
  return flow_;
}

MaxFlowGraph::Segment MaxFlowGraph::segment(std::int32_t i) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  if (n.parent != kNone && n.is_sink) return Segment::kSink;
  return Segment::kSource;
}

}  // namespace lf4d
