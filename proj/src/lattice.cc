// Copyright 2026 The semirng Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semirng/lattice.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "semirng/errors.h"

namespace semirng {

namespace {

std::string edge_str(std::size_t i, const Edge& e) {
  return "edge " + std::to_string(i) + " (" + std::to_string(e.src) + "->" +
         std::to_string(e.dst) + ")";
}

}  // namespace

void validate(const Lattice& lattice, std::size_t weight_table_size) {
  const VertexId n = lattice.vertex_count;
  if (n < 0) throw StructuralError("negative vertex count");
  std::vector<int> in_degree(n, 0), out_degree(n, 0);
  for (std::size_t i = 0; i < lattice.edges.size(); ++i) {
    const Edge& e = lattice.edges[i];
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw StructuralError(edge_str(i, e) + " references a missing vertex");
    }
    if (e.src >= e.dst) {
      throw StructuralError(edge_str(i, e) +
                            " violates topological indexing (cycle or "
                            "mis-ordered vertices)");
    }
    if (e.weight_ref >= weight_table_size) {
      throw StructuralError(edge_str(i, e) + " weight_ref " +
                            std::to_string(e.weight_ref) +
                            " is outside the weight table");
    }
    ++out_degree[e.src];
    ++in_degree[e.dst];
  }
  std::vector<bool> seen(n, false);
  for (VertexId r : lattice.roots) {
    if (r < 0 || r >= n) throw StructuralError("root index out of range");
    if (seen[r]) throw StructuralError("duplicate root " + std::to_string(r));
    seen[r] = true;
    if (in_degree[r] != 0) {
      throw StructuralError("root " + std::to_string(r) +
                            " has incoming edges");
    }
  }
  std::fill(seen.begin(), seen.end(), false);
  for (VertexId l : lattice.leaves) {
    if (l < 0 || l >= n) throw StructuralError("leaf index out of range");
    if (seen[l]) throw StructuralError("duplicate leaf " + std::to_string(l));
    seen[l] = true;
    if (out_degree[l] != 0) {
      throw StructuralError("leaf " + std::to_string(l) +
                            " has outgoing edges");
    }
  }
  std::vector<bool> is_root(n, false);
  for (VertexId r : lattice.roots) is_root[r] = true;
  std::fill(seen.begin(), seen.end(), false);
  for (const Entry& en : lattice.entries) {
    if (en.vertex < 0 || en.vertex >= n || !is_root[en.vertex]) {
      throw StructuralError("entry weight attached to non-root vertex " +
                            std::to_string(en.vertex));
    }
    if (seen[en.vertex]) {
      throw StructuralError("root " + std::to_string(en.vertex) +
                            " has two entry weights");
    }
    seen[en.vertex] = true;
    if (en.weight_ref >= weight_table_size) {
      throw StructuralError("entry weight_ref " +
                            std::to_string(en.weight_ref) +
                            " is outside the weight table");
    }
  }
}

Adjacency build_adjacency(const Lattice& lattice) {
  const auto n = static_cast<std::size_t>(lattice.vertex_count);
  const auto& edges = lattice.edges;
  Adjacency adj;
  adj.in_offsets.assign(n + 1, 0);
  adj.out_offsets.assign(n + 1, 0);
  for (const Edge& e : edges) {
    ++adj.in_offsets[e.dst + 1];
    ++adj.out_offsets[e.src + 1];
  }
  std::partial_sum(adj.in_offsets.begin(), adj.in_offsets.end(),
                   adj.in_offsets.begin());
  std::partial_sum(adj.out_offsets.begin(), adj.out_offsets.end(),
                   adj.out_offsets.begin());

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);

  // Stable sort by (dst, src); ties keep edge-index order.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (edges[a].dst != edges[b].dst)
                       return edges[a].dst < edges[b].dst;
                     return edges[a].src < edges[b].src;
                   });
  adj.incoming = order;

  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (edges[a].src != edges[b].src)
                       return edges[a].src < edges[b].src;
                     return edges[a].dst < edges[b].dst;
                   });
  adj.outgoing = std::move(order);

  adj.entry_of.assign(n, -1);
  for (std::size_t i = 0; i < lattice.entries.size(); ++i) {
    adj.entry_of[lattice.entries[i].vertex] = static_cast<std::int64_t>(i);
  }
  adj.is_root.assign(n, false);
  for (VertexId r : lattice.roots) adj.is_root[r] = true;
  return adj;
}

std::vector<bool> useful_vertices(const Lattice& lattice) {
  const auto n = static_cast<std::size_t>(lattice.vertex_count);
  std::vector<bool> from_root(n, false), to_leaf(n, false);
  for (VertexId r : lattice.roots) from_root[r] = true;
  for (VertexId l : lattice.leaves) to_leaf[l] = true;
  // Edges may come in any order; sweep vertices in index order instead.
  const Adjacency adj = build_adjacency(lattice);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = adj.in_offsets[v]; k < adj.in_offsets[v + 1]; ++k) {
      if (from_root[lattice.edges[adj.incoming[k]].src]) {
        from_root[v] = true;
        break;
      }
    }
  }
  for (std::size_t v = n; v-- > 0;) {
    for (std::size_t k = adj.out_offsets[v]; k < adj.out_offsets[v + 1]; ++k) {
      if (to_leaf[lattice.edges[adj.outgoing[k]].dst]) {
        to_leaf[v] = true;
        break;
      }
    }
  }
  std::vector<bool> useful(n);
  for (std::size_t v = 0; v < n; ++v) useful[v] = from_root[v] && to_leaf[v];
  return useful;
}

std::vector<std::vector<VertexId>> depth_levels(const Lattice& lattice) {
  const auto n = static_cast<std::size_t>(lattice.vertex_count);
  std::vector<std::size_t> depth(n, 0);
  const Adjacency adj = build_adjacency(lattice);
  std::size_t max_depth = 0;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = adj.in_offsets[v]; k < adj.in_offsets[v + 1]; ++k) {
      depth[v] = std::max(depth[v], depth[lattice.edges[adj.incoming[k]].src] + 1);
    }
    max_depth = std::max(max_depth, depth[v]);
  }
  std::vector<std::vector<VertexId>> levels(n == 0 ? 0 : max_depth + 1);
  for (std::size_t v = 0; v < n; ++v) {
    levels[depth[v]].push_back(static_cast<VertexId>(v));
  }
  return levels;
}

Lattice reversed(const Lattice& lattice) {
  if (!lattice.entries.empty()) {
    throw UsageError("cannot reverse a lattice with entry weights");
  }
  const VertexId n = lattice.vertex_count;
  Lattice out;
  out.vertex_count = n;
  out.edges.reserve(lattice.edges.size());
  for (const Edge& e : lattice.edges) {
    out.edges.push_back({n - 1 - e.dst, n - 1 - e.src, e.weight_ref});
  }
  for (VertexId l : lattice.leaves) out.roots.push_back(n - 1 - l);
  for (VertexId r : lattice.roots) out.leaves.push_back(n - 1 - r);
  std::sort(out.roots.begin(), out.roots.end());
  std::sort(out.leaves.begin(), out.leaves.end());
  return out;
}

}  // namespace semirng
