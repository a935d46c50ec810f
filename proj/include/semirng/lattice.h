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

#ifndef SEMIRNG_LATTICE_H_
#define SEMIRNG_LATTICE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace semirng {

using VertexId = std::int32_t;

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  std::size_t weight_ref = 0;  // index into the caller's weight table
};

// An implicit edge from outside the graph into a root. The root's forward
// value becomes 1 (x) w(entry) instead of 1. CTC uses this for the frame-1
// emissions.
struct Entry {
  VertexId vertex = 0;
  std::size_t weight_ref = 0;
};

// Multi-root weighted DAG. Vertex indices are a topological order: every
// edge has src < dst.
struct Lattice {
  VertexId vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<VertexId> roots;
  std::vector<VertexId> leaves;
  std::vector<Entry> entries;
};

// Throws StructuralError on any violation of the index, ordering, root and
// leaf invariants, or if a weight_ref is >= weight_table_size. Vertices not
// on any root-to-leaf path are allowed; they do not contribute.
void validate(const Lattice& lattice, std::size_t weight_table_size);

// Edge list sorted for the left-fold order used by the engine.
struct Adjacency {
  // incoming[in_offsets[v] .. in_offsets[v+1]) are edge indices into v,
  // ordered by ascending (src, edge index).
  std::vector<std::size_t> in_offsets;
  std::vector<std::size_t> incoming;
  // outgoing edges of v ordered by ascending (dst, edge index).
  std::vector<std::size_t> out_offsets;
  std::vector<std::size_t> outgoing;
  // entry_of[v] is the index into Lattice::entries or -1.
  std::vector<std::int64_t> entry_of;
  std::vector<bool> is_root;
};

Adjacency build_adjacency(const Lattice& lattice);

// Marks vertices that lie on at least one root-to-leaf path.
std::vector<bool> useful_vertices(const Lattice& lattice);

// Depth levels: level 0 holds the roots and isolated vertices, level k holds
// vertices whose longest incoming path has k edges. Every edge goes from a
// lower level to a strictly higher one.
std::vector<std::vector<VertexId>> depth_levels(const Lattice& lattice);

// Edge-reversed lattice with vertex v renamed to n-1-v, roots and leaves
// swapped. Lattices with entries are rejected (UsageError).
Lattice reversed(const Lattice& lattice);

}  // namespace semirng

#endif  // SEMIRNG_LATTICE_H_
