#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace anderson {

enum class GraphKind { zd_box, bethe };

inline constexpr std::size_t kDefaultVertexBudget = 4'000'000;

// Finite graph carrying an Anderson Hamiltonian: a box in Z^d with open
// boundary, or a Bethe tree of connectivity K truncated at depth R. Immutable
// after construction; safe to share across threads.
//
// Vertex enumeration is fixed so seeded disorder is reproducible:
//  - zd_box: row-major over coordinates x in [0, L)^d, the first coordinate
//    slowest: index = x_0 L^{d-1} + x_1 L^{d-2} + ... + x_{d-1}.
//  - bethe: breadth-first from the root; the root's K+1 subtrees in order,
//    then each vertex's K children in order of discovery.
struct GraphSpec {
  GraphKind kind = GraphKind::zd_box;
  int dim = 0;           // zd_box
  int side = 0;          // zd_box
  int connectivity = 0;  // bethe K
  int depth = 0;         // bethe R
  int vertex_count = 0;
  int origin = 0;
  std::vector<std::vector<int>> adjacency;
  std::vector<int> parent;  // bethe: parent vertex, -1 at the root
  std::vector<int> level;   // bethe: distance from the root

  int max_degree() const { return kind == GraphKind::zd_box ? 2 * dim : connectivity + 1; }

  // comma-free so the label can sit in a CSV field
  std::string label() const {
    if (kind == GraphKind::zd_box)
      return "zd_box_d" + std::to_string(dim) + "_L" + std::to_string(side);
    return "bethe_K" + std::to_string(connectivity) + "_R" + std::to_string(depth);
  }
};

namespace detail {

inline void check_vertex(const GraphSpec& g, int v, const char* who) {
  if (v < 0 || v >= g.vertex_count) throw std::invalid_argument(std::string(who) + ": vertex out of range");
}

}  // namespace detail

inline GraphSpec build_box(int d, int L, std::size_t budget = kDefaultVertexBudget) {
  if (d < 1) throw std::invalid_argument("build_box: d must be >= 1");
  if (L < 1 || L % 2 == 0) throw std::invalid_argument("build_box: L must be odd and positive");

  std::size_t count = 1;
  for (int i = 0; i < d; ++i) {
    count *= static_cast<std::size_t>(L);
    if (count > budget) throw std::invalid_argument("build_box: L^d exceeds the vertex budget");
  }

  GraphSpec g;
  g.kind = GraphKind::zd_box;
  g.dim = d;
  g.side = L;
  g.vertex_count = static_cast<int>(count);
  g.adjacency.assign(count, {});

  // strides[axis] = L^(d-1-axis)
  std::vector<int> strides(static_cast<std::size_t>(d), 1);
  for (int axis = d - 2; axis >= 0; --axis)
    strides[static_cast<std::size_t>(axis)] = strides[static_cast<std::size_t>(axis + 1)] * L;

  std::vector<int> coord(static_cast<std::size_t>(d), 0);
  for (int v = 0; v < g.vertex_count; ++v) {
    int rem = v;
    for (int axis = 0; axis < d; ++axis) {
      coord[static_cast<std::size_t>(axis)] = rem / strides[static_cast<std::size_t>(axis)];
      rem %= strides[static_cast<std::size_t>(axis)];
    }
    auto& nbrs = g.adjacency[static_cast<std::size_t>(v)];
    nbrs.reserve(static_cast<std::size_t>(2 * d));
    for (int axis = 0; axis < d; ++axis) {
      const int x = coord[static_cast<std::size_t>(axis)];
      if (x > 0) nbrs.push_back(v - strides[static_cast<std::size_t>(axis)]);
      if (x < L - 1) nbrs.push_back(v + strides[static_cast<std::size_t>(axis)]);
    }
  }

  const int half = (L - 1) / 2;
  int origin = 0;
  for (int axis = 0; axis < d; ++axis) origin += half * strides[static_cast<std::size_t>(axis)];
  g.origin = origin;
  return g;
}

inline GraphSpec build_bethe(int K, int R, std::size_t budget = kDefaultVertexBudget) {
  if (K < 2) throw std::invalid_argument("build_bethe: K must be >= 2");
  if (R < 1) throw std::invalid_argument("build_bethe: R must be >= 1");

  // 1 + (K+1)(K^R - 1)/(K - 1) vertices
  std::size_t shell = static_cast<std::size_t>(K) + 1;  // vertices at depth 1
  std::size_t count = 1;
  for (int r = 1; r <= R; ++r) {
    count += shell;
    if (count > budget) throw std::invalid_argument("build_bethe: size exceeds the vertex budget");
    shell *= static_cast<std::size_t>(K);
  }

  GraphSpec g;
  g.kind = GraphKind::bethe;
  g.connectivity = K;
  g.depth = R;
  g.vertex_count = static_cast<int>(count);
  g.origin = 0;
  g.adjacency.assign(count, {});
  g.parent.assign(count, -1);
  g.level.assign(count, 0);

  int next = 1;
  for (int v = 0; v < g.vertex_count; ++v) {
    if (g.level[static_cast<std::size_t>(v)] >= R) continue;
    const int children = (v == 0) ? K + 1 : K;
    for (int c = 0; c < children; ++c) {
      const int u = next++;
      g.parent[static_cast<std::size_t>(u)] = v;
      g.level[static_cast<std::size_t>(u)] = g.level[static_cast<std::size_t>(v)] + 1;
      g.adjacency[static_cast<std::size_t>(v)].push_back(u);
      g.adjacency[static_cast<std::size_t>(u)].push_back(v);
    }
  }
  return g;
}

// Graph metric: l^1 distance between lattice coordinates for boxes, path
// length through the tree for Bethe graphs.
inline int distance(const GraphSpec& g, int u, int v) {
  detail::check_vertex(g, u, "distance");
  detail::check_vertex(g, v, "distance");
  if (g.kind == GraphKind::zd_box) {
    int dist = 0;
    int ru = u, rv = v;
    int stride = g.vertex_count / g.side;  // L^(d-1)
    for (int axis = 0; axis < g.dim; ++axis) {
      dist += std::abs(ru / stride - rv / stride);
      ru %= stride;
      rv %= stride;
      stride /= g.side;
    }
    return dist;
  }
  int a = u, b = v, steps = 0;
  while (g.level[static_cast<std::size_t>(a)] > g.level[static_cast<std::size_t>(b)]) {
    a = g.parent[static_cast<std::size_t>(a)];
    ++steps;
  }
  while (g.level[static_cast<std::size_t>(b)] > g.level[static_cast<std::size_t>(a)]) {
    b = g.parent[static_cast<std::size_t>(b)];
    ++steps;
  }
  while (a != b) {
    a = g.parent[static_cast<std::size_t>(a)];
    b = g.parent[static_cast<std::size_t>(b)];
    steps += 2;
  }
  return steps;
}

// Centered coordinates of a box vertex (origin maps to the zero vector).
inline std::vector<int> box_coordinate(const GraphSpec& g, int v) {
  if (g.kind != GraphKind::zd_box) throw std::invalid_argument("box_coordinate: not a box graph");
  detail::check_vertex(g, v, "box_coordinate");
  std::vector<int> coord(static_cast<std::size_t>(g.dim));
  int stride = g.vertex_count / g.side;
  const int half = (g.side - 1) / 2;
  int rem = v;
  for (int axis = 0; axis < g.dim; ++axis) {
    coord[static_cast<std::size_t>(axis)] = rem / stride - half;
    rem %= stride;
    stride /= g.side;
  }
  return coord;
}

// BFS shells around a vertex: shells[r] lists the vertices at graph distance
// exactly r, for r in [0, r_max]. Used to average Green's function moments
// over equidistant vertices.
inline std::vector<std::vector<int>> shells_from(const GraphSpec& g, int v, int r_max) {
  detail::check_vertex(g, v, "shells_from");
  if (r_max < 0) throw std::invalid_argument("shells_from: r_max < 0");
  std::vector<int> dist(static_cast<std::size_t>(g.vertex_count), -1);
  std::vector<std::vector<int>> shells(static_cast<std::size_t>(r_max) + 1);
  std::queue<int> queue;
  dist[static_cast<std::size_t>(v)] = 0;
  queue.push(v);
  shells[0].push_back(v);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    const int du = dist[static_cast<std::size_t>(u)];
    if (du >= r_max) continue;
    for (int w : g.adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(w)] >= 0) continue;
      dist[static_cast<std::size_t>(w)] = du + 1;
      shells[static_cast<std::size_t>(du) + 1].push_back(w);
      queue.push(w);
    }
  }
  return shells;
}

}  // namespace anderson
