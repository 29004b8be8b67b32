#include "bbafem/mesh.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace bbafem {

namespace {

double squared_length(Point2 a, Point2 b) {
  const Point2 d = b - a;
  return dot(d, d);
}

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

DomainId parse_domain(std::string_view name) {
  if (name == "unit_square") return DomainId::unit_square;
  if (name == "lshape_sw") return DomainId::lshape_sw;
  if (name == "lshape_ne") return DomainId::lshape_ne;
  throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

std::string_view domain_name(DomainId id) {
  switch (id) {
    case DomainId::unit_square: return "unit_square";
    case DomainId::lshape_sw: return "lshape_sw";
    case DomainId::lshape_ne: return "lshape_ne";
  }
  return "unknown";
}

double domain_area(DomainId id) { return id == DomainId::unit_square ? 1.0 : 3.0; }

int longest_edge(std::span<const Point2> vertices, const Triangle& tri) {
  int best = 0;
  double best_len = -1.0;
  std::uint64_t best_key = 0;
  for (int k = 0; k < 3; ++k) {
    const Index a = tri[(k + 1) % 3];
    const Index b = tri[(k + 2) % 3];
    const double len = squared_length(vertices[a], vertices[b]);
    const std::uint64_t key = edge_key(a, b);
    if (len > best_len || (len == best_len && key < best_key)) {
      best = k;
      best_len = len;
      best_key = key;
    }
  }
  return best;
}

TriangleMesh TriangleMesh::from_elements(std::vector<Point2> vertices, std::vector<Triangle> elements,
                                         std::vector<VertexParents> parents) {
  TriangleMesh mesh;
  const auto nv = static_cast<Index>(vertices.size());
  if (parents.empty()) parents.resize(vertices.size());
  if (parents.size() != vertices.size()) throw std::invalid_argument("vertex parent table size mismatch");

  mesh.areas_.resize(elements.size());
  mesh.diameters_.resize(elements.size());
  for (std::size_t t = 0; t < elements.size(); ++t) {
    auto& tri = elements[t];
    for (Index v : tri)
      if (v < 0 || v >= nv) throw std::out_of_range("element references a missing vertex");
    double a = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    if (a < 0.0) {
      std::swap(tri[1], tri[2]);
      a = -a;
    }
    if (!(a > 0.0)) throw std::invalid_argument("degenerate element " + std::to_string(t));
    mesh.areas_[t] = a;
  }

  // Edge topology by sorting (key, element, local) triples.
  struct Slot {
    std::uint64_t key;
    Index element;
    int local;
  };
  std::vector<Slot> slots;
  slots.reserve(3 * elements.size());
  for (std::size_t t = 0; t < elements.size(); ++t)
    for (int k = 0; k < 3; ++k)
      slots.push_back({edge_key(elements[t][(k + 1) % 3], elements[t][(k + 2) % 3]),
                       static_cast<Index>(t), k});
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    return a.key != b.key ? a.key < b.key : a.element < b.element;
  });

  mesh.element_edges_.assign(elements.size(), {kNoIndex, kNoIndex, kNoIndex});
  mesh.boundary_vertex_.assign(vertices.size(), false);
  for (std::size_t i = 0; i < slots.size();) {
    std::size_t j = i + 1;
    while (j < slots.size() && slots[j].key == slots[i].key) ++j;
    if (j - i > 2) throw std::invalid_argument("non-manifold edge shared by more than two elements");
    const auto e = static_cast<Index>(mesh.edges_.size());
    const auto lo = static_cast<Index>(slots[i].key >> 32);
    const auto hi = static_cast<Index>(slots[i].key & 0xffffffffu);
    const bool boundary = (j - i) == 1;
    mesh.edges_.push_back({{lo, hi}, boundary ? EdgeKind::boundary : EdgeKind::interior});
    mesh.edge_elements_.push_back({slots[i].element, boundary ? kNoIndex : slots[i + 1].element});
    for (std::size_t s = i; s < j; ++s) mesh.element_edges_[slots[s].element][slots[s].local] = e;
    if (boundary) {
      mesh.boundary_vertex_[lo] = true;
      mesh.boundary_vertex_[hi] = true;
    }
    i = j;
  }

  mesh.refinement_edge_.resize(elements.size());
  for (std::size_t t = 0; t < elements.size(); ++t) {
    const int k = longest_edge(vertices, elements[t]);
    mesh.refinement_edge_[t] = static_cast<std::uint8_t>(k);
    mesh.diameters_[t] =
        std::sqrt(squared_length(vertices[elements[t][(k + 1) % 3]], vertices[elements[t][(k + 2) % 3]]));
  }

  mesh.vertices_ = std::move(vertices);
  mesh.elements_ = std::move(elements);
  mesh.parents_ = std::move(parents);
  return mesh;
}

std::array<Point2, 3> TriangleMesh::corners(Index t) const {
  const auto& tri = elements_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double TriangleMesh::edge_length(Index e) const {
  const auto& ed = edges_[e];
  return norm(vertices_[ed.vertices[1]] - vertices_[ed.vertices[0]]);
}

Point2 TriangleMesh::centroid(Index t) const {
  const auto c = corners(t);
  return (1.0 / 3.0) * (c[0] + c[1] + c[2]);
}

Point2 TriangleMesh::outward_normal(Index t, int k) const {
  const auto c = corners(t);
  const Point2 d = c[(k + 2) % 3] - c[(k + 1) % 3];
  // Counterclockwise orientation: the outward normal is the tangent rotated clockwise.
  const Point2 n{d.y, -d.x};
  return (1.0 / norm(n)) * n;
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

double TriangleMesh::boundary_length() const {
  double sum = 0.0;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].kind == EdgeKind::boundary) sum += edge_length(static_cast<Index>(e));
  return sum;
}

double TriangleMesh::max_diameter() const { return *std::max_element(diameters_.begin(), diameters_.end()); }
double TriangleMesh::min_diameter() const { return *std::min_element(diameters_.begin(), diameters_.end()); }

double TriangleMesh::min_angle() const {
  double best = std::numbers::pi;
  for (std::size_t t = 0; t < elements_.size(); ++t) {
    const auto c = corners(static_cast<Index>(t));
    for (int k = 0; k < 3; ++k) {
      const Point2 u = c[(k + 1) % 3] - c[k];
      const Point2 v = c[(k + 2) % 3] - c[k];
      best = std::min(best, std::atan2(std::abs(cross(u, v)), dot(u, v)));
    }
  }
  return best;
}

MeshPtr generate_domain(DomainId domain, int n) {
  if (n < 1) throw std::invalid_argument("subdivision count must be at least 1");

  // Lattice over the bounding box, cells of width 1/n.
  double x0 = 0.0, y0 = 0.0;
  int cells = n;
  if (domain != DomainId::unit_square) {
    x0 = -1.0;
    y0 = -1.0;
    cells = 2 * n;
  }
  const double h = 1.0 / n;
  auto cell_inside = [&](int i, int j) {
    const double cx = x0 + (i + 0.5) * h;
    const double cy = y0 + (j + 0.5) * h;
    switch (domain) {
      case DomainId::unit_square: return true;
      case DomainId::lshape_sw: return !(cx > 0.0 && cy < 0.0);
      case DomainId::lshape_ne: return !(cx > 0.0 && cy > 0.0);
    }
    return false;
  };

  const int stride = cells + 1;
  std::vector<Index> id(static_cast<std::size_t>(stride * stride), kNoIndex);
  std::vector<Point2> vertices;
  auto vertex_id = [&](int i, int j) {
    Index& slot = id[static_cast<std::size_t>(j * stride + i)];
    if (slot == kNoIndex) {
      slot = static_cast<Index>(vertices.size());
      vertices.push_back({x0 + i * h, y0 + j * h});
    }
    return slot;
  };

  std::vector<Triangle> elements;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      if (!cell_inside(i, j)) continue;
      const Index sw = vertex_id(i, j);
      const Index se = vertex_id(i + 1, j);
      const Index ne = vertex_id(i + 1, j + 1);
      const Index nw = vertex_id(i, j + 1);
      elements.push_back({sw, se, ne});
      elements.push_back({sw, ne, nw});
    }
  }
  return std::make_shared<const TriangleMesh>(TriangleMesh::from_elements(std::move(vertices), std::move(elements)));
}

ElementStar star(const TriangleMesh& mesh, Index t) {
  if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_elements()) throw std::out_of_range("element index out of range");
  ElementStar s;
  s.center = t;
  s.members.push_back(t);
  for (Index e : mesh.element_edges()[t]) {
    const auto nb = mesh.edge_elements()[e];
    const Index other = nb.plus == t ? nb.minus : nb.plus;
    if (other != kNoIndex) s.members.push_back(other);
  }
  std::sort(s.members.begin(), s.members.end());
  return s;
}

namespace {

/// Mutable triangulation used while bisecting. Elements are never erased, only
/// retired, so indices stay stable during a refinement pass.
class BisectionWorkspace {
 public:
  explicit BisectionWorkspace(const TriangleMesh& mesh)
      : vertices_(mesh.vertices().begin(), mesh.vertices().end()),
        parents_(mesh.vertex_parents().begin(), mesh.vertex_parents().end()),
        elements_(mesh.elements().begin(), mesh.elements().end()),
        alive_(mesh.num_elements(), true),
        step_cap_(10 * mesh.num_elements() + 10) {
    edges_.reserve(2 * mesh.num_edges());
    for (std::size_t t = 0; t < elements_.size(); ++t) attach(static_cast<Index>(t));
  }

  bool alive(Index t) const { return alive_[t]; }

  /// Bisects t through its longest edge, first refining along the
  /// longest-edge propagation path until t and its neighbour agree.
  void refine(Index t) {
    std::vector<Index> stack{t};
    while (!stack.empty()) {
      if (++steps_ > step_cap_) throw std::logic_error("bisection closure exceeded its iteration cap");
      const Index cur = stack.back();
      if (!alive_[cur]) {
        stack.pop_back();
        continue;
      }
      const int k = longest_edge(vertices_, elements_[cur]);
      const Index a = elements_[cur][(k + 1) % 3];
      const Index b = elements_[cur][(k + 2) % 3];
      const Index nb = neighbor(cur, a, b);
      if (nb == kNoIndex) {
        const Index m = add_midpoint(a, b);
        split(cur, k, m);
        stack.pop_back();
        continue;
      }
      const int kn = longest_edge(vertices_, elements_[nb]);
      if (edge_key(elements_[nb][(kn + 1) % 3], elements_[nb][(kn + 2) % 3]) == edge_key(a, b)) {
        const Index m = add_midpoint(a, b);
        split(cur, k, m);
        split(nb, kn, m);
        stack.pop_back();
      } else {
        stack.push_back(nb);
      }
    }
  }

  MeshPtr finish() {
    std::vector<Triangle> live;
    live.reserve(elements_.size());
    for (std::size_t t = 0; t < elements_.size(); ++t)
      if (alive_[t]) live.push_back(elements_[t]);
    return std::make_shared<const TriangleMesh>(
        TriangleMesh::from_elements(std::move(vertices_), std::move(live), std::move(parents_)));
  }

 private:
  struct Pair {
    Index first = kNoIndex;
    Index second = kNoIndex;
  };

  void attach(Index t) {
    const auto& tri = elements_[t];
    for (int k = 0; k < 3; ++k) {
      Pair& p = edges_[edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3])];
      if (p.first == kNoIndex) p.first = t;
      else p.second = t;
    }
  }

  void detach(Index t) {
    const auto& tri = elements_[t];
    for (int k = 0; k < 3; ++k) {
      auto it = edges_.find(edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3]));
      Pair& p = it->second;
      if (p.first == t) {
        p.first = p.second;
        p.second = kNoIndex;
      } else if (p.second == t) {
        p.second = kNoIndex;
      }
      if (p.first == kNoIndex) edges_.erase(it);
    }
  }

  Index neighbor(Index t, Index a, Index b) const {
    const Pair& p = edges_.at(edge_key(a, b));
    return p.first == t ? p.second : p.first;
  }

  Index add_midpoint(Index a, Index b) {
    vertices_.push_back(0.5 * (vertices_[a] + vertices_[b]));
    parents_.push_back({std::min(a, b), std::max(a, b)});
    return static_cast<Index>(vertices_.size() - 1);
  }

  void split(Index t, int k, Index m) {
    const Triangle tri = elements_[t];
    detach(t);
    alive_[t] = false;
    const Index c = tri[k];
    const Index a = tri[(k + 1) % 3];
    const Index b = tri[(k + 2) % 3];
    for (const Triangle& child : {Triangle{c, a, m}, Triangle{c, m, b}}) {
      elements_.push_back(child);
      alive_.push_back(true);
      attach(static_cast<Index>(elements_.size() - 1));
    }
  }

  std::vector<Point2> vertices_;
  std::vector<VertexParents> parents_;
  std::vector<Triangle> elements_;
  std::vector<bool> alive_;
  std::unordered_map<std::uint64_t, Pair> edges_;
  std::size_t steps_ = 0;
  std::size_t step_cap_;
};

}  // namespace

MeshPtr bisect(const TriangleMesh& mesh, std::span<const Index> marked) {
  if (marked.empty()) throw std::invalid_argument("no elements marked for bisection");
  BisectionWorkspace ws(mesh);
  for (Index t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_elements()) throw std::out_of_range("marked element index out of range");
    if (ws.alive(t)) ws.refine(t);
  }
  return ws.finish();
}

MeshPtr uniform_refine(const TriangleMesh& mesh) {
  auto all = [](const TriangleMesh& m) {
    std::vector<Index> ids(m.num_elements());
    for (std::size_t t = 0; t < ids.size(); ++t) ids[t] = static_cast<Index>(t);
    return ids;
  };
  const MeshPtr once = bisect(mesh, all(mesh));
  return bisect(*once, all(*once));
}

std::vector<double> prolongate(std::span<const double> coarse_values, const TriangleMesh& fine) {
  if (coarse_values.size() > fine.num_vertices()) throw std::invalid_argument("fine mesh has fewer vertices than the coarse field");
  std::vector<double> out(fine.num_vertices());
  std::copy(coarse_values.begin(), coarse_values.end(), out.begin());
  const auto parents = fine.vertex_parents();
  for (std::size_t v = coarse_values.size(); v < out.size(); ++v) {
    const auto p = parents[v];
    if (p.first == kNoIndex) throw std::invalid_argument("fine mesh is not a bisection refinement of the coarse mesh");
    out[v] = 0.5 * (out[p.first] + out[p.second]);
  }
  return out;
}

}  // namespace bbafem
