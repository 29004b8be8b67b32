#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace bbafem {

using Index = std::int32_t;
inline constexpr Index kNoIndex = -1;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// Signed area of the triangle (a, b, c); positive for counterclockwise order.
inline double signed_area(Point2 a, Point2 b, Point2 c) { return 0.5 * cross(b - a, c - a); }

using Triangle = std::array<Index, 3>;

enum class EdgeKind : std::uint8_t { interior, boundary };

struct Edge {
  std::array<Index, 2> vertices;  // sorted ascending
  EdgeKind kind;
};

/// The two elements sharing an edge. `minus` is kNoIndex on the boundary.
struct EdgeNeighbors {
  Index plus = kNoIndex;
  Index minus = kNoIndex;
};

/// Endpoints of the edge whose bisection created a vertex; both kNoIndex for
/// vertices of the coarsest mesh. Parents always have smaller indices.
struct VertexParents {
  Index first = kNoIndex;
  Index second = kNoIndex;
};

enum class DomainId { unit_square, lshape_sw, lshape_ne };

DomainId parse_domain(std::string_view name);
std::string_view domain_name(DomainId id);
/// Lebesgue measure of the domain.
double domain_area(DomainId id);

/// Conforming triangulation with edge topology. Local edge k of an element is
/// the edge opposite its local vertex k. Edges are numbered in lexicographic
/// order of their (sorted) vertex pairs.
class TriangleMesh {
 public:
  /// Builds topology from raw data. Clockwise elements are reoriented;
  /// degenerate elements and edges shared by more than two elements throw.
  static TriangleMesh from_elements(std::vector<Point2> vertices, std::vector<Triangle> elements,
                                    std::vector<VertexParents> parents = {});

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const Point2> vertices() const { return vertices_; }
  std::span<const Triangle> elements() const { return elements_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const std::array<Index, 3>> element_edges() const { return element_edges_; }
  std::span<const EdgeNeighbors> edge_elements() const { return edge_elements_; }
  std::span<const VertexParents> vertex_parents() const { return parents_; }
  const std::vector<bool>& boundary_vertex() const { return boundary_vertex_; }
  /// Local index (0..2) of each element's refinement edge.
  std::span<const std::uint8_t> refinement_edge() const { return refinement_edge_; }

  Point2 vertex(Index v) const { return vertices_[v]; }
  std::array<Point2, 3> corners(Index t) const;
  double area(Index t) const { return areas_[t]; }
  /// Element diameter h_T (longest edge length).
  double diameter(Index t) const { return diameters_[t]; }
  double edge_length(Index e) const;
  Point2 centroid(Index t) const;
  /// Outward unit normal of element t on its local edge k.
  Point2 outward_normal(Index t, int k) const;
  bool is_boundary_edge(Index e) const { return edges_[e].kind == EdgeKind::boundary; }

  double total_area() const;
  double boundary_length() const;
  double max_diameter() const;
  double min_diameter() const;
  /// Smallest interior angle over all elements, in radians.
  double min_angle() const;

 private:
  TriangleMesh() = default;

  std::vector<Point2> vertices_;
  std::vector<Triangle> elements_;
  std::vector<Edge> edges_;
  std::vector<std::array<Index, 3>> element_edges_;
  std::vector<EdgeNeighbors> edge_elements_;
  std::vector<VertexParents> parents_;
  std::vector<bool> boundary_vertex_;
  std::vector<std::uint8_t> refinement_edge_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
};

using MeshPtr = std::shared_ptr<const TriangleMesh>;

/// Local index of the longest edge of (a, b, c) given global vertex ids.
/// Ties go to the lexicographically smallest sorted vertex pair, which is
/// also the smallest global edge index.
int longest_edge(std::span<const Point2> vertices, const Triangle& tri);

/// Structured mesh: every unit square of the domain is split into an n x n
/// grid whose cells are cut along their south-west to north-east diagonal.
MeshPtr generate_domain(DomainId domain, int n);

struct ElementStar {
  Index center = kNoIndex;
  std::vector<Index> members;  // sorted, includes center
};

ElementStar star(const TriangleMesh& mesh, Index t);

/// Longest-edge bisection of every marked element, with recursive closure
/// (longest-edge propagation path) so the result stays conforming.
MeshPtr bisect(const TriangleMesh& mesh, std::span<const Index> marked);

/// Two passes of mark-all bisection: every element yields four children.
MeshPtr uniform_refine(const TriangleMesh& mesh);

/// Interpolates a vertex field of `coarse` onto a mesh obtained from it by
/// bisection. Old vertices keep their values, midpoints get edge averages.
std::vector<double> prolongate(std::span<const double> coarse_values, const TriangleMesh& fine);

}  // namespace bbafem
