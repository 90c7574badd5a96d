#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stvanka {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 &operator+=(const Vec2 &o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2 &operator-=(const Vec2 &o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2 &operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  double operator[](int i) const { return i == 0 ? x : y; }
  double &operator[](int i) { return i == 0 ? x : y; }
};

inline Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2 &a) { return std::sqrt(dot(a, a)); }

/// Row-major 2x2 matrix, (*this)(i, j) = m[i][j].
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{};

  double operator()(int i, int j) const { return m[i][j]; }
  double &operator()(int i, int j) { return m[i][j]; }
  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  Vec2 operator*(const Vec2 &v) const {
    return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
  }
};

enum class BoundaryKind { dirichlet, do_nothing };

struct BoundaryMarker {
  int id = 0;
  BoundaryKind kind = BoundaryKind::dirichlet;
};

/// Boundary edge given by its two end vertices; orientation is irrelevant.
struct BoundarySegment {
  int marker = 0;
  int v_a = 0;
  int v_b = 0;
};

/// Edge of the partition. Local face numbering of an element with
/// counterclockwise vertices v0..v3: face f joins v_f and v_{(f+1)%4}.
struct Face {
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> elements{-1, -1};
  std::array<int, 2> local_faces{-1, -1};
  int marker = -1;

  bool is_boundary() const { return elements[1] < 0; }
};

class MeshError : public std::runtime_error {
public:
  MeshError(const std::string &what, int element = -1)
      : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

private:
  int element_;
};

/// Values of the bilinear reference-to-physical map at one reference point.
struct ElementMapping {
  Vec2 point;
  Mat2 jacobian;  // d(x, y) / d(xi, eta)
  double det = 0.0;
  Mat2 inverse_transpose;
};

struct FaceMapping {
  Vec2 point;
  Vec2 normal;  // outward with respect to the adjacent element
  double surface_jacobian = 0.0;
  Vec2 reference_point;  // position on the adjacent element's reference square
};

/// Reference point on [0,1]^2 of local face `local_face` at parameter s in
/// [0,1], traversed counterclockwise.
Vec2 reference_face_point(int local_face, double s);

/// Conforming quadrilateral partition of a polygonal 2D domain.
class Mesh {
public:
  Mesh() = default;
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 4>> elements,
       std::vector<BoundarySegment> boundary, std::vector<BoundaryMarker> markers,
       int level = 0);

  int level() const { return level_; }
  double h() const { return h_; }
  std::size_t n_vertices() const { return vertices_.size(); }
  std::size_t n_elements() const { return elements_.size(); }
  std::size_t n_faces() const { return faces_.size(); }

  const std::vector<Vec2> &vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>> &elements() const { return elements_; }
  const std::vector<Face> &faces() const { return faces_; }
  const std::vector<BoundarySegment> &boundary_segments() const { return boundary_; }
  const std::vector<BoundaryMarker> &markers() const { return markers_; }
  const std::vector<int> &boundary_faces() const { return boundary_faces_; }

  int element_face(int element, int local_face) const {
    return element_faces_[element][local_face];
  }
  const Face &face(int id) const { return faces_[id]; }

  std::optional<BoundaryKind> marker_kind(int marker) const;
  bool is_dirichlet_face(int face) const;

  double diameter(int element) const { return diameters_[element]; }
  double area(int element) const;
  double total_area() const;
  Vec2 center(int element) const;

  ElementMapping element_geometry(int element, Vec2 reference) const;
  FaceMapping boundary_face_geometry(int face, double s) const;

private:
  void build_faces();
  void validate();

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 4>> elements_;
  std::vector<BoundarySegment> boundary_;
  std::vector<BoundaryMarker> markers_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 4>> element_faces_;
  std::vector<int> boundary_faces_;
  std::vector<double> diameters_;
  int level_ = 0;
  double h_ = 0.0;
};

/// Projection of newly created boundary vertices onto a circle.
struct CircleSnap {
  int marker = 0;
  Vec2 center;
  double radius = 0.0;
};

struct ParentInfo {
  int element = -1;  // parent element on the coarser level
  int child = -1;    // quadrant i + 2 j of the parent's reference square
};

/// Nested sequence of uniformly refined meshes, levels[0] the coarsest.
struct MeshHierarchy {
  std::vector<Mesh> levels;
  /// parents[l][K]: parent of level-l element K; empty for l = 0.
  std::vector<std::vector<ParentInfo>> parents;
  double ratio = 0.5;

  int finest() const { return static_cast<int>(levels.size()) - 1; }
  const Mesh &fine() const { return levels.back(); }
  std::array<int, 4> children(int /*level*/, int element) const {
    return {4 * element, 4 * element + 1, 4 * element + 2, 4 * element + 3};
  }
};

/// Quadrisection of every element. Children of element K are 4K + c with
/// c = i + 2j the quadrant index; parents receives the inverse map.
Mesh refine_uniform(const Mesh &coarse, std::vector<ParentInfo> *parents = nullptr,
                    const std::optional<CircleSnap> &snap = std::nullopt);

MeshHierarchy build_hierarchy(const Mesh &coarse, int levels,
                              const std::optional<CircleSnap> &snap = std::nullopt);

/// Position of the child reference point `child_ref` in the parent's
/// reference square.
inline Vec2 child_to_parent_reference(int child, Vec2 child_ref) {
  return {0.5 * ((child % 2) + child_ref.x), 0.5 * ((child / 2) + child_ref.y)};
}

Mesh read_mesh(std::istream &in);
Mesh read_mesh_file(const std::string &path);
void write_mesh(std::ostream &out, const Mesh &mesh);

/// Rectangle [x0,x1] x [y0,y1] split into nx x ny elements. Markers are
/// assigned per side: bottom, right, top, left.
Mesh make_rectangle(double x0, double x1, double y0, double y1, int nx, int ny,
                    std::array<BoundaryMarker, 4> sides);

}  // namespace stvanka
