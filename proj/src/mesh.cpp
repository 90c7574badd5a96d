#include "stvanka/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace stvanka {

namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Reference corners in counterclockwise order.
constexpr std::array<Vec2, 4> kCorners = {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{1.0, 1.0},
                                          Vec2{0.0, 1.0}};

}  // namespace

Vec2 reference_face_point(int local_face, double s) {
  switch (local_face) {
  case 0: return {s, 0.0};
  case 1: return {1.0, s};
  case 2: return {1.0 - s, 1.0};
  case 3: return {0.0, 1.0 - s};
  default: throw MeshError("local face index out of range");
  }
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 4>> elements,
           std::vector<BoundarySegment> boundary, std::vector<BoundaryMarker> markers, int level)
    : vertices_(std::move(vertices)), elements_(std::move(elements)),
      boundary_(std::move(boundary)), markers_(std::move(markers)), level_(level) {
  validate();
  build_faces();
}

void Mesh::validate() {
  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t K = 0; K < elements_.size(); ++K) {
    for (int v : elements_[K]) {
      if (v < 0 || v >= nv)
        throw MeshError("element " + std::to_string(K) + " references unknown vertex " +
                            std::to_string(v),
                        static_cast<int>(K));
    }
    // The Jacobian determinant of a bilinear map is bilinear in the
    // reference coordinates, so positivity at the corners suffices.
    for (const Vec2 &c : kCorners) {
      if (element_geometry(static_cast<int>(K), c).det <= 0.0)
        throw MeshError("degenerate element " + std::to_string(K) +
                            " (non-positive Jacobian determinant)",
                        static_cast<int>(K));
    }
  }
  for (std::size_t i = 0; i < markers_.size(); ++i)
    for (std::size_t j = i + 1; j < markers_.size(); ++j)
      if (markers_[i].id == markers_[j].id)
        throw MeshError("duplicate boundary marker id " + std::to_string(markers_[i].id));

  diameters_.resize(elements_.size());
  h_ = 0.0;
  for (std::size_t K = 0; K < elements_.size(); ++K) {
    double d = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        d = std::max(d, norm(vertices_[elements_[K][a]] - vertices_[elements_[K][b]]));
    diameters_[K] = d;
    h_ = std::max(h_, d);
  }
}

void Mesh::build_faces() {
  std::map<std::pair<int, int>, int> lookup;
  element_faces_.assign(elements_.size(), {-1, -1, -1, -1});
  for (std::size_t K = 0; K < elements_.size(); ++K) {
    for (int f = 0; f < 4; ++f) {
      const int a = elements_[K][f];
      const int b = elements_[K][(f + 1) % 4];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), static_cast<int>(faces_.size()));
      if (inserted) {
        Face face;
        face.vertices = {a, b};
        face.elements[0] = static_cast<int>(K);
        face.local_faces[0] = f;
        faces_.push_back(face);
      } else {
        Face &face = faces_[it->second];
        if (face.elements[1] >= 0)
          throw MeshError("edge shared by more than two elements", static_cast<int>(K));
        face.elements[1] = static_cast<int>(K);
        face.local_faces[1] = f;
      }
      element_faces_[K][f] = it->second;
    }
  }

  for (const BoundarySegment &seg : boundary_) {
    auto it = lookup.find(edge_key(seg.v_a, seg.v_b));
    if (it == lookup.end())
      throw MeshError("boundary segment (" + std::to_string(seg.v_a) + ", " +
                      std::to_string(seg.v_b) + ") is not an element edge");
    Face &face = faces_[it->second];
    if (!face.is_boundary())
      throw MeshError("boundary segment (" + std::to_string(seg.v_a) + ", " +
                      std::to_string(seg.v_b) + ") lies on an interior edge");
    if (face.marker >= 0)
      throw MeshError("boundary edge carries more than one marker");
    if (!marker_kind(seg.marker))
      throw MeshError("boundary segment uses undeclared marker " + std::to_string(seg.marker));
    face.marker = seg.marker;
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (!faces_[f].is_boundary()) continue;
    if (faces_[f].marker < 0)
      throw MeshError("boundary edge (" + std::to_string(faces_[f].vertices[0]) + ", " +
                          std::to_string(faces_[f].vertices[1]) + ") has no marker",
                      faces_[f].elements[0]);
    boundary_faces_.push_back(static_cast<int>(f));
  }
}

std::optional<BoundaryKind> Mesh::marker_kind(int marker) const {
  for (const auto &m : markers_)
    if (m.id == marker) return m.kind;
  return std::nullopt;
}

bool Mesh::is_dirichlet_face(int face) const {
  const Face &f = faces_[face];
  return f.is_boundary() && marker_kind(f.marker) == BoundaryKind::dirichlet;
}

double Mesh::area(int element) const {
  const auto &e = elements_[element];
  double a = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2 &p = vertices_[e[i]];
    const Vec2 &q = vertices_[e[(i + 1) % 4]];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (std::size_t K = 0; K < elements_.size(); ++K) a += area(static_cast<int>(K));
  return a;
}

Vec2 Mesh::center(int element) const {
  Vec2 c;
  for (int v : elements_[element]) c += vertices_[v];
  return 0.25 * c;
}

ElementMapping Mesh::element_geometry(int element, Vec2 ref) const {
  const auto &e = elements_[element];
  const Vec2 &p0 = vertices_[e[0]];
  const Vec2 &p1 = vertices_[e[1]];
  const Vec2 &p2 = vertices_[e[2]];
  const Vec2 &p3 = vertices_[e[3]];
  const double xi = ref.x;
  const double eta = ref.y;

  ElementMapping m;
  m.point = (1 - xi) * (1 - eta) * p0 + xi * (1 - eta) * p1 + xi * eta * p2 + (1 - xi) * eta * p3;
  const Vec2 d_xi = (1 - eta) * (p1 - p0) + eta * (p2 - p3);
  const Vec2 d_eta = (1 - xi) * (p3 - p0) + xi * (p2 - p1);
  m.jacobian(0, 0) = d_xi.x;
  m.jacobian(1, 0) = d_xi.y;
  m.jacobian(0, 1) = d_eta.x;
  m.jacobian(1, 1) = d_eta.y;
  m.det = m.jacobian.det();
  if (m.det > 0.0) {
    const double inv = 1.0 / m.det;
    // (J^{-1})^T
    m.inverse_transpose(0, 0) = m.jacobian(1, 1) * inv;
    m.inverse_transpose(0, 1) = -m.jacobian(1, 0) * inv;
    m.inverse_transpose(1, 0) = -m.jacobian(0, 1) * inv;
    m.inverse_transpose(1, 1) = m.jacobian(0, 0) * inv;
  }
  return m;
}

FaceMapping Mesh::boundary_face_geometry(int face_id, double s) const {
  if (face_id < 0 || face_id >= static_cast<int>(faces_.size()))
    throw MeshError("face id out of range");
  const Face &face = faces_[face_id];
  if (!face.is_boundary())
    throw MeshError("face " + std::to_string(face_id) + " is an interior face");
  const int K = face.elements[0];
  const int f = face.local_faces[0];
  const auto &e = elements_[K];
  const Vec2 a = vertices_[e[f]];
  const Vec2 b = vertices_[e[(f + 1) % 4]];

  FaceMapping fm;
  fm.reference_point = reference_face_point(f, s);
  fm.point = (1.0 - s) * a + s * b;
  const Vec2 t = b - a;
  fm.surface_jacobian = norm(t);
  // Counterclockwise traversal: the outward normal is the tangent turned right.
  fm.normal = Vec2{t.y, -t.x} * (1.0 / fm.surface_jacobian);
  return fm;
}

Mesh refine_uniform(const Mesh &coarse, std::vector<ParentInfo> *parents,
                    const std::optional<CircleSnap> &snap) {
  std::vector<Vec2> vertices = coarse.vertices();
  const int nv = static_cast<int>(coarse.n_vertices());
  const int nf = static_cast<int>(coarse.n_faces());

  for (const Face &f : coarse.faces()) {
    Vec2 mid = 0.5 * (coarse.vertices()[f.vertices[0]] + coarse.vertices()[f.vertices[1]]);
    if (snap && f.is_boundary() && f.marker == snap->marker) {
      const Vec2 d = mid - snap->center;
      mid = snap->center + (snap->radius / norm(d)) * d;
    }
    vertices.push_back(mid);
  }
  for (std::size_t K = 0; K < coarse.n_elements(); ++K)
    vertices.push_back(coarse.center(static_cast<int>(K)));

  std::vector<std::array<int, 4>> elements;
  elements.reserve(4 * coarse.n_elements());
  if (parents) parents->clear();
  for (int K = 0; K < static_cast<int>(coarse.n_elements()); ++K) {
    const auto &e = coarse.elements()[K];
    // Vertex at reference position (a/2, b/2), a, b in {0, 1, 2}.
    auto at = [&](int a, int b) -> int {
      if (a != 1 && b != 1) {
        const int corner = (b == 0) ? (a == 0 ? 0 : 1) : (a == 2 ? 2 : 3);
        return e[corner];
      }
      if (a == 1 && b == 1) return nv + nf + K;
      int local_face = 0;
      if (b == 0) local_face = 0;
      else if (a == 2) local_face = 1;
      else if (b == 2) local_face = 2;
      else local_face = 3;
      return nv + coarse.element_face(K, local_face);
    };
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        elements.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
        if (parents) parents->push_back({K, i + 2 * j});
      }
    }
  }

  std::vector<BoundarySegment> boundary;
  for (int f : coarse.boundary_faces()) {
    const Face &face = coarse.face(f);
    boundary.push_back({face.marker, face.vertices[0], nv + f});
    boundary.push_back({face.marker, nv + f, face.vertices[1]});
  }
  return Mesh(std::move(vertices), std::move(elements), std::move(boundary), coarse.markers(),
              coarse.level() + 1);
}

MeshHierarchy build_hierarchy(const Mesh &coarse, int levels,
                              const std::optional<CircleSnap> &snap) {
  if (levels < 0) throw MeshError("level count must be non-negative");
  MeshHierarchy h;
  h.levels.push_back(coarse);
  h.parents.emplace_back();
  for (int l = 1; l <= levels; ++l) {
    std::vector<ParentInfo> parents;
    Mesh fine = refine_uniform(h.levels.back(), &parents, snap);
    h.levels.push_back(std::move(fine));
    h.parents.push_back(std::move(parents));
  }
  return h;
}

Mesh read_mesh(std::istream &in) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string &msg) -> MeshError {
    return MeshError("mesh file line " + std::to_string(line_no) + ": " + msg);
  };

  std::size_t nv = 0, ne = 0, nb = 0;
  bool header = false;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 4>> elements;
  std::vector<BoundarySegment> boundary;
  std::vector<BoundaryMarker> markers;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (!header) {
      if (tag != "mesh2d" || !(ls >> nv >> ne >> nb)) throw fail("expected 'mesh2d' header");
      header = true;
      continue;
    }
    if (tag == "v") {
      Vec2 p;
      if (!(ls >> p.x >> p.y)) throw fail("malformed vertex");
      vertices.push_back(p);
    } else if (tag == "e") {
      std::array<int, 4> e{};
      if (!(ls >> e[0] >> e[1] >> e[2] >> e[3])) throw fail("malformed element");
      elements.push_back(e);
    } else if (tag == "b") {
      BoundarySegment s;
      if (!(ls >> s.marker >> s.v_a >> s.v_b)) throw fail("malformed boundary line");
      boundary.push_back(s);
    } else if (tag == "m") {
      BoundaryMarker m;
      std::string kind;
      if (!(ls >> m.id >> kind)) throw fail("malformed marker line");
      if (kind == "dirichlet") m.kind = BoundaryKind::dirichlet;
      else if (kind == "do_nothing") m.kind = BoundaryKind::do_nothing;
      else throw fail("unknown marker kind '" + kind + "'");
      markers.push_back(m);
    } else {
      throw fail("unknown record '" + tag + "'");
    }
  }
  if (!header) throw MeshError("mesh file: missing header");
  if (vertices.size() != nv || elements.size() != ne || boundary.size() != nb)
    throw MeshError("mesh file: record counts do not match header");
  return Mesh(std::move(vertices), std::move(elements), std::move(boundary), std::move(markers));
}

Mesh read_mesh_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream &out, const Mesh &mesh) {
  out << "mesh2d " << mesh.n_vertices() << ' ' << mesh.n_elements() << ' '
      << mesh.boundary_faces().size() << '\n';
  out << std::setprecision(17);
  for (const Vec2 &p : mesh.vertices()) out << "v " << p.x << ' ' << p.y << '\n';
  for (const auto &e : mesh.elements())
    out << "e " << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << '\n';
  for (int f : mesh.boundary_faces()) {
    const Face &face = mesh.face(f);
    out << "b " << face.marker << ' ' << face.vertices[0] << ' ' << face.vertices[1] << '\n';
  }
  for (const BoundaryMarker &m : mesh.markers())
    out << "m " << m.id << ' '
        << (m.kind == BoundaryKind::dirichlet ? "dirichlet" : "do_nothing") << '\n';
}

Mesh make_rectangle(double x0, double x1, double y0, double y1, int nx, int ny,
                    std::array<BoundaryMarker, 4> sides) {
  if (nx < 1 || ny < 1) throw MeshError("rectangle needs at least one element per direction");
  std::vector<Vec2> vertices;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  auto id = [nx](int i, int j) { return i + (nx + 1) * j; };
  std::vector<std::array<int, 4>> elements;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});

  std::vector<BoundarySegment> boundary;
  for (int i = 0; i < nx; ++i) {
    boundary.push_back({sides[0].id, id(i, 0), id(i + 1, 0)});
    boundary.push_back({sides[2].id, id(i, ny), id(i + 1, ny)});
  }
  for (int j = 0; j < ny; ++j) {
    boundary.push_back({sides[1].id, id(nx, j), id(nx, j + 1)});
    boundary.push_back({sides[3].id, id(0, j), id(0, j + 1)});
  }
  std::vector<BoundaryMarker> markers;
  for (const auto &s : sides) {
    auto it = std::find_if(markers.begin(), markers.end(),
                           [&](const BoundaryMarker &m) { return m.id == s.id; });
    if (it == markers.end()) markers.push_back(s);
    else if (it->kind != s.kind) throw MeshError("conflicting kinds for marker " +
                                                 std::to_string(s.id));
  }
  return Mesh(std::move(vertices), std::move(elements), std::move(boundary), std::move(markers));
}

}  // namespace stvanka
