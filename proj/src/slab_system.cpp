#include "stvanka/slab_system.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace stvanka {

DofMap::DofMap(const Mesh &mesh, int r, int k) : r_(r), k_(k) {
  if (r < 1) throw std::invalid_argument("velocity order must be >= 1");
  if (k < 0) throw std::invalid_argument("temporal degree must be >= 0");
  const int nv = static_cast<int>(mesh.n_vertices());
  const int nf = static_cast<int>(mesh.n_faces());
  const int ne = static_cast<int>(mesh.n_elements());
  const int n1 = r + 1;
  const int edge_nodes = r - 1;

  // Topological key: vertices, then edge-interior nodes, then cell interiors.
  std::vector<int> compact(nv + nf * edge_nodes + ne * edge_nodes * edge_nodes, -1);
  element_nodes_.resize(static_cast<std::size_t>(ne) * n1 * n1);

  for (int K = 0; K < ne; ++K) {
    const auto &e = mesh.elements()[K];
    for (int b = 0; b <= r; ++b) {
      for (int a = 0; a <= r; ++a) {
        int key = -1;
        const bool on_a = (a == 0 || a == r);
        const bool on_b = (b == 0 || b == r);
        if (on_a && on_b) {
          const int corner = (b == 0) ? (a == 0 ? 0 : 1) : (a == r ? 2 : 3);
          key = e[corner];
        } else if (on_a || on_b) {
          int lf = 0, pos = 0;
          if (b == 0) { lf = 0; pos = a; }
          else if (a == r) { lf = 1; pos = b; }
          else if (b == r) { lf = 2; pos = r - a; }
          else { lf = 3; pos = r - b; }
          const int f = mesh.element_face(K, lf);
          if (mesh.face(f).vertices[0] != e[lf]) pos = r - pos;
          key = nv + f * edge_nodes + (pos - 1);
        } else {
          key = nv + nf * edge_nodes + K * edge_nodes * edge_nodes + (a - 1) + (b - 1) * edge_nodes;
        }
        if (compact[key] < 0) {
          compact[key] = n_nodes_++;
          node_points_.push_back(
              mesh.element_geometry(K, {static_cast<double>(a) / r, static_cast<double>(b) / r})
                  .point);
        }
        element_nodes_[static_cast<std::size_t>(K) * n1 * n1 + a + n1 * b] = compact[key];
      }
    }
  }

  n_pressure_ = ne * local_pressure();
  spatial_dofs_.resize(static_cast<std::size_t>(ne) * local_block());
  for (int K = 0; K < ne; ++K) {
    int *out = spatial_dofs_.data() + static_cast<std::size_t>(K) * local_block();
    const auto nodes = element_nodes(K);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < local_scalar(); ++i) out[c * local_scalar() + i] = velocity_index(c, nodes[i]);
    for (int s = 0; s < local_pressure(); ++s) out[local_velocity() + s] = pressure_index(K, s);
  }

  for (int f : mesh.boundary_faces())
    if (mesh.is_dirichlet_face(f)) dirichlet_faces_.push_back(f);
}

LocalSlabVector restrict_local(const SlabVector &d, int element, const DofMap &map) {
  LocalSlabVector y(map.local_size());
  const auto spatial = map.element_spatial_dofs(element);
  const int nb = map.local_block();
  for (int l = 0; l < map.n_time(); ++l) {
    const int off = map.block_offset(l);
    for (int m = 0; m < nb; ++m) y[l * nb + m] = d[off + spatial[m]];
  }
  return y;
}

void extend_accumulate(const LocalSlabVector &y, int element, const DofMap &map, SlabVector &z,
                       std::vector<int> &counter) {
  const auto spatial = map.element_spatial_dofs(element);
  const int nb = map.local_block();
  for (int l = 0; l < map.n_time(); ++l) {
    const int off = map.block_offset(l);
    for (int m = 0; m < nb; ++m) {
      const int mu = off + spatial[m];
      z[mu] += y[l * nb + m];
      ++counter[mu];
    }
  }
}

SparsityPattern::SparsityPattern(const DofMap &map) : local_block_(map.local_block()) {
  const int n = map.block_size();
  const int lv = map.local_velocity();
  std::vector<std::vector<int>> rows(n);
  for (int K = 0; K < map.n_elements(); ++K) {
    const auto dofs = map.element_spatial_dofs(K);
    for (int i = 0; i < local_block_; ++i)
      for (int j = 0; j < local_block_; ++j) {
        if (i >= lv && j >= lv) continue;  // pressure-pressure coupling is zero
        rows[dofs[i]].push_back(dofs[j]);
      }
  }
  row_ptr_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto &r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    row_ptr_[i + 1] = row_ptr_[i] + static_cast<int>(r.size());
  }
  cols_.reserve(row_ptr_[n]);
  for (auto &r : rows) cols_.insert(cols_.end(), r.begin(), r.end());

  element_positions_.resize(static_cast<std::size_t>(map.n_elements()) * local_block_ *
                            local_block_);
  for (int K = 0; K < map.n_elements(); ++K) {
    const auto dofs = map.element_spatial_dofs(K);
    int *out = element_positions_.data() +
               static_cast<std::size_t>(K) * local_block_ * local_block_;
    for (int i = 0; i < local_block_; ++i)
      for (int j = 0; j < local_block_; ++j)
        out[i * local_block_ + j] = (i >= lv && j >= lv) ? -1 : find(dofs[i], dofs[j]);
  }
}

int SparsityPattern::find(int i, int j) const {
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return static_cast<int>(it - cols_.begin());
}

SlabBlockMatrix::SlabBlockMatrix(std::shared_ptr<const SparsityPattern> pattern, int n_time)
    : pattern_(std::move(pattern)), n_time_(n_time),
      values_(static_cast<std::size_t>(n_time) * n_time * pattern_->nnz(), 0.0) {}

double SlabBlockMatrix::entry(int a, int b, int i, int j) const {
  const int pos = pattern_->find(i, j);
  return pos < 0 ? 0.0 : block(a, b)[pos];
}

void SlabBlockMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void SlabBlockMatrix::multiply(const SlabVector &x, SlabVector &y) const {
  const int n = block_size();
  if (x.size() != size()) throw std::invalid_argument("block_matvec: dimension mismatch");
  y.setZero(size());
  const auto row_ptr = pattern_->row_ptr();
  const auto cols = pattern_->cols();
  for (int a = 0; a < n_time_; ++a) {
    double *ya = y.data() + a * n;
    for (int b = 0; b < n_time_; ++b) {
      const double *xb = x.data() + b * n;
      const double *v = block(a, b).data();
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += v[p] * xb[cols[p]];
        ya[i] += s;
      }
    }
  }
}

SlabVector SlabBlockMatrix::operator*(const SlabVector &x) const {
  SlabVector y;
  multiply(x, y);
  return y;
}

SlabVector block_matvec(const SlabBlockMatrix &J, const SlabVector &x) { return J * x; }

Eigen::SparseMatrix<double> SlabBlockMatrix::to_sparse() const {
  const int n = block_size();
  const auto row_ptr = pattern_->row_ptr();
  const auto cols = pattern_->cols();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(values_.size());
  for (int a = 0; a < n_time_; ++a)
    for (int b = 0; b < n_time_; ++b) {
      const auto v = block(a, b);
      for (int i = 0; i < n; ++i)
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
          if (v[p] != 0.0) triplets.emplace_back(a * n + i, b * n + cols[p], v[p]);
    }
  Eigen::SparseMatrix<double> A(size(), size());
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

Eigen::MatrixXd SlabBlockMatrix::to_dense() const { return Eigen::MatrixXd(to_sparse()); }

void write_matrix(std::ostream &out, const SlabBlockMatrix &J) {
  const auto row_ptr = J.pattern().row_ptr();
  const auto cols = J.pattern().cols();
  out << std::setprecision(17);
  for (int a = 0; a < J.n_time(); ++a)
    for (int b = 0; b < J.n_time(); ++b) {
      const auto v = J.block(a, b);
      for (int i = 0; i < J.block_size(); ++i)
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
          if (v[p] != 0.0) out << a << ' ' << b << ' ' << i << ' ' << cols[p] << ' ' << v[p] << '\n';
    }
}

void write_vector(std::ostream &out, const SlabVector &x, int block_size) {
  out << std::setprecision(17);
  for (Eigen::Index m = 0; m < x.size(); ++m)
    out << m / block_size << ' ' << m % block_size << ' ' << x[m] << '\n';
}

}  // namespace stvanka
