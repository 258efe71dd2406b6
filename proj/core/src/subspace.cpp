#include "boundary/subspace.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "boundary/rng.hpp"

namespace boundary {

namespace {

constexpr double kOrthoTol = 1e-10;

// DCT matrices are requested over and over in transform-heavy loops; the
// cosine evaluations dominate the actual products, so keep them around.
const Matrix& dct_matrix_cached(int n) {
  thread_local std::map<int, Matrix> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, dct_matrix(n)).first;
  }
  return it->second;
}

}  // namespace

Matrix random_rotation(int dim, std::uint64_t seed) {
  if (dim < 1) {
    throw std::invalid_argument("random_rotation: dim must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = gauss(rng);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  if (q.determinant() < 0.0) {
    q.col(dim - 1) = -q.col(dim - 1);
  }
  return q;
}

Matrix dct_matrix(int n) {
  if (n < 1) {
    throw std::invalid_argument("dct_matrix: n must be >= 1");
  }
  Matrix m(n, n);
  const double dc = 1.0 / std::sqrt(static_cast<double>(n));
  const double ac = std::sqrt(2.0 / static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    m(0, j) = dc;
  }
  for (int k = 1; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      m(k, j) = ac * std::cos(M_PI * (2.0 * j + 1.0) * k / (2.0 * n));
    }
  }
  return m;
}

ImageTensor dct2(const ImageTensor& image) {
  const Matrix& mh = dct_matrix_cached(image.shape.height);
  const Matrix& mw = dct_matrix_cached(image.shape.width);
  ImageTensor out = ImageTensor::zeros(image.shape);
  for (int c = 0; c < image.shape.channels; ++c) {
    out.channel(c) = mh * image.channel(c) * mw.transpose();
  }
  return out;
}

ImageTensor idct2(const ImageTensor& image) {
  const Matrix& mh = dct_matrix_cached(image.shape.height);
  const Matrix& mw = dct_matrix_cached(image.shape.width);
  ImageTensor out = ImageTensor::zeros(image.shape);
  for (int c = 0; c < image.shape.channels; ++c) {
    out.channel(c) = mh.transpose() * image.channel(c) * mw;
  }
  return out;
}

ImageTensor flip_frequency(const ImageTensor& image) {
  ImageTensor coeffs = dct2(image);
  for (int c = 0; c < image.shape.channels; ++c) {
    coeffs.channel(c) = coeffs.channel(c).reverse().eval();
  }
  return idct2(coeffs);
}

ImageTensor band_filter(const ImageTensor& image, BandMode mode, int side) {
  const int limit = std::min(image.shape.height, image.shape.width);
  if (side < 1 || side > limit) {
    throw std::invalid_argument("band_filter: side out of range");
  }
  ImageTensor coeffs = dct2(image);
  for (int c = 0; c < image.shape.channels; ++c) {
    auto ch = coeffs.channel(c);
    if (mode == BandMode::kLowPass) {
      Matrix kept = ch.topLeftCorner(side, side);
      ch.setZero();
      ch.topLeftCorner(side, side) = kept;
    } else {
      ch.topLeftCorner(side, side).setZero();
    }
  }
  return idct2(coeffs);
}

Subspace::Subspace(Matrix basis, std::string label)
    : basis_(std::move(basis)), label_(std::move(label)) {
  if (basis_.rows() < 1 || basis_.cols() < 1 || basis_.cols() > basis_.rows()) {
    throw std::invalid_argument("Subspace: basis must be D x S with 1 <= S <= D");
  }
  Matrix gram = basis_.transpose() * basis_;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > kOrthoTol) {
    throw std::invalid_argument("Subspace '" + label_ + "': basis columns not orthonormal");
  }
}

Vector project(const Vector& v, const Subspace& subspace) {
  if (v.size() != subspace.ambient_dim()) {
    throw std::invalid_argument("project: vector dimension does not match subspace");
  }
  return subspace.basis() * (subspace.basis().transpose() * v);
}

std::string to_string(SubspaceScheme scheme) {
  switch (scheme) {
    case SubspaceScheme::kDiagonal: return "diagonal";
    case SubspaceScheme::kGrid: return "grid";
    case SubspaceScheme::kRandom: return "random";
    case SubspaceScheme::kCustom: return "custom";
  }
  return "custom";
}

SubspaceScheme subspace_scheme_from_string(const std::string& name) {
  if (name == "diagonal") return SubspaceScheme::kDiagonal;
  if (name == "grid") return SubspaceScheme::kGrid;
  if (name == "random") return SubspaceScheme::kRandom;
  if (name == "custom") return SubspaceScheme::kCustom;
  throw std::invalid_argument("unknown subspace scheme: " + name);
}

int SubspaceSequence::ambient_dim() const {
  return items.empty() ? 0 : items.front().ambient_dim();
}

namespace {

// Basis of the span of DCT atoms (rows[k], cols[k]) replicated across
// channels. Column order: atom-major, channel-minor.
Matrix dct_atom_basis(ImageShape shape, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
  const Matrix& mh = dct_matrix_cached(shape.height);
  const Matrix& mw = dct_matrix_cached(shape.width);
  const int atoms = static_cast<int>(rows.size());
  Matrix basis = Matrix::Zero(shape.dim(), atoms * shape.channels);
  for (int k = 0; k < atoms; ++k) {
    for (int c = 0; c < shape.channels; ++c) {
      const int col = k * shape.channels + c;
      for (int u = 0; u < shape.height; ++u) {
        const double row_val = mh(rows[k], u);
        for (int v = 0; v < shape.width; ++v) {
          basis((c * shape.height + u) * shape.width + v, col) = row_val * mw(cols[k], v);
        }
      }
    }
  }
  return basis;
}

void check_window(ImageShape shape, int window, int stride) {
  if (!shape.valid()) {
    throw std::invalid_argument("subspace sequence: invalid image shape");
  }
  const int limit = std::min(shape.height, shape.width);
  if (window < 1 || window > limit) {
    throw std::invalid_argument("subspace sequence: window exceeds min(H, W)");
  }
  if (stride < 1) {
    throw std::invalid_argument("subspace sequence: stride must be >= 1");
  }
}

}  // namespace

SubspaceSequence diagonal_subspaces(ImageShape shape, int window, int stride) {
  check_window(shape, window, stride);
  const int limit = std::min(shape.height, shape.width);
  const int count = (limit - window) / stride + 1;
  SubspaceSequence seq;
  seq.scheme = SubspaceScheme::kDiagonal;
  seq.window = window;
  seq.stride = stride;
  seq.image_shape = shape;
  seq.items.reserve(count);
  for (int j = 0; j < count; ++j) {
    std::vector<int> diag(window);
    for (int k = 0; k < window; ++k) {
      diag[k] = j * stride + k;
    }
    seq.items.emplace_back(dct_atom_basis(shape, diag, diag),
                           "diag_" + std::to_string(j * stride));
  }
  return seq;
}

SubspaceSequence grid_subspaces(ImageShape shape, int window, int stride) {
  check_window(shape, window, stride);
  const int limit = std::min(shape.height, shape.width);
  const int count = (limit - window) / stride + 1;
  SubspaceSequence seq;
  seq.scheme = SubspaceScheme::kGrid;
  seq.window = window;
  seq.stride = stride;
  seq.image_shape = shape;
  seq.items.reserve(count * count);
  for (int bi = 0; bi < count; ++bi) {
    for (int bj = 0; bj < count; ++bj) {
      std::vector<int> rows(window), cols(window);
      for (int k = 0; k < window; ++k) {
        rows[k] = bi * stride + k;
        cols[k] = bj * stride + k;
      }
      seq.items.emplace_back(
          dct_atom_basis(shape, rows, cols),
          "grid_" + std::to_string(bi * stride) + "_" + std::to_string(bj * stride));
    }
  }
  return seq;
}

SubspaceSequence random_subspace_sequence(int ambient_dim, const std::vector<int>& dims,
                                          std::uint64_t seed) {
  if (dims.empty()) {
    throw std::invalid_argument("random_subspace_sequence: need at least one dimension");
  }
  int total = 0;
  for (int d : dims) {
    if (d < 1 || d > ambient_dim) {
      throw std::invalid_argument("random_subspace_sequence: subspace dim out of range");
    }
    total += d;
  }
  if (total > ambient_dim) {
    throw std::invalid_argument("random_subspace_sequence: requested dims exceed ambient dim");
  }
  Matrix u = random_rotation(ambient_dim, seed);
  SubspaceSequence seq;
  seq.scheme = SubspaceScheme::kRandom;
  seq.seed = seed;
  seq.random_dims = dims;
  seq.items.reserve(dims.size());
  int offset = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    seq.items.emplace_back(u.middleCols(offset, dims[i]), "rand_" + std::to_string(i));
    offset += dims[i];
  }
  return seq;
}

}  // namespace boundary
