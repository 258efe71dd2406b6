#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boundary/image.hpp"
#include "boundary/linalg.hpp"

namespace boundary {

// Haar-distributed rotation: orthonormalized Gaussian matrix with the R
// diagonal made positive and one column negated if needed so det = +1.
Matrix random_rotation(int dim, std::uint64_t seed);

// Orthonormal type-II DCT matrix; rows are the basis functions.
// Row 0 is the constant 1/sqrt(n), row k entry j is
// sqrt(2/n) * cos(pi * (2j+1) * k / (2n)).
Matrix dct_matrix(int n);

// Per-channel separable 2D transform M * X * M^T and its inverse.
ImageTensor dct2(const ImageTensor& image);
ImageTensor idct2(const ImageTensor& image);

// Swaps low and high frequency content: transform, reverse both spatial
// index orders per channel, transform back. Isometric involution.
ImageTensor flip_frequency(const ImageTensor& image);

enum class BandMode { kLowPass, kHighPass };

// kLowPass keeps DCT coefficients (i, j) with i < side and j < side and
// zeroes the rest; kHighPass zeroes exactly that square. The two outputs
// sum back to the input.
ImageTensor band_filter(const ImageTensor& image, BandMode mode, int side);

// A linear subspace given by orthonormal basis columns. The constructor
// rejects bases with max |B^T B - I| > 1e-10.
class Subspace {
 public:
  Subspace(Matrix basis, std::string label);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  const std::string& label() const { return label_; }

 private:
  Matrix basis_;
  std::string label_;
};

// Orthogonal projection B B^T v.
Vector project(const Vector& v, const Subspace& subspace);

enum class SubspaceScheme { kDiagonal, kGrid, kRandom, kCustom };

std::string to_string(SubspaceScheme scheme);
SubspaceScheme subspace_scheme_from_string(const std::string& name);

struct SubspaceSequence {
  std::vector<Subspace> items;
  SubspaceScheme scheme = SubspaceScheme::kCustom;
  int window = 0;  // K
  int stride = 0;  // T
  ImageShape image_shape{};
  // kRandom bookkeeping, enough to regenerate the bases.
  std::uint64_t seed = 0;
  std::vector<int> random_dims;

  int size() const { return static_cast<int>(items.size()); }
  int ambient_dim() const;
};

// Blocks of K consecutive diagonal DCT atoms, replicated per channel,
// swept low-to-high frequency with the given stride. Subspace j spans
// the vectorized atoms (j*T + k, j*T + k) for k = 0..K-1, one basis
// column per channel, so each item has dimension K * channels.
SubspaceSequence diagonal_subspaces(ImageShape shape, int window, int stride);

// Same diagonal-of-block construction at every grid position (i*T, j*T);
// labels carry the 2D block coordinates.
SubspaceSequence grid_subspaces(ImageShape shape, int window, int stride);

// Disjoint column blocks of a single random rotation.
SubspaceSequence random_subspace_sequence(int ambient_dim, const std::vector<int>& dims,
                                          std::uint64_t seed);

}  // namespace boundary
