#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "boundary/subspace.hpp"
#include "oracles.hpp"

using namespace boundary;

namespace {

double ortho_error(const Matrix& m) {
  Matrix gram = m.transpose() * m;
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("random_rotation is special orthogonal") {
  CHECK(random_rotation(1, 42)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  const Matrix u = random_rotation(100, 7);
  CHECK(ortho_error(u) <= 1e-10);
  CHECK(u.determinant() == doctest::Approx(1.0).epsilon(1e-8));

  const Matrix a = random_rotation(3, 1);
  const Matrix b = random_rotation(3, 2);
  CHECK((a - b).cwiseAbs().maxCoeff() > 1e-3);

  const Matrix c = random_rotation(3, 1);
  CHECK((a - c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dct_matrix closed form") {
  CHECK(dct_matrix(1)(0, 0) == doctest::Approx(1.0));

  const Matrix m2 = dct_matrix(2);
  CHECK(m2(0, 0) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(m2(0, 1) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(m2(1, 0) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(m2(1, 1) == doctest::Approx(-0.7071).epsilon(1e-4));

  for (int n : {3, 8, 16, 28}) {
    CHECK(ortho_error(dct_matrix(n)) <= 1e-10);
  }
}

TEST_CASE("dct2 matches the explicit matrix product and round-trips") {
  std::mt19937_64 rng(11);

  // Constant image: all energy lands on the DC coefficient, value 4c.
  ImageTensor flat = ImageTensor::constant({1, 4, 4}, 0.75);
  ImageTensor coeff = dct2(flat);
  CHECK(coeff.at(0, 0, 0) == doctest::Approx(4 * 0.75).epsilon(1e-12));
  CHECK(coeff.data.tail(15).cwiseAbs().maxCoeff() <= 1e-12);

  const ImageTensor img = oracles::random_image({1, 8, 8}, rng);
  const Matrix m = dct_matrix(8);
  const Matrix direct = m * Matrix(img.channel(0)) * m.transpose();
  CHECK((Matrix(dct2(img).channel(0)) - direct).cwiseAbs().maxCoeff() <= 1e-12);

  for (int rep = 0; rep < 50; ++rep) {
    const ImageTensor x = oracles::random_image({3, 7, 5}, rng);
    const ImageTensor back = idct2(dct2(x));
    CHECK((back.data - x.data).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(dct2(x).data.norm() == doctest::Approx(x.data.norm()).epsilon(1e-10));
  }
}

TEST_CASE("diagonal_subspaces counts, dimensions, orthogonality") {
  const SubspaceSequence mnist = diagonal_subspaces({1, 28, 28}, 8, 1);
  CHECK(mnist.size() == 21);
  for (const Subspace& s : mnist.items) {
    CHECK(s.dim() == 8);
    CHECK(s.ambient_dim() == 784);
  }

  const SubspaceSequence cifar = diagonal_subspaces({3, 32, 32}, 8, 2);
  CHECK(cifar.size() == 13);
  for (const Subspace& s : cifar.items) {
    CHECK(s.dim() == 24);
  }

  CHECK_THROWS_AS(diagonal_subspaces({1, 8, 8}, 9, 1), std::invalid_argument);

  // Projections onto distinct items kill each other.
  const SubspaceSequence seq = diagonal_subspaces({1, 12, 12}, 4, 4);
  std::mt19937_64 rng(3);
  const Vector v = oracles::random_vector(144, rng);
  for (int i = 0; i < seq.size(); ++i) {
    for (int j = 0; j < seq.size(); ++j) {
      if (i == j) continue;
      CHECK(project(project(v, seq.items[i]), seq.items[j]).norm() <= 1e-10);
    }
  }
}

TEST_CASE("grid_subspaces layout") {
  const SubspaceSequence grid = grid_subspaces({1, 28, 28}, 8, 3);
  CHECK(grid.size() == 49);

  const SubspaceSequence diag = diagonal_subspaces({1, 28, 28}, 8, 3);
  // Diagonal blocks of the grid coincide with the diagonal sequence.
  for (int j = 0; j < diag.size(); ++j) {
    const Subspace& g = grid.items[j * 7 + j];
    const Subspace& d = diag.items[j];
    CHECK((g.basis() - d.basis()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("random_subspace_sequence blocks are disjoint and seeded") {
  const SubspaceSequence whole = random_subspace_sequence(20, {20}, 5);
  CHECK(whole.size() == 1);
  CHECK(whole.items[0].dim() == 20);

  const SubspaceSequence two = random_subspace_sequence(50, {3, 7}, 5);
  const Matrix cross = two.items[0].basis().transpose() * two.items[1].basis();
  CHECK(cross.cwiseAbs().maxCoeff() <= 1e-10);

  const SubspaceSequence again = random_subspace_sequence(50, {3, 7}, 5);
  CHECK((two.items[0].basis() - again.items[0].basis()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((two.items[1].basis() - again.items[1].basis()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(random_subspace_sequence(10, {6, 5}, 1), std::invalid_argument);
}

TEST_CASE("project properties") {
  std::mt19937_64 rng(17);
  const Matrix u = random_rotation(30, 9);
  const Subspace s(u.leftCols(5), "s");

  const Vector inside = u.leftCols(5) * oracles::random_vector(5, rng);
  CHECK((project(inside, s) - inside).cwiseAbs().maxCoeff() <= 1e-10);

  const Vector perp = u.rightCols(25) * oracles::random_vector(25, rng);
  CHECK(project(perp, s).norm() <= 1e-10);

  for (int rep = 0; rep < 100; ++rep) {
    const Vector v = oracles::random_vector(30, rng);
    const Vector p = project(v, s);
    CHECK((project(p, s) - p).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(v.squaredNorm() ==
          doctest::Approx(p.squaredNorm() + (v - p).squaredNorm()).epsilon(1e-8));
    CHECK(p.norm() <= v.norm() + 1e-12);
  }

  CHECK_THROWS_AS(project(Vector::Zero(7), s), std::invalid_argument);
  CHECK_THROWS_AS(Subspace(Matrix::Ones(4, 2), "bad"), std::invalid_argument);
}

TEST_CASE("flip_frequency is an isometric involution") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const ImageTensor x = oracles::random_image({2, 9, 6}, rng);
    const ImageTensor flipped = flip_frequency(x);
    CHECK((flip_frequency(flipped).data - x.data).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(flipped.data.norm() == doctest::Approx(x.data.norm()).epsilon(1e-10));
  }

  // DC maps to the highest frequency.
  ImageTensor flat = ImageTensor::constant({1, 6, 6}, 1.0);
  ImageTensor coeff = dct2(flip_frequency(flat));
  const double corner = coeff.at(0, 5, 5);
  CHECK(std::abs(corner) == doctest::Approx(coeff.data.norm()).epsilon(1e-10));
}

TEST_CASE("band_filter splits the spectrum exactly") {
  std::mt19937_64 rng(29);
  const ImageShape shape{1, 32, 32};

  const ImageTensor x = oracles::random_image(shape, rng);
  const ImageTensor identity = band_filter(x, BandMode::kLowPass, 32);
  CHECK((identity.data - x.data).cwiseAbs().maxCoeff() <= 1e-10);

  const ImageTensor low = band_filter(x, BandMode::kLowPass, 16);
  const ImageTensor high = band_filter(x, BandMode::kHighPass, 16);
  CHECK((low.data + high.data - x.data).cwiseAbs().maxCoeff() <= 1e-10);

  // Low-passed image has no content in diagonal subspaces starting at >= 16.
  const SubspaceSequence seq = diagonal_subspaces(shape, 8, 4);
  for (const Subspace& s : seq.items) {
    const int start = std::stoi(s.label().substr(5));
    if (start >= 16) {
      CHECK(project(low.data, s).norm() <= 1e-10);
    }
  }

  CHECK_THROWS_AS(band_filter(x, BandMode::kLowPass, 33), std::invalid_argument);
  CHECK_THROWS_AS(band_filter(x, BandMode::kLowPass, 0), std::invalid_argument);
}
