#pragma once

#include "boundary/linalg.hpp"

namespace boundary {

struct ImageShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  int pixel_count() const { return height * width; }
  int dim() const { return channels * height * width; }
  bool valid() const { return channels >= 1 && height >= 1 && width >= 1; }
  bool operator==(const ImageShape&) const = default;
};

// Dense image with channel-major storage: pixel (c, i, j) lives at index
// c*H*W + i*W + j of the flat vector. Subspace bases use the same layout,
// so projections act directly on `data`.
struct ImageTensor {
  ImageShape shape;
  Vector data;

  ImageTensor() = default;
  ImageTensor(ImageShape s, Vector d);

  static ImageTensor zeros(ImageShape s);
  static ImageTensor constant(ImageShape s, double value);

  double& at(int c, int i, int j) { return data[index(c, i, j)]; }
  double at(int c, int i, int j) const { return data[index(c, i, j)]; }
  int index(int c, int i, int j) const { return (c * shape.height + i) * shape.width + j; }

  Eigen::Map<RowMajorMatrix> channel(int c);
  Eigen::Map<const RowMajorMatrix> channel(int c) const;
};

}  // namespace boundary
