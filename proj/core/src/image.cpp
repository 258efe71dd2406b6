#include "boundary/image.hpp"

#include <stdexcept>

namespace boundary {

ImageTensor::ImageTensor(ImageShape s, Vector d) : shape(s), data(std::move(d)) {
  if (!shape.valid() || data.size() != shape.dim()) {
    throw std::invalid_argument("ImageTensor: data size does not match shape");
  }
}

ImageTensor ImageTensor::zeros(ImageShape s) {
  return ImageTensor(s, Vector::Zero(s.dim()));
}

ImageTensor ImageTensor::constant(ImageShape s, double value) {
  return ImageTensor(s, Vector::Constant(s.dim(), value));
}

Eigen::Map<RowMajorMatrix> ImageTensor::channel(int c) {
  return Eigen::Map<RowMajorMatrix>(data.data() + c * shape.pixel_count(), shape.height,
                                    shape.width);
}

Eigen::Map<const RowMajorMatrix> ImageTensor::channel(int c) const {
  return Eigen::Map<const RowMajorMatrix>(data.data() + c * shape.pixel_count(), shape.height,
                                          shape.width);
}

}  // namespace boundary
