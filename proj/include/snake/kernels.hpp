#pragma once

// Data-parallel inner loops over the nodes of a configuration. Each kernel
// has a serial reference and an OpenMP version; the dispatching entry points
// pick one by problem size only, so results never depend on the thread count.

#include "snake/numerics.hpp"

#include <cstddef>

namespace snake::kernels {

/// Weighted first and second moments of unit vectors: sum w z, sum w z z^T.
struct Moments {
  Vec first;
  Mat second;
};

inline constexpr std::size_t kParallelThreshold = 4096;
/// Fixed reduction chunk; partial sums are combined in chunk order.
inline constexpr std::size_t kChunk = 1024;

namespace serial {
Mat act(const Mat& lorentz, const Mat& points);
Moments moments(const Mat& points, const Vec& weights);
}  // namespace serial

namespace parallel {
Mat act(const Mat& lorentz, const Mat& points);
Moments moments(const Mat& points, const Vec& weights);
}  // namespace parallel

Mat act(const Mat& lorentz, const Mat& points);
Moments moments(const Mat& points, const Vec& weights);

}  // namespace snake::kernels
