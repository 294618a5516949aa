#include "snake/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <vector>

namespace snake::kernels {

namespace {

// Shared by both variants so they agree bit for bit.
inline void act_column(const Mat& g, const Mat& points, Mat& out, Eigen::Index j) {
  const Eigen::Index d = points.rows();
  double w = g(d, d);
  for (Eigen::Index k = 0; k < d; ++k) w += g(d, k) * points(k, j);
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    double y = g(i, d);
    for (Eigen::Index k = 0; k < d; ++k) y += g(i, k) * points(k, j);
    y /= w;
    out(i, j) = y;
    norm2 += y * y;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (Eigen::Index i = 0; i < d; ++i) out(i, j) *= inv;
}

inline void accumulate(const Mat& points, const Vec& weights, Eigen::Index begin,
                       Eigen::Index end, Vec& first, Mat& second) {
  const Eigen::Index d = points.rows();
  for (Eigen::Index j = begin; j < end; ++j) {
    const double w = weights(j);
    for (Eigen::Index a = 0; a < d; ++a) {
      const double wa = w * points(a, j);
      first(a) += wa;
      for (Eigen::Index b = a; b < d; ++b) second(a, b) += wa * points(b, j);
    }
  }
}

inline void symmetrize(Mat& second) {
  for (Eigen::Index a = 0; a < second.rows(); ++a) {
    for (Eigen::Index b = 0; b < a; ++b) second(a, b) = second(b, a);
  }
}

}  // namespace

namespace serial {

Mat act(const Mat& lorentz, const Mat& points) {
  Mat out(points.rows(), points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) act_column(lorentz, points, out, j);
  return out;
}

Moments moments(const Mat& points, const Vec& weights) {
  const Eigen::Index d = points.rows();
  Moments m{Vec::Zero(d), Mat::Zero(d, d)};
  accumulate(points, weights, 0, points.cols(), m.first, m.second);
  symmetrize(m.second);
  return m;
}

}  // namespace serial

namespace parallel {

Mat act(const Mat& lorentz, const Mat& points) {
  Mat out(points.rows(), points.cols());
  const Eigen::Index n = points.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) act_column(lorentz, points, out, j);
  return out;
}

Moments moments(const Mat& points, const Vec& weights) {
  const Eigen::Index d = points.rows();
  const Eigen::Index n = points.cols();
  const Eigen::Index chunk = static_cast<Eigen::Index>(kChunk);
  const Eigen::Index chunks = (n + chunk - 1) / chunk;
  std::vector<Vec> firsts(chunks, Vec::Zero(d));
  std::vector<Mat> seconds(chunks, Mat::Zero(d, d));
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * chunk;
    const Eigen::Index end = std::min(n, begin + chunk);
    accumulate(points, weights, begin, end, firsts[c], seconds[c]);
  }
  Moments m{Vec::Zero(d), Mat::Zero(d, d)};
  for (Eigen::Index c = 0; c < chunks; ++c) {
    m.first += firsts[c];
    m.second += seconds[c];
  }
  symmetrize(m.second);
  return m;
}

}  // namespace parallel

Mat act(const Mat& lorentz, const Mat& points) {
  if (static_cast<std::size_t>(points.cols()) >= kParallelThreshold) {
    return parallel::act(lorentz, points);
  }
  return serial::act(lorentz, points);
}

Moments moments(const Mat& points, const Vec& weights) {
  if (static_cast<std::size_t>(points.cols()) >= kParallelThreshold) {
    return parallel::moments(points, weights);
  }
  return serial::moments(points, weights);
}

}  // namespace snake::kernels
