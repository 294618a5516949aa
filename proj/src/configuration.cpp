#include "snake/configuration.hpp"

#include "snake/kernels.hpp"
#include "snake/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace snake {

Partition::Partition(std::vector<double> breakpoints) : breaks_(std::move(breakpoints)) {
  if (breaks_.size() < 2) {
    throw PreconditionError("partition", "partition needs at least the endpoints 0 and L");
  }
  if (breaks_.front() != 0.0) throw PreconditionError("partition", "partition must start at 0");
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > breaks_[i - 1]) || !std::isfinite(breaks_[i])) {
      throw PreconditionError("partition", "breakpoints must be strictly increasing");
    }
  }
}

Partition Partition::uniform(double length, int pieces) {
  if (pieces < 1 || !(length > 0.0)) {
    throw PreconditionError("partition", "uniform partition needs L > 0 and N >= 1");
  }
  std::vector<double> b(pieces + 1);
  for (int i = 0; i <= pieces; ++i) b[i] = length * i / pieces;
  b.back() = length;
  return Partition(std::move(b));
}

std::size_t Partition::locate(double s) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
  const std::ptrdiff_t idx = (it - breaks_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, size() - 1));
}

// ---------------------------------------------------------------------------

Configuration Configuration::piecewise_constant(const Partition& partition,
                                                const std::vector<Vec>& values) {
  if (values.size() != partition.size()) {
    throw PreconditionError("shape", "one value per partition interval required");
  }
  Builder b(static_cast<int>(values.front().size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    b.constant(partition.end(i) - partition.begin(i), values[i]);
  }
  Configuration z = b.build();
  // Keep the caller's breakpoints bit-exact (cumulative sums may round).
  z.partition_ = partition;
  for (std::size_t i = 0; i < values.size(); ++i) {
    z.params_(static_cast<Eigen::Index>(i)) = 0.5 * (partition.begin(i) + partition.end(i));
  }
  return z;
}

bool Configuration::is_piecewise_constant() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const PieceLayout& p) { return p.kind == PieceKind::constant; });
}

Vec Configuration::value_at(double s) const {
  const std::size_t i = partition_.locate(s);
  const PieceLayout& piece = pieces_[i];
  if (piece.kind == PieceKind::constant) return nodes_.col(piece.first);

  const double a = partition_.begin(i);
  const double b = partition_.end(i);
  const double h = (b - a) / piece.subintervals;
  const int k = std::clamp(static_cast<int>((s - a) / h), 0, piece.subintervals - 1);
  const double x = 2.0 * (s - (a + k * h)) / h - 1.0;
  const GaussRule& rule = gauss_legendre(kGaussOrder);
  const std::vector<double> lw = lagrange_weights(rule.nodes, x);
  Vec v = Vec::Zero(dim());
  const Eigen::Index base = piece.first + static_cast<Eigen::Index>(k) * kGaussOrder;
  for (int j = 0; j < kGaussOrder; ++j) v += lw[j] * nodes_.col(base + j);
  return v / v.norm();
}

Configuration Configuration::with_nodes(Mat nodes) const {
  if (nodes.rows() != nodes_.rows() || nodes.cols() != nodes_.cols()) {
    throw PreconditionError("shape", "node matrix does not match the configuration layout");
  }
  Configuration z = *this;
  for (Eigen::Index j = 0; j < nodes.cols(); ++j) nodes.col(j).normalize();
  z.nodes_ = std::move(nodes);
  return z;
}

Configuration::Builder& Configuration::Builder::constant(double length, const Vec& value) {
  if (!(length > 0.0)) throw PreconditionError("partition", "piece length must be positive");
  if (value.size() != dim_) throw PreconditionError("dimension", "value has wrong dimension");
  specs_.push_back(Spec{PieceKind::constant, length, SpherePoint(value).coords(), {}, 0});
  return *this;
}

Configuration::Builder& Configuration::Builder::sampled(double length, PieceFunction fn,
                                                        int min_subintervals) {
  if (!(length > 0.0)) throw PreconditionError("partition", "piece length must be positive");
  if (!fn) throw PreconditionError("piece_function", "sampled piece needs a function");
  specs_.push_back(Spec{PieceKind::sampled, length, Vec(), std::move(fn),
                        std::max(1, min_subintervals)});
  return *this;
}

namespace {

struct SampledGrid {
  Mat nodes;
  Vec weights;
  Vec params;
  int subintervals;
};

SampledGrid sample_piece(const PieceFunction& fn, double a, double b, int subintervals, int d) {
  const GaussRule& rule = gauss_legendre(kGaussOrder);
  const Eigen::Index n = static_cast<Eigen::Index>(subintervals) * kGaussOrder;
  SampledGrid g{Mat(d, n), Vec(n), Vec(n), subintervals};
  const double h = (b - a) / subintervals;
  for (int k = 0; k < subintervals; ++k) {
    const double lo = a + k * h;
    for (int j = 0; j < kGaussOrder; ++j) {
      const Eigen::Index c = static_cast<Eigen::Index>(k) * kGaussOrder + j;
      const double s = lo + 0.5 * h * (rule.nodes[j] + 1.0);
      const Vec v = fn(s);
      if (v.size() != d) throw PreconditionError("dimension", "piece function has wrong dimension");
      g.nodes.col(c) = SpherePoint(v).coords();
      g.weights(c) = 0.5 * h * rule.weights[j];
      g.params(c) = s;
    }
  }
  return g;
}

double moment_change(const SampledGrid& coarse, const SampledGrid& fine) {
  const kernels::Moments a = kernels::serial::moments(coarse.nodes, coarse.weights);
  const kernels::Moments b = kernels::serial::moments(fine.nodes, fine.weights);
  return std::max((a.first - b.first).cwiseAbs().maxCoeff(),
                  (a.second - b.second).cwiseAbs().maxCoeff());
}

}  // namespace

Configuration Configuration::Builder::build() const {
  if (specs_.empty()) throw PreconditionError("partition", "configuration needs a piece");
  std::vector<double> breaks{0.0};
  std::vector<SampledGrid> grids;
  Eigen::Index total = 0;
  for (const Spec& spec : specs_) {
    const double a = breaks.back();
    const double b = a + spec.length;
    breaks.push_back(b);
    if (spec.kind == PieceKind::constant) {
      SampledGrid g{spec.value, Vec::Constant(1, spec.length), Vec::Constant(1, 0.5 * (a + b)), 0};
      grids.push_back(std::move(g));
    } else {
      int m = spec.min_subintervals;
      SampledGrid coarse = sample_piece(spec.fn, a, b, m, dim_);
      for (;;) {
        SampledGrid fine = sample_piece(spec.fn, a, b, 2 * m, dim_);
        const double change = moment_change(coarse, fine);
        coarse = std::move(fine);
        m *= 2;
        if (change < settings().quadrature_tolerance * std::max(1.0, spec.length) || m >= 4096) {
          break;
        }
      }
      grids.push_back(std::move(coarse));
    }
    total += grids.back().nodes.cols();
  }

  Configuration z;
  z.partition_ = Partition(std::move(breaks));
  z.nodes_.resize(dim_, total);
  z.weights_.resize(total);
  z.params_.resize(total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const SampledGrid& g = grids[i];
    const Eigen::Index n = g.nodes.cols();
    z.nodes_.middleCols(at, n) = g.nodes;
    z.weights_.segment(at, n) = g.weights;
    z.params_.segment(at, n) = g.params;
    z.pieces_.push_back(PieceLayout{specs_[i].kind, at, n, g.subintervals});
    at += n;
  }
  return z;
}

// ---------------------------------------------------------------------------

double GramDefectMatrix::smallest_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Vec endpoint(const Configuration& z) {
  return kernels::moments(z.nodes(), z.weights()).first;
}

SnakePolyline integrate_snake(const Configuration& z, int samples) {
  if (samples < 2) throw PreconditionError("samples", "snake polyline needs at least 2 samples");
  const Partition& part = z.partition();
  const double length = z.length();
  const GaussRule& rule = gauss_legendre(kGaussOrder);
  const int d = z.dim();

  // Integral of z from the start of piece i to s inside piece i.
  auto partial = [&](std::size_t i, double s) -> Vec {
    const PieceLayout& piece = z.pieces()[i];
    const double a = part.begin(i);
    if (piece.kind == PieceKind::constant) return (s - a) * z.nodes().col(piece.first);
    const double h = (part.end(i) - a) / piece.subintervals;
    Vec acc = Vec::Zero(d);
    const int full = std::min(piece.subintervals, static_cast<int>((s - a) / h));
    for (int k = 0; k < full; ++k) {
      for (int j = 0; j < kGaussOrder; ++j) {
        const Eigen::Index c = piece.first + static_cast<Eigen::Index>(k) * kGaussOrder + j;
        acc += z.weights()(c) * z.nodes().col(c);
      }
    }
    if (full == piece.subintervals) return acc;
    const double lo = a + full * h;
    const double span = s - lo;
    if (span <= 0.0) return acc;
    const Eigen::Index base = piece.first + static_cast<Eigen::Index>(full) * kGaussOrder;
    for (int q = 0; q < kGaussOrder; ++q) {
      // Map the q-th Gauss node of [lo, s] into the local coordinate of [lo, lo + h].
      const double s_q = lo + 0.5 * span * (rule.nodes[q] + 1.0);
      const double x = 2.0 * (s_q - lo) / h - 1.0;
      const std::vector<double> lw = lagrange_weights(rule.nodes, x);
      Vec v = Vec::Zero(d);
      for (int j = 0; j < kGaussOrder; ++j) v += lw[j] * z.nodes().col(base + j);
      acc += 0.5 * span * rule.weights[q] * v;
    }
    return acc;
  };

  SnakePolyline line;
  line.s.reserve(samples);
  line.points.reserve(samples);
  Vec before = Vec::Zero(d);  // integral over completed pieces
  std::size_t piece = 0;
  for (int j = 0; j < samples; ++j) {
    const double s = (j == samples - 1) ? length : length * j / (samples - 1);
    while (piece + 1 < part.size() && s >= part.end(piece)) {
      before += partial(piece, part.end(piece));
      ++piece;
    }
    line.s.push_back(s);
    line.points.push_back(before + partial(piece, std::min(s, part.end(piece))));
  }
  line.points.front().setZero();
  return line;
}

GramDefectMatrix gram_defect(const Configuration& z) {
  const kernels::Moments m = kernels::moments(z.nodes(), z.weights());
  const double length = z.length();
  Mat defect = length * Mat::Identity(z.dim(), z.dim()) - m.second;
  return GramDefectMatrix(std::move(defect), length);
}

bool is_lined(const Configuration& z, double tol) {
  const Mat& n = z.nodes();
  const Vec p = n.col(0);
  for (Eigen::Index j = 1; j < n.cols(); ++j) {
    const double dist = std::min((n.col(j) - p).norm(), (n.col(j) + p).norm());
    if (dist > tol) return false;
  }
  return true;
}

namespace {

// Greedy clustering at chordal tolerance `tol`. Sorting by the first
// coordinate bounds the comparisons to a sliding window.
std::vector<int> cluster_labels_sorted(const Mat& pts, std::vector<Eigen::Index>& order,
                                       double tol, int* count) {
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return pts(0, a) < pts(0, b); });
  std::vector<int> label(order.size(), -1);
  int clusters = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = clusters;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (pts(0, order[j]) - pts(0, order[i]) > tol) break;
      if (label[j] < 0 && (pts.col(order[j]) - pts.col(order[i])).norm() <= tol) {
        label[j] = clusters;
      }
    }
    ++clusters;
  }
  if (count) *count = clusters;
  return label;
}

}  // namespace

double sedentariness(const Configuration& z) {
  std::vector<Eigen::Index> cols;
  for (const PieceLayout& p : z.pieces()) {
    if (p.kind == PieceKind::constant) cols.push_back(p.first);
  }
  if (cols.empty()) return 0.0;
  int count = 0;
  const std::vector<int> label =
      cluster_labels_sorted(z.nodes(), cols, settings().cluster_tolerance, &count);
  std::vector<double> mass(count, 0.0);
  for (std::size_t i = 0; i < cols.size(); ++i) mass[label[i]] += z.weights()(cols[i]);
  return *std::max_element(mass.begin(), mass.end());
}

int distinct_value_count(const Configuration& z, int cap) {
  std::vector<Eigen::Index> cols(z.nodes().cols());
  std::iota(cols.begin(), cols.end(), 0);
  int count = 0;
  cluster_labels_sorted(z.nodes(), cols, settings().cluster_tolerance, &count);
  return std::min(count, cap);
}

int spherical_dimension(const Configuration& z, double tol) {
  const Mat& pts = z.nodes();
  const Vec mean = pts.rowwise().mean();
  const Mat centered = (pts.colwise() - mean) / std::sqrt(static_cast<double>(pts.cols()));
  // Singular values, not covariance eigenvalues: sqrt(rounding noise) ~ 1e-8.
  Eigen::JacobiSVD<Mat> svd(centered);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) ++rank;
  }
  return std::max(0, rank - 1);
}

Configuration act(const MobiusElement& g, const Configuration& z) {
  if (g.dim() != z.dim()) throw PreconditionError("dimension", "group and configuration dimensions differ");
  return z.with_nodes(kernels::act(g.matrix(), z.nodes()));
}

double sup_distance(const Configuration& a, const Configuration& b) {
  if (!(a.partition() == b.partition()) || a.nodes().cols() != b.nodes().cols() ||
      a.dim() != b.dim()) {
    throw PreconditionError("partition_mismatch", "configurations do not share a partition");
  }
  return (a.nodes() - b.nodes()).colwise().norm().maxCoeff();
}

double periodicity_defect(const Configuration& z, double period) {
  const double length = z.length();
  if (!(period > 0.0) || period >= length) return 0.0;
  // Atoms of the partition refined by the shifted breakpoints, probed inside.
  std::vector<double> cuts;
  for (double b : z.partition().breakpoints()) {
    if (b <= length - period) cuts.push_back(b);
    if (b - period >= 0.0) cuts.push_back(b - period);
  }
  cuts.push_back(length - period);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double worst = 0.0;
  constexpr int kProbes = 16;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi - lo <= 1e-12 * length) continue;
    for (int k = 0; k < kProbes; ++k) {
      const double s = lo + (hi - lo) * (k + 0.5) / kProbes;
      worst = std::max(worst, (z.value_at(s) - z.value_at(s + period)).norm());
    }
  }
  return worst;
}

Configuration half_circle_configuration() {
  return Configuration::Builder(2)
      .sampled(std::numbers::pi,
               [](double s) {
                 Vec v(2);
                 v << std::sin(s), std::cos(s);
                 return v;
               })
      .build();
}

}  // namespace snake
