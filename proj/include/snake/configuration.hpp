#pragma once

// Configurations z: [0, L] -> S^{d-1} and the snakes they integrate to.
//
// Every piece is stored as weighted nodes: a constant piece is one node whose
// weight is the piece length, a sampled piece is a composite Gauss–Legendre
// grid (order 8 per sub-interval). Integrals over z are then weighted sums
// over the node matrix, and the Möbius action maps node columns.

#include "snake/mobius.hpp"

#include <functional>
#include <vector>

namespace snake {

class Partition {
 public:
  /// Breakpoints 0 = s_0 < ... < s_N = L.
  explicit Partition(std::vector<double> breakpoints);
  static Partition uniform(double length, int pieces);

  double length() const { return breaks_.back(); }
  std::size_t size() const { return breaks_.size() - 1; }
  double begin(std::size_t i) const { return breaks_[i]; }
  double end(std::size_t i) const { return breaks_[i + 1]; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  /// Index of the piece containing s (right-continuous; s = L is the last piece).
  std::size_t locate(double s) const;

  bool operator==(const Partition& o) const { return breaks_ == o.breaks_; }

 private:
  std::vector<double> breaks_;
};

enum class PieceKind { constant, sampled };

struct PieceLayout {
  PieceKind kind;
  Eigen::Index first;  // first node column
  Eigen::Index count;  // number of node columns
  int subintervals;    // composite rule sub-intervals (sampled pieces)
};

/// Arc length s -> R^d; normalized onto the sphere when sampled.
using PieceFunction = std::function<Vec(double)>;

class Configuration {
 public:
  class Builder;

  static Configuration piecewise_constant(const Partition& partition,
                                          const std::vector<Vec>& values);

  int dim() const { return static_cast<int>(nodes_.rows()); }
  double length() const { return partition_.length(); }
  const Partition& partition() const { return partition_; }
  const std::vector<PieceLayout>& pieces() const { return pieces_; }

  /// d x n matrix of unit vectors.
  const Mat& nodes() const { return nodes_; }
  const Vec& weights() const { return weights_; }
  /// Arc-length location of each node (midpoint for constant pieces).
  const Vec& params() const { return params_; }

  bool is_piecewise_constant() const;
  Vec value_at(double s) const;

  /// Same partition and node layout, new node values (renormalized).
  Configuration with_nodes(Mat nodes) const;

 private:
  Configuration() = default;

  Partition partition_{std::vector<double>{0.0, 1.0}};
  std::vector<PieceLayout> pieces_;
  Mat nodes_;
  Vec weights_;
  Vec params_;
};

class Configuration::Builder {
 public:
  explicit Builder(int dim) : dim_(dim) {}

  Builder& constant(double length, const Vec& value);
  /// `fn` receives absolute arc length. Sub-intervals are doubled from
  /// `min_subintervals` until two successive moment estimates agree to
  /// settings().quadrature_tolerance.
  Builder& sampled(double length, PieceFunction fn, int min_subintervals = 8);

  Configuration build() const;

 private:
  struct Spec {
    PieceKind kind;
    double length;
    Vec value;
    PieceFunction fn;
    int min_subintervals;
  };
  int dim_;
  std::vector<Spec> specs_;
};

struct SnakePolyline {
  std::vector<double> s;
  std::vector<Vec> points;
};

/// M(z) = L I - G with G the Gram matrix of the coordinate functions.
class GramDefectMatrix {
 public:
  GramDefectMatrix(Mat m, double length) : m_(std::move(m)), length_(length) {}
  const Mat& matrix() const { return m_; }
  double length() const { return length_; }
  double smallest_eigenvalue() const;

 private:
  Mat m_;
  double length_;
};

/// f(z) = integral of z over [0, L].
Vec endpoint(const Configuration& z);
SnakePolyline integrate_snake(const Configuration& z, int samples);
GramDefectMatrix gram_defect(const Configuration& z);
/// All values within `tol` (chordal) of {p, -p} for some p.
bool is_lined(const Configuration& z, double tol);
/// Largest total length carried by one value; only constant pieces count.
double sedentariness(const Configuration& z);
/// Dimension of the smallest sub-sphere containing the values of z.
int spherical_dimension(const Configuration& z, double tol);
/// Number of distinct values (clustered), counting stops at `cap`.
int distinct_value_count(const Configuration& z, int cap);
Configuration act(const MobiusElement& g, const Configuration& z);
/// Max chordal distance over the shared node grid.
double sup_distance(const Configuration& a, const Configuration& b);
/// Max |z(s) - z(s + T)| over a probe grid of s with s, s + T in [0, L].
double periodicity_defect(const Configuration& z, double period);

/// Partition of [0, pi] with z(s) = (sin s, cos s): the half-circle snake.
Configuration half_circle_configuration();

}  // namespace snake
