#pragma once

// Finite spectral truncation of the evolution problem: the generator enters
// only through its eigenvalue vector, the control operator as a dense matrix,
// and the target subspace as a coordinate selection.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracctl/mittag.hpp"

namespace fracctl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SpectralModel {
  double q = 1.0;            // fractional order, (1/2, 1]
  double b = 1.0;            // horizon
  VectorXd lambda;           // generator eigenvalues, all >= 0
  MatrixXd Bmat;             // control operator, N x M
  std::vector<int> pi_set;   // 1-based mode indices spanning the target subspace
  VectorXd y0;               // initial datum, length N
  VectorXd yb;               // target in the projected coordinates, length P

  int N() const { return static_cast<int>(lambda.size()); }
  int M() const { return static_cast<int>(Bmat.cols()); }
  int P() const { return static_cast<int>(pi_set.size()); }

  void validate() const {
    if (!(q > 0.5) || !(q <= 1.0))
      throw std::invalid_argument("model: q must lie in (1/2, 1]");
    if (!(b > 0.0) || !std::isfinite(b))
      throw std::invalid_argument("model: horizon b must be finite and > 0");
    if (lambda.size() < 1) throw std::invalid_argument("model: N >= 1 required");
    for (int k = 0; k < lambda.size(); ++k)
      if (!(lambda[k] >= 0.0) || !std::isfinite(lambda[k]))
        throw std::invalid_argument("model: eigenvalues must be finite and >= 0");
    if (Bmat.rows() != lambda.size() || Bmat.cols() < 1)
      throw std::invalid_argument("model: B must be N x M with M >= 1");
    if (pi_set.empty())
      throw std::invalid_argument("model: pi_set must be nonempty");
    int prev = 0;
    for (int idx : pi_set) {
      if (idx <= prev || idx > N())
        throw std::invalid_argument(
            "model: pi_set must be strictly increasing within 1..N");
      prev = idx;
    }
    if (y0.size() != lambda.size())
      throw std::invalid_argument("model: y0 must have length N");
    if (yb.size() != static_cast<long>(pi_set.size()))
      throw std::invalid_argument("model: yb must have length |pi_set|");
  }

  // coordinate selection onto the target subspace
  VectorXd project(const VectorXd& v) const {
    VectorXd w(P());
    for (int i = 0; i < P(); ++i) w[i] = v[pi_set[i] - 1];
    return w;
  }

  // zero-padded adjoint of the projection
  VectorXd lift(const VectorXd& w) const {
    VectorXd v = VectorXd::Zero(N());
    for (int i = 0; i < P(); ++i) v[pi_set[i] - 1] = w[i];
    return v;
  }
};

/// Fractional solution operator S_q(t): componentwise E_{q,1}(-lambda_k t^q).
inline VectorXd apply_sq(const SpectralModel& m, double t, const VectorXd& v) {
  if (!(t >= 0.0) || !(t <= m.b))
    throw std::domain_error("apply_sq: t must lie in [0, b]");
  double tq = std::pow(t, m.q);
  VectorXd out(v.size());
  for (int k = 0; k < v.size(); ++k)
    out[k] = ml(m.q, 1.0, -m.lambda[k] * tq) * v[k];
  return out;
}

/// Classical semigroup S(tau): componentwise exp(-lambda_k tau).
inline VectorXd apply_s_classical(const SpectralModel& m, double tau,
                                  const VectorXd& v) {
  if (!(tau >= 0.0))
    throw std::domain_error("apply_s_classical: tau must be >= 0");
  VectorXd out(v.size());
  for (int k = 0; k < v.size(); ++k) out[k] = std::exp(-m.lambda[k] * tau) * v[k];
  return out;
}

/// Time-gridded spectral coordinates of a candidate trajectory.
struct Trajectory {
  VectorXd grid;    // strictly increasing, grid[0] = 0, grid[T] = b
  MatrixXd values;  // N x (T+1)

  int steps() const { return static_cast<int>(grid.size()) - 1; }

  static VectorXd uniform_grid(double b, int T) {
    VectorXd g(T + 1);
    for (int i = 0; i <= T; ++i) g[i] = b * i / T;
    g[0] = 0.0;
    g[T] = b;
    return g;
  }

  static Trajectory constant(double b, int T, const VectorXd& v) {
    Trajectory z;
    z.grid = uniform_grid(b, T);
    z.values = v * Eigen::RowVectorXd::Ones(T + 1);
    return z;
  }

  // piecewise-linear evaluation
  VectorXd at(double t) const {
    const int T = steps();
    if (t <= grid[0]) {
      if (t < grid[0] - 1e-12 * (grid[T] - grid[0]))
        throw std::domain_error("Trajectory::at: t below grid");
      return values.col(0);
    }
    if (t >= grid[T]) {
      if (t > grid[T] + 1e-12 * (grid[T] - grid[0]))
        throw std::domain_error("Trajectory::at: t above grid");
      return values.col(T);
    }
    int lo = 0, hi = T;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (grid[mid] <= t ? lo : hi) = mid;
    }
    if (t == grid[lo]) return values.col(lo);
    double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
    return (1.0 - w) * values.col(lo) + w * values.col(hi);
  }
};

/// sup over the grid of the euclidean coordinate norm of the difference
inline double sup_distance(const Trajectory& a, const Trajectory& b) {
  if (a.grid.size() != b.grid.size())
    throw std::invalid_argument("sup_distance: incompatible grids");
  double d = 0.0;
  for (int i = 0; i < a.grid.size(); ++i)
    d = std::max(d, (a.values.col(i) - b.values.col(i)).norm());
  return d;
}

inline double sup_norm(const Trajectory& a) {
  double d = 0.0;
  for (int i = 0; i < a.grid.size(); ++i)
    d = std::max(d, a.values.col(i).norm());
  return d;
}

/// One sampling point of the nonlocal term, weight c applied to z(t).
struct NonlocalPoint {
  double t = 0.0;
  MatrixXd c;  // N x N
};

/// Nonlocal map g(z) = sum_k c_k z(t_k), defined by values on [delta, b] only.
struct NonlocalSpec {
  double delta = 0.0;
  std::vector<NonlocalPoint> points;

  void validate(int N, double b) const {
    if (!points.empty()) {
      if (!(delta > 0.0) || !(delta < b))
        throw std::invalid_argument("nonlocal: delta must lie in (0, b)");
    }
    for (const auto& p : points) {
      if (p.t < delta)
        throw std::domain_error("nonlocal: sampling time below delta");
      if (p.t > b) throw std::domain_error("nonlocal: sampling time above b");
      if (p.c.rows() != N || p.c.cols() != N)
        throw std::invalid_argument("nonlocal: weight must be N x N");
    }
  }

  // sum of spectral norms of the weights; Lipschitz constant of g
  double weight_norm_sum() const {
    double s = 0.0;
    for (const auto& p : points)
      s += p.c.jacobiSvd().singularValues()(0);
    return s;
  }

  bool empty() const { return points.empty(); }

  static NonlocalPoint scalar_point(double t, double c, int N) {
    return NonlocalPoint{t, c * MatrixXd::Identity(N, N)};
  }
};

inline VectorXd eval_g(const NonlocalSpec& g, const Trajectory& z) {
  const int N = static_cast<int>(z.values.rows());
  VectorXd out = VectorXd::Zero(N);
  const double b = z.grid[z.grid.size() - 1];
  for (const auto& p : g.points) {
    if (p.t < g.delta) throw std::domain_error("eval_g: sampling time below delta");
    if (p.t > b) throw std::domain_error("eval_g: sampling time above b");
    out += p.c * z.at(p.t);
  }
  return out;
}

/// Bounded nonlinearity with its bound function.
struct NonlinearitySpec {
  std::function<VectorXd(double, const VectorXd&)> eval;
  std::function<double(double)> bound_fn;
  std::string kind = "custom";
  bool is_zero = false;

  static NonlinearitySpec zero(int N) {
    NonlinearitySpec f;
    f.eval = [N](double, const VectorXd&) { return VectorXd::Zero(N); };
    f.bound_fn = [](double) { return 0.0; };
    f.kind = "zero";
    f.is_zero = true;
    return f;
  }
};

/// (M_S, M_B): semigroup bound (1 for a nonnegative spectrum) and the
/// spectral norm of the control operator.
inline std::pair<double, double> operator_norms(const SpectralModel& m) {
  double mb = m.Bmat.jacobiSvd().singularValues()(0);
  return {1.0, mb};
}

}  // namespace fracctl
