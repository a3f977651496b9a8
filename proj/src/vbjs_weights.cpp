#include "vbjs/vbjs_weights.hpp"

#include <cmath>
#include <ostream>

#include "vbjs/csv.hpp"

namespace vbjs {

double minmod(const Eigen::Ref<const Vector>& a) {
  if (a.size() == 0) return 0.0;
  const double s = (a(0) > 0) - (a(0) < 0);
  if (s == 0.0) return 0.0;
  double m = std::abs(a(0));
  for (Eigen::Index j = 1; j < a.size(); ++j) {
    if (((a(j) > 0) - (a(j) < 0)) != s) return 0.0;
    m = std::min(m, std::abs(a(j)));
  }
  return s * m;
}

Vector build_S(const Matrix& P) {
  require_dim(P.cols() >= 1, "joint sparsity matrix needs J >= 1");
  Vector S(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) S(i) = minmod(P.row(i).transpose());
  return S;
}

Vector variance_vector(const Matrix& P) {
  require_dim(P.cols() >= 1, "joint sparsity matrix needs J >= 1");
  const double J = static_cast<double>(P.cols());
  Vector v(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    // two-pass form; a constant row is exactly zero rather than roundoff
    const auto row = P.row(i).array();
    if ((row == row(0)).all()) {
      v(i) = 0.0;
      continue;
    }
    const double mean = row.sum() / J;
    v(i) = (row - mean).square().sum() / J;
  }
  return v;
}

std::vector<int> WeightVector::detected() const {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < T.size(); ++i) {
    if (!degenerate && T(i) >= tau) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

WeightVector build_weights(const Matrix& P, double tau, WeightRule rule) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("weight threshold tau must lie in (0, 1)");
  WeightVector wv;
  wv.tau = tau;
  wv.rule = rule;
  wv.S = build_S(P);
  wv.v = variance_vector(P);
  const Vector a = wv.S.cwiseProduct(wv.v).cwiseAbs();
  const Eigen::Index n = P.rows();
  const double amax = n ? a.maxCoeff() : 0.0;
  if (amax == 0.0) {
    wv.degenerate = true;
    wv.T = Vector::Zero(n);
    wv.w = Vector::Ones(n);
    wv.c = 0;
    return wv;
  }
  wv.T = a / amax;
  wv.c = static_cast<int>((wv.T.array() >= tau).count());
  wv.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool hit = wv.T(i) >= tau;
    if (rule == WeightRule::Literal) {
      wv.w(i) = hit ? wv.c : 1.0 - wv.T(i);
    } else {
      wv.w(i) = hit ? 1.0 - wv.T(i) : wv.c;
    }
  }
  return wv;
}

Vector build_mask(const Vector& w, double tau_tilde) {
  return (w.array() >= tau_tilde).cast<double>().matrix();
}

Matrix combine_2d(const Matrix& wx, const Matrix& wy) {
  require_dim(wx.rows() == wy.rows() && wx.cols() == wy.cols(), "combine_2d: shape mismatch");
  return wx.cwiseMin(wy);
}

int select_best(const std::vector<Vector>& edges) {
  if (edges.empty()) throw InvalidArgument("select_best needs at least one vector");
  const std::size_t J = edges.size();
  Matrix D = Matrix::Zero(J, J);
  for (std::size_t i = 0; i < J; ++i) {
    for (std::size_t j = i + 1; j < J; ++j) {
      require_dim(edges[i].size() == edges[j].size(), "select_best: length mismatch");
      D(i, j) = D(j, i) = (edges[i] - edges[j]).norm();
    }
  }
  int best = 0;
  double bs = D.col(0).sum();
  for (std::size_t j = 1; j < J; ++j) {
    const double s = D.col(j).sum();
    if (s < bs) {
      bs = s;
      best = static_cast<int>(j);
    }
  }
  return best;
}

int select_best(const Matrix& P) {
  std::vector<Vector> cols;
  for (Eigen::Index j = 0; j < P.cols(); ++j) cols.emplace_back(P.col(j));
  return select_best(cols);
}

void write_weights_csv(std::ostream& os, const Vector& w) {
  os << "index,value\n";
  for (Eigen::Index i = 0; i < w.size(); ++i) os << i << ',' << csv::fmt(w(i)) << '\n';
}

void write_weights_csv(std::ostream& os, const Matrix& w) {
  os << "i,j,value\n";
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) os << i << ',' << j << ',' << csv::fmt(w(i, j)) << '\n';
  }
}

}  // namespace vbjs
