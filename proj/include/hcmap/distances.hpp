#pragma once

// Pairwise dissimilarities between time series under the two competing
// hypotheses: dependence only (correlation of increments) and dependence
// plus marginal distribution (correlation blended with a binned Hellinger
// distance between increment histograms).
//
// Every routine is templated on the scalar type and operates on row-major
// Eigen matrices whose rows are the series.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hcmap/error.hpp"

namespace hcmap {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// n series of T observations each; row i belongs to ids[i].
template <typename Scalar>
struct BasicTimeSeriesSet {
  std::vector<std::string> ids;
  Matrix<Scalar> values;

  Index size() const { return values.rows(); }
  Index length() const { return values.cols(); }

  void validate() const {
    if (static_cast<Index>(ids.size()) != values.rows())
      throw Error(Errc::ShapeMismatch, "series: " + std::to_string(ids.size()) +
                                           " ids for " + std::to_string(values.rows()) + " rows");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
      if (!seen.insert(id).second) throw Error(Errc::DuplicateIds, "series: duplicate id '" + id + "'");
  }

  friend bool operator==(const BasicTimeSeriesSet& a, const BasicTimeSeriesSet& b) {
    return a.ids == b.ids && a.values.rows() == b.values.rows() &&
           a.values.cols() == b.values.cols() && (a.values.array() == b.values.array()).all();
  }
};

/// Symmetric, zero-diagonal, non-negative dissimilarities; d(i, j) is the
/// distance between ids[i] and ids[j].
template <typename Scalar>
struct BasicDistanceMatrix {
  std::vector<std::string> ids;
  Matrix<Scalar> d;

  Index size() const { return d.rows(); }

  void validate() const {
    if (d.rows() != d.cols())
      throw Error(Errc::NotSquare, "distance matrix is " + std::to_string(d.rows()) + "x" +
                                       std::to_string(d.cols()));
    if (static_cast<Index>(ids.size()) != d.rows())
      throw Error(Errc::ShapeMismatch, "distance matrix: " + std::to_string(ids.size()) +
                                           " ids for " + std::to_string(d.rows()) + " rows");
    for (Index i = 0; i < d.rows(); ++i) {
      if (d(i, i) != Scalar(0))
        throw Error(Errc::NonzeroDiagonal, "distance matrix: nonzero diagonal at '" + ids[i] + "'");
      for (Index j = i + 1; j < d.cols(); ++j) {
        if (d(i, j) != d(j, i))
          throw Error(Errc::AsymmetryBeyondTolerance,
                      "distance matrix: asymmetric entry (" + ids[i] + ", " + ids[j] + ")");
        if (!(d(i, j) >= Scalar(0)))
          throw Error(Errc::NegativeDistance,
                      "distance matrix: negative or NaN entry (" + ids[i] + ", " + ids[j] + ")");
      }
    }
  }

  friend bool operator==(const BasicDistanceMatrix& a, const BasicDistanceMatrix& b) {
    return a.ids == b.ids && a.d.rows() == b.d.rows() && a.d.cols() == b.d.cols() &&
           (a.d.array() == b.d.array()).all();
  }
};

using TimeSeriesSet = BasicTimeSeriesSet<double>;
using DistanceMatrix = BasicDistanceMatrix<double>;

enum class CorrelationMethod { Pearson, Spearman };
enum class Hypothesis { CorrelationOnly, CorrelationPlusDistribution };

struct HypothesisSpec {
  Hypothesis kind = Hypothesis::CorrelationOnly;
  double theta = 0.5;
  CorrelationMethod corr_method = CorrelationMethod::Spearman;
  /// Histogram bins; unset means default_bins(T).
  std::optional<int> bins;

  void validate() const {
    if (!(theta >= 0.0 && theta <= 1.0))
      throw Error(Errc::ThetaOutOfRange, "theta must lie in [0, 1], got " + std::to_string(theta));
    if (bins && *bins < 2)
      throw Error(Errc::InvalidArgument, "bins must be >= 2, got " + std::to_string(*bins));
  }
};

/// ceil(sqrt(T - 1)) for series of T observations, never below 2.
inline int default_bins(Index length) {
  const double increments = static_cast<double>(std::max<Index>(length - 1, 1));
  return std::max(2, static_cast<int>(std::ceil(std::sqrt(increments))));
}

template <typename Scalar>
BasicTimeSeriesSet<Scalar> increments(const BasicTimeSeriesSet<Scalar>& series) {
  if (series.length() < 2)
    throw Error(Errc::SeriesTooShort,
                "series need at least 2 observations, got " + std::to_string(series.length()));
  const Index steps = series.length() - 1;
  BasicTimeSeriesSet<Scalar> out;
  out.ids = series.ids;
  out.values = series.values.rightCols(steps) - series.values.leftCols(steps);
  return out;
}

/// Average ranks (1-based), ties share the mean of their positions.
template <typename Derived>
RowVector<typename Derived::Scalar> average_ranks(const Eigen::DenseBase<Derived>& row) {
  using Scalar = typename Derived::Scalar;
  const Index len = row.size();
  std::vector<Index> order(static_cast<std::size_t>(len));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return row(a) < row(b); });
  RowVector<Scalar> ranks(len);
  for (Index start = 0; start < len;) {
    Index stop = start + 1;
    while (stop < len && row(order[stop]) == row(order[start])) ++stop;
    const Scalar rank = Scalar(start + stop + 1) / Scalar(2);
    for (Index k = start; k < stop; ++k) ranks(order[k]) = rank;
    start = stop;
  }
  return ranks;
}

/// Correlation matrix of the rows. Throws DegenerateSeries for a constant row.
template <typename Derived>
Matrix<typename Derived::Scalar> correlation_matrix(const Eigen::MatrixBase<Derived>& rows,
                                                    CorrelationMethod method,
                                                    const std::vector<std::string>& ids = {}) {
  using Scalar = typename Derived::Scalar;
  const Index n = rows.rows();
  Matrix<Scalar> z(n, rows.cols());
  for (Index i = 0; i < n; ++i) {
    if (rows.row(i).size() == 0 || rows.row(i).maxCoeff() == rows.row(i).minCoeff()) {
      const std::string who = i < static_cast<Index>(ids.size()) ? ids[i] : std::to_string(i);
      throw Error(Errc::DegenerateSeries, "series '" + who + "' has constant increments");
    }
    if (method == CorrelationMethod::Spearman)
      z.row(i) = average_ranks(rows.row(i));
    else
      z.row(i) = rows.row(i);
  }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> means = z.rowwise().mean();
  z.colwise() -= means;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> norms = z.rowwise().norm();
  z.array().colwise() /= norms.array();

  Matrix<Scalar> rho(n, n);
  for (Index i = 0; i < n; ++i) {
    rho(i, i) = Scalar(1);
    for (Index j = i + 1; j < n; ++j) {
      const Scalar r = std::clamp<Scalar>(z.row(i).dot(z.row(j)), Scalar(-1), Scalar(1));
      rho(i, j) = r;
      rho(j, i) = r;
    }
  }
  return rho;
}

/// d = sqrt((1 - rho) / 2) on increments of the level series.
template <typename Scalar>
BasicDistanceMatrix<Scalar> correlation_distance(const BasicTimeSeriesSet<Scalar>& series,
                                                 CorrelationMethod method) {
  const auto inc = increments(series);
  const Matrix<Scalar> rho = correlation_matrix(inc.values, method, inc.ids);
  BasicDistanceMatrix<Scalar> out{series.ids, Matrix<Scalar>::Zero(rho.rows(), rho.cols())};
  for (Index i = 0; i < rho.rows(); ++i)
    for (Index j = i + 1; j < rho.cols(); ++j) {
      const Scalar v = std::sqrt(std::max(Scalar(0), (Scalar(1) - rho(i, j)) / Scalar(2)));
      out.d(i, j) = v;
      out.d(j, i) = v;
    }
  return out;
}

/// sqrt(1/2 * sum_k (sqrt(p_k) - sqrt(q_k))^2) for two probability vectors.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar hellinger(const Eigen::DenseBase<DerivedP>& p,
                                    const Eigen::DenseBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  if (p.size() != q.size()) throw Error(Errc::ShapeMismatch, "hellinger: length mismatch");
  const Scalar sum = (p.derived().array().sqrt() - q.derived().array().sqrt()).square().sum();
  return std::min(Scalar(1), std::sqrt(std::max(Scalar(0), sum / Scalar(2))));
}

/// Hellinger distance between the histograms of two samples, using `bins`
/// uniform bins spanning their pooled [min, max]. Zero when the pooled range
/// is empty.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar histogram_hellinger(const Eigen::DenseBase<DerivedX>& x,
                                              const Eigen::DenseBase<DerivedY>& y, int bins) {
  using Scalar = typename DerivedX::Scalar;
  if (bins < 2) throw Error(Errc::InvalidArgument, "bins must be >= 2");
  if (x.size() == 0 || y.size() == 0) throw Error(Errc::SeriesTooShort, "empty sample");
  const Scalar lo = std::min(x.minCoeff(), y.minCoeff());
  const Scalar hi = std::max(x.maxCoeff(), y.maxCoeff());
  if (!(hi > lo)) return Scalar(0);
  const Scalar width = (hi - lo) / Scalar(bins);

  auto histogram = [&](const auto& sample) {
    RowVector<Scalar> h = RowVector<Scalar>::Zero(bins);
    for (Index k = 0; k < sample.size(); ++k) {
      auto bin = static_cast<Index>(std::floor((sample(k) - lo) / width));
      h(std::clamp<Index>(bin, 0, bins - 1)) += Scalar(1);
    }
    return RowVector<Scalar>(h / Scalar(sample.size()));
  };
  return hellinger(histogram(x), histogram(y));
}

/// Pairwise histogram Hellinger distance between increment distributions.
template <typename Scalar>
BasicDistanceMatrix<Scalar> distribution_distance(const BasicTimeSeriesSet<Scalar>& series,
                                                  int bins) {
  if (bins < 2) throw Error(Errc::InvalidArgument, "bins must be >= 2, got " + std::to_string(bins));
  const auto inc = increments(series);
  const Index n = inc.size();
  BasicDistanceMatrix<Scalar> out{series.ids, Matrix<Scalar>::Zero(n, n)};
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const Scalar v = histogram_hellinger(inc.values.row(i), inc.values.row(j), bins);
      out.d(i, j) = v;
      out.d(j, i) = v;
    }
  return out;
}

/// sqrt(theta * dep^2 + (1 - theta) * dist^2), entrywise.
template <typename Scalar>
BasicDistanceMatrix<Scalar> blended_distance(const BasicDistanceMatrix<Scalar>& dep,
                                             const BasicDistanceMatrix<Scalar>& dist,
                                             Scalar theta) {
  if (dep.ids != dist.ids || dep.d.rows() != dist.d.rows() || dep.d.cols() != dist.d.cols())
    throw Error(Errc::ShapeMismatch, "blended_distance: matrices disagree on ids or shape");
  if (!(theta >= Scalar(0) && theta <= Scalar(1)))
    throw Error(Errc::ThetaOutOfRange, "theta must lie in [0, 1], got " + std::to_string(theta));
  if (theta == Scalar(1)) return dep;
  if (theta == Scalar(0)) return dist;
  BasicDistanceMatrix<Scalar> out{dep.ids, Matrix<Scalar>()};
  out.d = (theta * dep.d.array().square() + (Scalar(1) - theta) * dist.d.array().square()).sqrt();
  return out;
}

/// Distance matrix reflecting one hypothesis over the series.
template <typename Scalar>
BasicDistanceMatrix<Scalar> hypothesis_distance(const BasicTimeSeriesSet<Scalar>& series,
                                                const HypothesisSpec& spec) {
  spec.validate();
  series.validate();
  auto dep = correlation_distance(series, spec.corr_method);
  if (spec.kind == Hypothesis::CorrelationOnly) return dep;
  const int bins = spec.bins.value_or(default_bins(series.length()));
  return blended_distance(dep, distribution_distance(series, bins), static_cast<Scalar>(spec.theta));
}

}  // namespace hcmap
