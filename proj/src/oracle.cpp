#include "l2t/oracle.hpp"

#include <cmath>
#include <functional>

namespace l2t {

namespace {

using PointFunction = std::function<double(std::span<const double>)>;

double grid_mean(int rank, int n, const PointFunction& f) {
  std::vector<double> theta(rank);
  std::vector<int> idx(rank, 0);
  std::int64_t total = 1;
  for (int d = 0; d < rank; ++d) total *= n;
  // Pairwise partial sums per row keep the rounding error flat as n grows.
  double sum = 0.0;
  const double h = 2.0 * M_PI / n;
  std::int64_t count = 0;
  double row = 0.0;
  for (std::int64_t p = 0; p < total; ++p) {
    for (int d = 0; d < rank; ++d) theta[d] = h * (idx[d] + 0.5);
    row += f(theta);
    if (++count == n) {
      sum += row;
      row = 0.0;
      count = 0;
    }
    for (int d = rank - 1; d >= 0; --d) {
      if (++idx[d] < n) break;
      idx[d] = 0;
    }
  }
  return (sum + row) / static_cast<double>(total);
}

std::int64_t points(int rank, std::int64_t n) {
  std::int64_t p = 1;
  for (int d = 0; d < rank; ++d) p *= n;
  return p;
}

// Doubling midpoint means, extrapolated with the fitted ratio of successive differences.
double refine(int rank, const PointFunction& f, const OracleOptions& o, ErrorKind on_fail) {
  if (rank == 0) return f({});
  std::int64_t n = std::max(4, o.start_resolution);
  while (n > 8 && points(rank, 8 * n) > o.max_points) n /= 2;
  std::vector<double> a, r;
  while (points(rank, n) <= o.max_points) {
    a.push_back(grid_mean(rank, static_cast<int>(n), f));
    const std::size_t L = a.size();
    if (L >= 2) {
      const double d = a[L - 1] - a[L - 2];
      if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(a.back()))) return a.back();
    }
    if (L >= 3) {
      const double d1 = a[L - 2] - a[L - 3], d2 = a[L - 1] - a[L - 2];
      const double ratio = d1 != 0.0 ? d2 / d1 : 0.0;
      r.push_back(std::abs(ratio) < 1.0 ? a.back() + d2 * ratio / (1.0 - ratio) : a.back());
      if (r.size() >= 2 && std::abs(ratio) < 1.0 && std::abs(r.back() - r[r.size() - 2]) <= o.tolerance)
        return r.back();
    }
    n *= 2;
  }
  fail(on_fail, "oracle quadrature did not settle within " + std::to_string(o.max_points) + " points");
}

// Orthonormal coordinates: G = L L^*, x -> L^* x.
DenseMatrix upper_factor(const Realization& gram, std::span<const double> theta) {
  const DenseMatrix g = gram.at(theta);
  Eigen::LLT<DenseMatrix> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::NotPositive, "gram is not positive definite");
  return llt.matrixL().adjoint();
}

struct RealizedComplex {
  std::vector<Realization> d, gram;
  std::vector<bool> standard;
  int length = 0;

  explicit RealizedComplex(const CochainComplex& c) : length(c.length()) {
    for (int i = 0; i < c.length(); ++i) {
      gram.emplace_back(c.module(i).gram());
      standard.push_back(c.module(i).standard());
    }
    for (int i = 0; i + 1 < c.length(); ++i) d.emplace_back(c.differential_matrix(i));
  }

  std::vector<DenseMatrix> orthonormal(std::span<const double> theta) const {
    std::vector<DenseMatrix> out;
    for (int i = 0; i + 1 < length; ++i) {
      DenseMatrix m = d[i].at(theta);
      if (!standard[i + 1]) m = upper_factor(gram[i + 1], theta) * m;
      if (!standard[i]) {
        const DenseMatrix w = upper_factor(gram[i], theta);
        m = w.transpose().triangularView<Eigen::Lower>().solve(m.transpose()).transpose();
      }
      out.push_back(std::move(m));
    }
    return out;
  }
};

std::vector<DenseMatrix> laplacians(const std::vector<DenseMatrix>& d, int length) {
  std::vector<DenseMatrix> out;
  for (int i = 0; i < length; ++i) {
    DenseMatrix lap;
    if (i + 1 < length) lap = d[i].adjoint() * d[i];
    if (i >= 1) {
      const DenseMatrix in = d[i - 1] * d[i - 1].adjoint();
      lap = lap.size() ? DenseMatrix(lap + in) : in;
    }
    out.push_back(std::move(lap));
  }
  return out;
}

// Eigenvalues of a Laplacian carry round-off of order eps * top, so the relative cutoff
// applies to them directly rather than squared.
int positive_count(const Eigen::VectorXd& ev, double cutoff) {
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  int n = 0;
  for (Eigen::Index j = 0; j < ev.size(); ++j)
    if (ev[j] > cutoff * top && ev[j] > 0.0) ++n;
  return n;
}

}  // namespace

double torsion_via_laplacian(const CochainComplex& c, const OracleOptions& options) {
  const AlgebraModel& model = c.algebra();
  const int len = c.length();
  if (len == 0) return 0.0;
  const RealizedComplex rc(c);
  const int rank = model.torus_rank();

  // Generic number of positive eigenvalues per degree.
  std::vector<int> counts(len, 0);
  std::vector<std::vector<double>> probes;
  if (rank == 0) {
    probes.push_back({});
  } else {
    for (int s = 0; s < 5; ++s) {
      std::vector<double> t(rank);
      for (int d = 0; d < rank; ++d) t[d] = std::fmod(0.61803398875 * (s + 1) * (d + 2) + 0.377 * d + 0.211, 1.0) * 2 * M_PI;
      probes.push_back(std::move(t));
    }
  }
  for (const auto& t : probes) {
    const auto laps = laplacians(rc.orthonormal(t), len);
    for (int i = 0; i < len; ++i) {
      if (laps[i].size() == 0) continue;
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(laps[i], Eigen::EigenvaluesOnly);
      counts[i] = std::max(counts[i], positive_count(es.eigenvalues(), options.cutoff));
    }
  }

  const PointFunction f = [&](std::span<const double> theta) {
    const auto laps = laplacians(rc.orthonormal(theta), len);
    double acc = 0.0;
    for (int i = 1; i < len; ++i) {
      if (counts[i] == 0) continue;
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(laps[i], Eigen::EigenvaluesOnly);
      const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
      double s = 0.0;
      for (int j = 0; j < counts[i]; ++j) s += std::log(ev[ev.size() - 1 - j]);
      acc += (i % 2 == 1 ? 1.0 : -1.0) * i * s;
    }
    return 0.5 * acc;
  };
  OracleOptions o = options;
  o.tolerance *= model.group_order();
  return refine(rank, f, o, ErrorKind::NotDeterminantClass) / model.group_order();
}

double torsion_via_dense(const CochainComplex& c, const OracleOptions& options) {
  const AlgebraModel& model = c.algebra();
  if (!model.is_finite()) fail(ErrorKind::Unsupported, "dense oracle needs a finite group model");
  const int len = c.length();
  const RealizedComplex rc(c);
  const std::vector<DenseMatrix> d = rc.orthonormal({});
  const Eigen::Index group = model.group_order();

  // b_i: orthonormal basis of (ker d_i)^perp, from a rank-revealing QR of d_i^*.
  std::vector<DenseMatrix> b(len);
  for (int i = 0; i < len; ++i) {
    const Eigen::Index n = group * c.rank(i);
    if (i + 1 >= len || d[i].size() == 0) {
      b[i] = DenseMatrix(n, 0);
      continue;
    }
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(d[i].adjoint());
    qr.setThreshold(options.cutoff);
    const Eigen::Index r = qr.rank();
    const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, n);
    b[i] = q.leftCols(r);
  }
  double log_tau = 0.0;
  for (int i = 0; i < len; ++i) {
    const Eigen::Index n = group * c.rank(i);
    if (n == 0) continue;
    const DenseMatrix u = i >= 1 && b[i - 1].cols() > 0 ? DenseMatrix(d[i - 1] * b[i - 1]) : DenseMatrix(n, 0);
    // Harmonic part: orthogonal complement of [u | b_i].
    DenseMatrix ub(n, u.cols() + b[i].cols());
    ub << u, b[i];
    DenseMatrix h;
    if (ub.cols() == 0) {
      h = DenseMatrix::Identity(n, n);
    } else {
      Eigen::HouseholderQR<DenseMatrix> qr(ub);
      const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, n);
      h = q.rightCols(n - ub.cols());
    }
    DenseMatrix full(n, n);
    full << u, h, b[i];
    Eigen::PartialPivLU<DenseMatrix> lu(full);
    double log_abs = 0.0;
    const DenseMatrix& m = lu.matrixLU();
    for (Eigen::Index j = 0; j < n; ++j) log_abs += std::log(std::abs(m(j, j)));
    log_tau += (i % 2 == 1 ? 1.0 : -1.0) * log_abs;
  }
  return log_tau / static_cast<double>(group);
}

MahlerEstimate mahler_refine(const GroupRingElement& p, double target_tol, std::int64_t max_points) {
  const AlgebraModel& model = p.model();
  if (p.is_zero()) fail(ErrorKind::InvalidInput, "Mahler measure of the zero polynomial");
  if (model.group_order() != 1) fail(ErrorKind::Unsupported, "mahler_refine needs a torus model");
  const int rank = model.torus_rank();
  std::vector<std::pair<std::vector<int>, cplx>> terms;
  for (const auto& [key, c] : p.terms()) terms.emplace_back(key.exponents, c);
  const PointFunction f = [&](std::span<const double> theta) {
    cplx v = 0.0;
    for (const auto& [e, c] : terms) {
      double phase = 0.0;
      for (int d = 0; d < rank; ++d) phase += e[d] * theta[d];
      v += c * cplx(std::cos(phase), std::sin(phase));
    }
    return std::log(std::abs(v));
  };
  MahlerEstimate est;
  if (rank == 0) {
    est.value = f({});
    return est;
  }
  std::int64_t n = 64;
  std::vector<double> a;
  double last_ratio = 0.0;
  while (points(rank, n) <= max_points) {
    a.push_back(grid_mean(rank, static_cast<int>(n), f));
    est.value = a.back();
    est.resolution = static_cast<int>(n);
    const std::size_t L = a.size();
    if (L >= 2) {
      const double d2 = std::abs(a[L - 1] - a[L - 2]);
      if (d2 <= 1e-14 * std::max(1.0, std::abs(a.back()))) {
        est.error = std::max(d2, 1e-15);
        return est;
      }
      if (L >= 3) {
        const double d1 = std::abs(a[L - 2] - a[L - 3]);
        const double ratio = d2 / d1;
        if (ratio >= 1.0 && last_ratio >= 1.0)
          fail(ErrorKind::NonConvergent, "doubling residuals do not decrease");
        last_ratio = ratio;
        if (ratio < 1.0) {
          est.error = d2 * ratio / (1.0 - ratio);
          if (est.error <= target_tol) return est;
        }
      }
    }
    n *= 2;
  }
  fail(ErrorKind::NonConvergent, "Mahler quadrature did not reach " + std::to_string(target_tol) + " within " +
                                     std::to_string(max_points) + " points");
}

}  // namespace l2t
