#include "tphase/matrix_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace tphase {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEigenvectorCondLimit = 1e6;
constexpr double kBranchCutTol = 1e-12;

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

struct RotationPencil {
  CMatrix herm;
  CMatrix skew;
};

// lambda_min of Re(e^{-i theta} M) = cos(theta) Re M + sin(theta) Im M, minimised
// over the pencils. When some pencil is provably below `floor` (a Cholesky
// test of the shifted matrix fails) the scan stops and -inf is returned.
double rotated_margin(const std::vector<RotationPencil>& pencils, double theta,
                      double floor = -std::numeric_limits<double>::infinity()) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const bool prune = std::isfinite(floor);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& pc : pencils) {
    if (pc.herm.rows() == 0) continue;
    CMatrix rot = c * pc.herm + s * pc.skew;
    if (prune) {
      CMatrix shifted = rot;
      shifted.diagonal().array() -= floor;
      Eigen::LLT<CMatrix> llt(shifted);
      if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    }
    worst = std::min(worst, lambda_min_hermitian(rot));
  }
  return worst;
}

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
  std::array<double, 16> nodes{};
  std::array<double, 16> weights{};

  GaussLegendre16() {
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[static_cast<std::size_t>(i)] = x;
      weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre16& gauss_legendre16() {
  static const GaussLegendre16 rule;
  return rule;
}

// (2/pi) int_{-U}^{U} (e^u A + e^{-u} B)^{-1} du with `panels` panels of 16 nodes.
CMatrix inverse_mean_integral(const CMatrix& a, const CMatrix& b, double half_width, int panels) {
  const auto& rule = gauss_legendre16();
  const double h = 2.0 * half_width / panels;
  CMatrix acc = CMatrix::Zero(a.rows(), a.cols());
  for (int k = 0; k < panels; ++k) {
    const double mid = -half_width + (k + 0.5) * h;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double u = mid + 0.5 * h * rule.nodes[q];
      const CMatrix pencil = std::exp(u) * a + std::exp(-u) * b;
      acc += (0.5 * h * rule.weights[q]) * pencil.partialPivLu().inverse();
    }
  }
  return (2.0 / kPi) * acc;
}

}  // namespace

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

CMatrix skew_hermitian_part(const CMatrix& m) {
  return (m - m.adjoint()) * Complex(0.0, -0.5);
}

double lambda_min_hermitian(const CMatrix& h) {
  if (h.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

SectorialityMargin max_rotation_margin(std::span<const CMatrix> mats, int grid_points) {
  if (grid_points < 4) throw Error(ErrorCode::kInvalidArgument, "rotation grid needs at least 4 points");
  std::vector<RotationPencil> pencils;
  pencils.reserve(mats.size());
  double scale = 0.0;
  for (const auto& m : mats) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::kDimensionMismatch, "rotation search needs square matrices");
    pencils.push_back({hermitian_part(m), skew_hermitian_part(m)});
    scale = std::max(scale, spectral_norm(m));
  }

  const double step = 2.0 * kPi / grid_points;
  double best_theta = kPi;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double theta = -kPi + (i + 1) * step;
    const double v = rotated_margin(pencils, theta, best);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }

  // Golden-section refinement on [best - step, best + step].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_theta - step;
  double hi = best_theta + step;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = rotated_margin(pencils, x1);
  double f2 = rotated_margin(pencils, x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = rotated_margin(pencils, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = rotated_margin(pencils, x1);
    }
  }
  const double refined = 0.5 * (lo + hi);
  const double refined_value = rotated_margin(pencils, refined);
  SectorialityMargin out;
  out.scale = scale;
  if (refined_value > best) {
    out.gamma = wrap_angle(refined);
    out.margin = refined_value;
  } else {
    out.gamma = wrap_angle(best_theta);
    out.margin = best;
  }
  return out;
}

SectorialFactorizationM sectorial_decompose_matrix(const CMatrix& m, std::optional<double> gamma) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kDimensionMismatch, "sectorial decomposition needs a square matrix");
  const Index n = m.rows();
  SectorialFactorizationM out;
  if (n == 0) {
    out.T = CMatrix(0, 0);
    out.phases = RVector(0);
    return out;
  }
  if (!gamma) {
    const std::array<CMatrix, 1> one{m};
    const SectorialityMargin sm = max_rotation_margin(one);
    if (!sm.sectorial()) throw Error(ErrorCode::kNotSectorial, "0 lies in the numerical range");
    gamma = sm.gamma;
  }
  out.gamma = *gamma;

  const CMatrix rotated = std::polar(1.0, -out.gamma) * m;
  const CMatrix h = hermitian_part(rotated);
  const CMatrix k = skew_hermitian_part(rotated);
  if (!(lambda_min_hermitian(h) > kPdTol * spectral_norm(m))) {
    throw Error(ErrorCode::kNotSectorial, "rotated Hermitian part is not positive definite");
  }
  Eigen::LLT<CMatrix> llt(h);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNotSectorial, "Cholesky factorization failed");
  const CMatrix l = llt.matrixL();
  const auto lower = l.triangularView<Eigen::Lower>();
  const CMatrix y = lower.solve(k);
  CMatrix s = lower.solve(CMatrix(y.adjoint()));
  s = hermitian_part(s);

  Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
  const RVector& theta = es.eigenvalues();  // ascending
  const CMatrix& q = es.eigenvectors();

  // Candidate phases before ordering; atan keeps each within pi/2 of gamma.
  std::vector<double> raw(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = wrap_angle(out.gamma + std::atan(theta(i)));
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return raw[static_cast<std::size_t>(a)] > raw[static_cast<std::size_t>(b)];
  });

  const CMatrix qhlh = q.adjoint() * l.adjoint();
  out.T.resize(n, n);
  out.phases.resize(n);
  for (Index r = 0; r < n; ++r) {
    const Index src = order[static_cast<std::size_t>(r)];
    out.phases(r) = raw[static_cast<std::size_t>(src)];
    out.T.row(r) = std::pow(1.0 + theta(src) * theta(src), 0.25) * qhlh.row(src);
  }
  if (out.phases(0) - out.phases(n - 1) >= kPi - 1e-12) {
    throw Error(ErrorCode::kBranchSpread, "principal phases spread over pi or more");
  }
  return out;
}

CMatrix sqrt_upper_triangular(const CMatrix& t) {
  const Index n = t.rows();
  CMatrix r = CMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    r(j, j) = std::sqrt(t(j, j));
    for (Index i = j - 1; i >= 0; --i) {
      Complex acc = t(i, j);
      for (Index k = i + 1; k < j; ++k) acc -= r(i, k) * r(k, j);
      r(i, j) = acc / (r(i, i) + r(j, j));
    }
  }
  return r;
}

CMatrix principal_power_matrix(const CMatrix& m, double alpha) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kDimensionMismatch, "matrix power needs a square matrix");
  const Index n = m.rows();
  if (alpha == 0.0) return CMatrix::Identity(n, n);
  if (alpha == 1.0) return m;

  Eigen::ComplexEigenSolver<CMatrix> es(m);
  const CVector& lambda = es.eigenvalues();
  for (Index i = 0; i < n; ++i) {
    const Complex z = lambda(i);
    const double dist = z.real() <= 0.0 ? std::abs(z.imag()) : std::abs(z);
    if (dist <= kBranchCutTol) throw Error(ErrorCode::kBranchCut, "eigenvalue on (-inf, 0]");
  }

  const CMatrix& v = es.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(v);
  const RVector& sv = svd.singularValues();
  const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (cond < kEigenvectorCondLimit) {
    CVector fl(n);
    for (Index i = 0; i < n; ++i) fl(i) = std::pow(lambda(i), alpha);
    return v * fl.asDiagonal() * v.partialPivLu().inverse();
  }

  if (alpha == 0.5 || alpha == -0.5) {
    Eigen::ComplexSchur<CMatrix> schur(m);
    const CMatrix& u = schur.matrixU();
    const CMatrix root = u * sqrt_upper_triangular(schur.matrixT()) * u.adjoint();
    return alpha > 0.0 ? root : CMatrix(root.partialPivLu().inverse());
  }
  // Schur-Pade evaluation for general exponents.
  Eigen::MatrixPower<CMatrix> power(m);
  return power(alpha);
}

bool is_accretive(const CMatrix& m) {
  if (m.rows() != m.cols()) return false;
  if (m.rows() == 0) return true;
  return lambda_min_hermitian(hermitian_part(m)) > kPdTol * spectral_norm(m);
}

CMatrix matrix_geomean(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "geometric mean needs square matrices of equal size");
  }
  if (!is_accretive(a) || !is_accretive(b)) {
    throw Error(ErrorCode::kNotAccretive, "geometric mean needs strictly accretive arguments");
  }
  const CMatrix a_half = principal_power_matrix(a, 0.5);
  const CMatrix a_neg_half = a_half.partialPivLu().inverse();
  const CMatrix inner = principal_power_matrix(a_neg_half * b * a_neg_half, 0.5);
  return a_half * inner * a_half;
}

CMatrix matrix_geomean_integral_oracle(const CMatrix& a, const CMatrix& b, int nodes) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "geometric mean needs square matrices of equal size");
  }
  if (!is_accretive(a) || !is_accretive(b)) {
    throw Error(ErrorCode::kNotAccretive, "geometric mean needs strictly accretive arguments");
  }
  if (a.rows() == 0) return a;
  if (nodes < 16) throw Error(ErrorCode::kInvalidArgument, "quadrature needs at least 16 nodes");

  Eigen::JacobiSVD<CMatrix> sa(a);
  Eigen::JacobiSVD<CMatrix> sb(b);
  const double smin = std::min(sa.singularValues().tail(1)(0), sb.singularValues().tail(1)(0));
  const double smax = std::max(sa.singularValues()(0), sb.singularValues()(0));
  // Beyond |u| = U the integrand is ~ e^{-|u|} A^{-1} (or B^{-1}); push that tail
  // below 1e-12, with an allowance for the scale mismatch of A and B.
  const double half_width = std::log(1.0 / (smin * 1e-12)) + 0.5 * std::log(std::max(smax / smin, 1.0)) + 1.0;

  const int panels = std::max(1, nodes / 16);
  const CMatrix coarse = inverse_mean_integral(a, b, half_width, panels);
  const CMatrix fine = inverse_mean_integral(a, b, half_width, 2 * panels);
  const double change = (fine - coarse).norm() / std::max(fine.norm(), 1e-300);
  if (change > 1e-6) {
    throw Error(ErrorCode::kQuadratureNotConverged, "doubling the node count changed the result by " + std::to_string(change));
  }
  return fine.partialPivLu().inverse();
}

}  // namespace tphase
