#include "seqspin/spinmath.hpp"

#include <complex>
#include <mutex>
#include <unordered_map>

namespace seqspin::spinmath {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using std::complex;

SpinOperators build_spin_operators(const SpinSystem& sys) {
  const int d = sys.dim();
  const double s = sys.s();
  SpinOperators ops;
  ops.sp = MatrixXcd::Zero(d, d);
  ops.sm = MatrixXcd::Zero(d, d);
  ops.sz = MatrixXcd::Zero(d, d);

  for (int k = 0; k < d; ++k) ops.sz(k, k) = sys.eigenvalue(k);

  // S+|m> = sqrt(s(s+1) - m(m+1)) |m+1>. With index k <-> m = s - k, the
  // state |m_k + 1> sits at index k - 1.
  for (int k = 1; k < d; ++k) {
    double m = sys.eigenvalue(k);
    ops.sp(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  ops.sm = ops.sp.adjoint();

  const complex<double> I(0.0, 1.0);
  ops.sx = 0.5 * (ops.sp + ops.sm);
  ops.sy = -0.5 * I * (ops.sp - ops.sm);
  return ops;
}

MatrixXcd spin_component(const SpinSystem& sys, const Direction& a) {
  SpinOperators ops = build_spin_operators(sys);
  Vec3 u = a.unit();
  return u.x * ops.sx + u.y * ops.sy + u.z * ops.sz;
}

namespace {

// Eigendecomposition of Sy per spin value, cached: Sy = V D V^dagger with
// D = diag(m_0, ..., m_{2s}) in the standard ladder order. Sy has the same
// non-degenerate spectrum as Sz, so the rotation exp(-i theta Sy) is
// unambiguous regardless of the eigensolver's per-column phases (they
// cancel in V f(D) V^dagger).
struct SyBasis {
  MatrixXcd v;               // columns: eigenvectors, sorted to m = s..-s
  Eigen::VectorXd eigen_m;   // the ladder s, s-1, ..., -s
};

const SyBasis& sy_basis(const SpinSystem& sys) {
  static std::unordered_map<int, SyBasis> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(sys.twice_s);
  if (it != cache.end()) return it->second;

  SpinOperators ops = build_spin_operators(sys);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(ops.sy);
  // Solver returns eigenvalues ascending (-s..+s); flip to the ladder order.
  const int d = sys.dim();
  SyBasis basis;
  basis.v.resize(d, d);
  basis.eigen_m.resize(d);
  for (int k = 0; k < d; ++k) {
    basis.v.col(k) = solver.eigenvectors().col(d - 1 - k);
    basis.eigen_m(k) = solver.eigenvalues()(d - 1 - k);
  }
  return cache.emplace(sys.twice_s, std::move(basis)).first->second;
}

MatrixXcd rotation_y(const SpinSystem& sys, double theta) {
  const SyBasis& basis = sy_basis(sys);
  const int d = sys.dim();
  VectorXcd phases(d);
  const complex<double> I(0.0, 1.0);
  for (int k = 0; k < d; ++k)
    phases(k) = std::exp(-I * theta * basis.eigen_m(k));
  return basis.v * phases.asDiagonal() * basis.v.adjoint();
}

}  // namespace

MatrixXcd eigenbasis(const SpinSystem& sys, const Direction& a) {
  const int d = sys.dim();
  const complex<double> I(0.0, 1.0);
  // exp(-i phi Sz) is diagonal in the ladder basis.
  VectorXcd zphases(d);
  for (int k = 0; k < d; ++k)
    zphases(k) = std::exp(-I * a.phi * sys.eigenvalue(k));
  return zphases.asDiagonal() * rotation_y(sys, a.theta);
}

MatrixXd transition_matrix(const SpinSystem& sys, const Direction& a,
                           const Direction& b) {
  return transition_matrix_angle(sys, angle_between(a, b));
}

MatrixXd transition_matrix_angle(const SpinSystem& sys, double angle) {
  // <z, m_j | b, m_k> with b at polar angle `angle`, phi = 0: the overlap
  // matrix is exp(-i angle Sy) itself; probabilities are its |.|^2 entries.
  MatrixXcd u = rotation_y(sys, angle);
  return u.cwiseAbs2();
}

double transition_prob(const SpinSystem& sys, const Direction& a, int j,
                       const Direction& b, int k) {
  const int d = sys.dim();
  if (j < 0 || j >= d || k < 0 || k >= d)
    throw config_error("transition_prob: outcome index out of range");
  return transition_matrix(sys, a, b)(j, k);
}

}  // namespace seqspin::spinmath
