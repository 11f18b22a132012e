#include "mflab/car.hpp"
#include "mflab/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace mflab {

namespace {

// Mode k sits at bit position (n_modes - 1 - k): mode 0 is the most
// significant bit, so a sub-window prefix of modes is a leading tensor factor.
inline std::uint64_t mode_bit(int n_modes, int mode) {
  return std::uint64_t{1} << (n_modes - 1 - mode);
}

// Occupation parity of modes strictly before `mode` in state s.
inline int jw_sign(std::uint64_t s, int n_modes, int mode) {
  std::uint64_t before = mode == 0 ? 0 : (((std::uint64_t{1} << mode) - 1) << (n_modes - mode));
  return (std::popcount(s & before) % 2 == 0) ? 1 : -1;
}

}  // namespace

int FockContext::spin_index(const std::string& s) const {
  for (int i = 0; i < n_spins; ++i)
    if (spins[i] == s) return i;
  throw Error(ErrorCode::ModeOutOfRange, "unknown spin label '" + s + "'");
}

IntVector FockContext::wrap(const IntVector& x) const {
  const int n = side();
  IntVector w(dim);
  for (int i = 0; i < dim; ++i) {
    int v = (x[i] + half_width) % n;
    if (v < 0) v += n;
    w[i] = v - half_width;
  }
  return w;
}

int FockContext::site_index(const IntVector& x) const {
  if (x.size() != dim) throw Error(ErrorCode::ModeOutOfRange, "site has wrong dimension");
  IntVector w = wrap(x);
  for (int i = 0; i < n_sites; ++i)
    if (sites[i] == w) return i;
  throw Error(ErrorCode::ModeOutOfRange, "site lookup failed");
}

FockContext build_fock_context(int dim, int half_width, std::vector<std::string> spins,
                               int mode_cap) {
  if (dim < 1) throw Error(ErrorCode::ConfigInvalid, "dimension must be positive");
  if (half_width < 0) throw Error(ErrorCode::ConfigInvalid, "half-width must be non-negative");
  if (spins.empty()) throw Error(ErrorCode::ConfigInvalid, "spin set must be non-empty");
  FockContext ctx;
  ctx.dim = dim;
  ctx.half_width = half_width;
  ctx.spins = std::move(spins);
  ctx.n_spins = static_cast<int>(ctx.spins.size());
  ctx.mode_cap = mode_cap;

  long n_sites = 1;
  for (int i = 0; i < dim; ++i) n_sites *= ctx.side();
  long n_modes = n_sites * ctx.n_spins;
  // 30 is a hard ceiling regardless of the configured cap: dense storage
  // beyond that is out of reach anyway and the bit arithmetic assumes it
  if (n_modes > mode_cap || n_modes > 30)
    throw Error(ErrorCode::ModeCapExceeded, std::to_string(n_modes) + " modes exceed cap of " +
                                                std::to_string(std::min<long>(mode_cap, 30)));

  ctx.sites.reserve(n_sites);
  std::vector<IntVector> all;
  IntVector x = IntVector::Constant(dim, -half_width);
  while (true) {
    all.push_back(x);
    int i = 0;
    for (; i < dim; ++i) {
      if (x[i] < half_width) {
        ++x[i];
        break;
      }
      x[i] = -half_width;
    }
    if (i == dim) break;
  }
  std::stable_sort(all.begin(), all.end(), [](const IntVector& a, const IntVector& b) {
    int ra = a.cwiseAbs().maxCoeff(), rb = b.cwiseAbs().maxCoeff();
    if (ra != rb) return ra < rb;
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  });
  ctx.sites = std::move(all);
  ctx.n_sites = static_cast<int>(ctx.sites.size());
  ctx.n_modes = static_cast<int>(n_modes);
  ctx.fock_dim = Eigen::Index{1} << ctx.n_modes;
  return ctx;
}

const char* parity_name(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Mixed: return "mixed";
  }
  return "?";
}

Parity compute_parity(const FockContext& ctx, const Matrix& m) {
  const Eigen::Index d = ctx.fock_dim;
  double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  double even_residual = 0.0, odd_residual = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    int pj = std::popcount(static_cast<std::uint64_t>(j)) % 2;
    for (Eigen::Index i = 0; i < d; ++i) {
      int pi = std::popcount(static_cast<std::uint64_t>(i)) % 2;
      double a = std::abs(m(i, j));
      if (pi == pj)
        odd_residual = std::max(odd_residual, a);  // g_pi fixes this entry
      else
        even_residual = std::max(even_residual, a);
    }
  }
  if (even_residual <= 1e-12 * scale) return Parity::Even;
  if (odd_residual <= 1e-12 * scale) return Parity::Odd;
  return Parity::Mixed;
}

LocalOperator make_local_operator(const FockContext& ctx, Matrix m, std::vector<int> support) {
  LocalOperator op;
  op.parity = compute_parity(ctx, m);
  op.mat = std::move(m);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  op.support = std::move(support);
  return op;
}

LocalOperator local_identity(const FockContext& ctx) {
  LocalOperator op;
  op.mat = Matrix::Identity(ctx.fock_dim, ctx.fock_dim);
  op.parity = Parity::Even;
  return op;
}

Matrix annihilation_matrix(const FockContext& ctx, int mode) {
  if (mode < 0 || mode >= ctx.n_modes)
    throw Error(ErrorCode::ModeOutOfRange, "mode " + std::to_string(mode));
  const Eigen::Index d = ctx.fock_dim;
  Matrix a = Matrix::Zero(d, d);
  const std::uint64_t bit = mode_bit(ctx.n_modes, mode);
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(d); ++s) {
    if (s & bit) a(static_cast<Eigen::Index>(s & ~bit), static_cast<Eigen::Index>(s)) =
        static_cast<double>(jw_sign(s, ctx.n_modes, mode));
  }
  return a;
}

LocalOperator annihilation(const FockContext& ctx, const IntVector& site,
                           const std::string& spin) {
  int si = ctx.site_index(site);
  int mode = ctx.mode_index(si, ctx.spin_index(spin));
  LocalOperator op;
  op.mat = annihilation_matrix(ctx, mode);
  op.support = {si};
  op.parity = Parity::Odd;
  return op;
}

LocalOperator creation(const FockContext& ctx, const IntVector& site, const std::string& spin) {
  LocalOperator a = annihilation(ctx, site, spin);
  a.mat = a.mat.adjoint().eval();
  return a;
}

LocalOperator op_adjoint(const FockContext& ctx, const LocalOperator& a) {
  (void)ctx;
  LocalOperator out;
  out.mat = a.mat.adjoint();
  out.support = a.support;
  out.parity = a.parity;  // conjugation by g_pi commutes with the adjoint
  return out;
}

LocalOperator op_product(const FockContext& ctx, const LocalOperator& a, const LocalOperator& b) {
  std::vector<int> support = a.support;
  support.insert(support.end(), b.support.begin(), b.support.end());
  return make_local_operator(ctx, a.mat * b.mat, std::move(support));
}

LocalOperator op_sum(const FockContext& ctx, const LocalOperator& a, const LocalOperator& b) {
  std::vector<int> support = a.support;
  support.insert(support.end(), b.support.begin(), b.support.end());
  return make_local_operator(ctx, a.mat + b.mat, std::move(support));
}

Matrix number_operator(const FockContext& ctx) {
  const Eigen::Index d = ctx.fock_dim;
  Matrix n = Matrix::Zero(d, d);
  for (Eigen::Index s = 0; s < d; ++s)
    n(s, s) = static_cast<double>(std::popcount(static_cast<std::uint64_t>(s)));
  return n;
}

Matrix parity_unitary(const FockContext& ctx) {
  const Eigen::Index d = ctx.fock_dim;
  Matrix p = Matrix::Zero(d, d);
  for (Eigen::Index s = 0; s < d; ++s)
    p(s, s) = (std::popcount(static_cast<std::uint64_t>(s)) % 2 == 0) ? 1.0 : -1.0;
  return p;
}

Matrix gauge_automorphism(const FockContext& ctx, double theta, const Matrix& a) {
  const Eigen::Index d = ctx.fock_dim;
  Vector phase(d);
  for (Eigen::Index s = 0; s < d; ++s) {
    double n = static_cast<double>(std::popcount(static_cast<std::uint64_t>(s)));
    phase[s] = std::exp(Complex(0.0, theta * n));
  }
  return phase.asDiagonal() * a * phase.conjugate().asDiagonal();
}

LocalOperator gauge_automorphism(const FockContext& ctx, double theta, const LocalOperator& a) {
  LocalOperator out;
  out.mat = gauge_automorphism(ctx, theta, a.mat);
  out.support = a.support;
  out.parity = a.parity;
  return out;
}

Matrix mode_permutation_unitary(const FockContext& ctx, const std::vector<int>& perm) {
  const Eigen::Index d = ctx.fock_dim;
  const int m = ctx.n_modes;
  Matrix u = Matrix::Zero(d, d);
  std::vector<int> occ, mapped;
  for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(d); ++s) {
    occ.clear();
    mapped.clear();
    for (int k = 0; k < m; ++k)
      if (s & mode_bit(m, k)) occ.push_back(k);
    for (int k : occ) mapped.push_back(perm[k]);
    // Sign: parity of the permutation sorting the image list back to mode order.
    int sign = 1;
    for (size_t i = 0; i < mapped.size(); ++i)
      for (size_t j = i + 1; j < mapped.size(); ++j)
        if (mapped[i] > mapped[j]) sign = -sign;
    std::uint64_t t = 0;
    for (int k : mapped) t |= mode_bit(m, k);
    u(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = static_cast<double>(sign);
  }
  return u;
}

Matrix translate(const FockContext& ctx, const Matrix& a, const IntVector& x) {
  std::vector<int> perm(ctx.n_modes);
  for (int si = 0; si < ctx.n_sites; ++si) {
    IntVector y = ctx.sites[si];
    int ti = ctx.site_index(IntVector(y + x));
    for (int sp = 0; sp < ctx.n_spins; ++sp)
      perm[ctx.mode_index(si, sp)] = ctx.mode_index(ti, sp);
  }
  Matrix u = mode_permutation_unitary(ctx, perm);
  return u * a * u.adjoint();
}

LocalOperator translate(const FockContext& ctx, const LocalOperator& a, const IntVector& x) {
  LocalOperator out;
  out.mat = translate(ctx, a.mat, x);
  out.parity = a.parity;
  out.support.reserve(a.support.size());
  for (int si : a.support) out.support.push_back(ctx.site_index(IntVector(ctx.sites[si] + x)));
  std::sort(out.support.begin(), out.support.end());
  return out;
}

std::vector<IntVector> window_sites(const FockContext& ctx, int ell) {
  if (ell > ctx.half_width)
    throw Error(ErrorCode::WindowTooSmall,
                "sub-window " + std::to_string(ell) + " exceeds L=" + std::to_string(ctx.half_width));
  std::vector<IntVector> out;
  for (const auto& s : ctx.sites)
    if (s.cwiseAbs().maxCoeff() <= ell) out.push_back(s);
  return out;
}

LocalOperator space_average(const FockContext& ctx, const LocalOperator& a, int ell) {
  auto xs = window_sites(ctx, ell);
  Matrix acc = Matrix::Zero(ctx.fock_dim, ctx.fock_dim);
  std::vector<int> support;
  for (const auto& x : xs) {
    LocalOperator t = translate(ctx, a, x);
    acc += t.mat;
    support.insert(support.end(), t.support.begin(), t.support.end());
  }
  acc /= static_cast<double>(xs.size());
  return make_local_operator(ctx, std::move(acc), std::move(support));
}

double ergodicity_gap(const FockContext& ctx, const Matrix& rho, const LocalOperator& a,
                      int ell) {
  LocalOperator avg = space_average(ctx, a, ell);
  Complex second = (rho * (avg.mat.adjoint() * avg.mat)).trace();
  Complex first = (rho * a.mat).trace();
  return second.real() - std::norm(first);
}

Matrix restrict_to_window(const FockContext& ctx, const Matrix& rho, int ell) {
  auto kept_sites = window_sites(ctx, ell);
  const int m_keep = static_cast<int>(kept_sites.size()) * ctx.n_spins;
  const Eigen::Index dk = Eigen::Index{1} << m_keep;
  const Eigen::Index dt = ctx.fock_dim / dk;
  Matrix red = Matrix::Zero(dk, dk);
  for (Eigen::Index p = 0; p < dk; ++p)
    for (Eigen::Index q = 0; q < dk; ++q) {
      Complex s = 0.0;
      for (Eigen::Index t = 0; t < dt; ++t) s += rho(p * dt + t, q * dt + t);
      red(p, q) = s;
    }
  return red;
}

GaugeTwistDemo gauge_twist_demo(const FockContext& ctx) {
  if (ctx.n_spins < 4)
    throw Error(ErrorCode::SpinSetTooSmall,
                "need at least 4 spin labels, have " + std::to_string(ctx.n_spins));
  const Eigen::Index d = ctx.fock_dim;
  const int m = ctx.n_modes;

  // Product of two pair states on the first four modes of the origin site,
  // vacuum elsewhere: (|00> + |11>)/sqrt(2) on modes (0,1) and (2,3).
  Vector psi = Vector::Zero(d);
  for (int p1 : {0, 1})
    for (int p2 : {0, 1}) {
      std::uint64_t s = 0;
      if (p1) s |= mode_bit(m, 0) | mode_bit(m, 1);
      if (p2) s |= mode_bit(m, 2) | mode_bit(m, 3);
      psi[static_cast<Eigen::Index>(s)] = 0.5;
    }
  GaugeTwistDemo demo;
  demo.rho0 = psi * psi.adjoint();
  demo.rho1 = gauge_automorphism(ctx, M_PI / 4.0, demo.rho0);    // rho0 o g_{-pi/4}
  demo.rho2 = gauge_automorphism(ctx, -M_PI / 4.0, demo.rho0);   // rho0 o g_{+pi/4}

  Matrix a4 = annihilation_matrix(ctx, 0) * annihilation_matrix(ctx, 1) *
              annihilation_matrix(ctx, 2) * annihilation_matrix(ctx, 3);
  Matrix a2 = annihilation_matrix(ctx, 0) * annihilation_matrix(ctx, 1);

  demo.value0 = (demo.rho0 * a4).trace();
  demo.value1 = (demo.rho1 * a4).trace();
  demo.value2 = (demo.rho2 * a4).trace();
  demo.twist_residual = std::max(std::abs(demo.value0 + demo.value1),
                                 std::abs(demo.value0 + demo.value2));
  Complex base = (demo.rho0 * a2).trace();
  demo.two_mode_ratio1 = (demo.rho1 * a2).trace() / base;
  demo.two_mode_ratio2 = (demo.rho2 * a2).trace() / base;
  demo.state_distance = trace_norm(demo.rho1 - demo.rho2);
  return demo;
}

}  // namespace mflab
