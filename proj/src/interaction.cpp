#include "mflab/interaction.hpp"
#include "mflab/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

namespace mflab {

double DecayFunction::value(double distance) const {
  return std::exp(-varsigma * distance) * std::pow(1.0 + distance, -(dim + epsilon));
}

double DecayFunction::operator()(const IntVector& x, const IntVector& y) const {
  return value((x - y).cast<double>().norm());
}

double DecayFunction::norm_one_truncated(int radius) const {
  double sum = 0.0;
  IntVector x = IntVector::Constant(dim, -radius);
  while (true) {
    sum += value(x.cast<double>().norm());
    int i = 0;
    for (; i < dim; ++i) {
      if (x[i] < radius) {
        ++x[i];
        break;
      }
      x[i] = -radius;
    }
    if (i == dim) break;
  }
  return sum;
}

double DecayFunction::tail_bound(int radius) const {
  return dim * std::pow(2.0, dim) * std::exp(-varsigma * radius) *
         std::pow(1.0 + radius, -epsilon) / epsilon;
}

namespace {

bool lex_less(const IntVector& a, const IntVector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

bool contains_offset(const std::vector<IntVector>& support, const IntVector& o) {
  for (const auto& s : support)
    if (s == o) return true;
  return false;
}

}  // namespace

Interaction::Interaction(int dim, std::string label) : dim_(dim), label_(std::move(label)) {}

void Interaction::add_anchor(std::vector<IntVector> support,
                             std::vector<InteractionMonomial> poly) {
  if (support.empty()) throw Error(ErrorCode::ConfigInvalid, "anchor needs a non-empty support");
  for (const auto& o : support)
    if (o.size() != dim_) throw Error(ErrorCode::ConfigInvalid, "offset has wrong dimension");
  std::sort(support.begin(), support.end(), lex_less);
  support.erase(std::unique(support.begin(), support.end()), support.end());
  IntVector base = support.front();
  for (auto& o : support) o -= base;
  for (auto& mono : poly) {
    if (mono.factors.size() % 2 != 0)
      throw Error(ErrorCode::NonEvenAnchor,
                  "monomial with " + std::to_string(mono.factors.size()) + " generators");
    for (auto& f : mono.factors) {
      f.offset -= base;
      if (!contains_offset(support, f.offset))
        throw Error(ErrorCode::ConfigInvalid, "monomial references a site outside the anchor");
    }
  }
  anchors_.push_back({std::move(support), std::move(poly)});
}

int Interaction::range() const {
  int r = 0;
  for (const auto& a : anchors_)
    for (int i = 0; i < dim_; ++i) {
      int lo = a.support.front()[i], hi = lo;
      for (const auto& o : a.support) {
        lo = std::min(lo, o[i]);
        hi = std::max(hi, o[i]);
      }
      r = std::max(r, hi - lo);
    }
  return r;
}

std::vector<std::string> Interaction::referenced_spins() const {
  std::set<std::string> s;
  for (const auto& a : anchors_)
    for (const auto& m : a.poly)
      for (const auto& f : m.factors) s.insert(f.spin);
  return {s.begin(), s.end()};
}

Interaction adjoint_interaction(const Interaction& phi) {
  Interaction out(phi.dim(), phi.label().empty() ? "" : phi.label() + "*");
  for (const auto& a : phi.anchors()) {
    std::vector<InteractionMonomial> poly;
    poly.reserve(a.poly.size());
    for (const auto& m : a.poly) {
      InteractionMonomial adj;
      adj.coeff = std::conj(m.coeff);
      adj.factors.assign(m.factors.rbegin(), m.factors.rend());
      for (auto& f : adj.factors) f.dagger = !f.dagger;
      poly.push_back(std::move(adj));
    }
    out.add_anchor(a.support, std::move(poly));
  }
  return out;
}

Interaction scale_interaction(const Interaction& phi, Complex factor) {
  Interaction out(phi.dim(), phi.label());
  for (const auto& a : phi.anchors()) {
    auto poly = a.poly;
    for (auto& m : poly) m.coeff *= factor;
    out.add_anchor(a.support, std::move(poly));
  }
  return out;
}

Interaction add_interactions(const Interaction& a, const Interaction& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::LengthMismatch, "interaction dimensions differ");
  Interaction out(a.dim(), a.label());
  for (const auto& t : a.anchors()) out.add_anchor(t.support, t.poly);
  for (const auto& t : b.anchors()) out.add_anchor(t.support, t.poly);
  return out;
}

Matrix realize_anchor(const FockContext& ctx, const AnchorTerm& anchor, const IntVector& shift) {
  const Eigen::Index d = ctx.fock_dim;
  const int m = ctx.n_modes;
  Matrix out = Matrix::Zero(d, d);
  for (const auto& mono : anchor.poly) {
    std::vector<int> modes(mono.factors.size());
    for (size_t i = 0; i < mono.factors.size(); ++i) {
      const auto& f = mono.factors[i];
      int site = ctx.site_index(IntVector(f.offset + shift));
      modes[i] = ctx.mode_index(site, ctx.spin_index(f.spin));
    }
    for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(d); ++s) {
      std::uint64_t cur = s;
      Complex amp = mono.coeff;
      // Rightmost factor acts first.
      for (size_t i = mono.factors.size(); i-- > 0;) {
        const int mode = modes[i];
        const std::uint64_t bit = std::uint64_t{1} << (m - 1 - mode);
        const std::uint64_t before =
            mode == 0 ? 0 : (((std::uint64_t{1} << mode) - 1) << (m - mode));
        const bool occupied = (cur & bit) != 0;
        if (mono.factors[i].dagger == occupied) {
          amp = 0.0;
          break;
        }
        if (std::popcount(cur & before) % 2 == 1) amp = -amp;
        cur ^= bit;
      }
      if (amp != 0.0) out(static_cast<Eigen::Index>(cur), static_cast<Eigen::Index>(s)) += amp;
    }
  }
  return out;
}

namespace {

struct SupportKey {
  std::vector<std::vector<int>> offsets;
  bool operator<(const SupportKey& o) const { return offsets < o.offsets; }
};

SupportKey support_key(const std::vector<IntVector>& support) {
  SupportKey k;
  for (const auto& o : support) k.offsets.push_back({o.data(), o.data() + o.size()});
  return k;
}

// Smallest cubic window holding the anchor, with only the spins it references;
// the C*-norm of an anchor is independent of the embedding window.
struct MiniRealization {
  FockContext ctx;
  IntVector shift;
};

MiniRealization mini_context(int dim, const std::vector<IntVector>& support,
                             const std::vector<std::string>& spins) {
  int half = 0;
  IntVector lo = support.front(), hi = support.front();
  for (const auto& o : support) {
    lo = lo.cwiseMin(o);
    hi = hi.cwiseMax(o);
  }
  IntVector shift(dim);
  for (int i = 0; i < dim; ++i) {
    shift[i] = -(lo[i] + hi[i]) / 2;
    half = std::max({half, std::abs(lo[i] + shift[i]), std::abs(hi[i] + shift[i])});
  }
  return {build_fock_context(dim, half, spins, 62), shift};
}

// Distinct canonical supports with their summed anchor operator norms.
std::map<SupportKey, std::pair<std::vector<const AnchorTerm*>, double>> grouped_anchor_norms(
    const Interaction& phi, const std::vector<std::string>& spins) {
  std::map<SupportKey, std::pair<std::vector<const AnchorTerm*>, double>> groups;
  for (const auto& a : phi.anchors()) groups[support_key(a.support)].first.push_back(&a);
  for (auto& [key, group] : groups) {
    auto mini = mini_context(phi.dim(), group.first.front()->support, spins);
    Matrix sum = Matrix::Zero(mini.ctx.fock_dim, mini.ctx.fock_dim);
    for (const AnchorTerm* a : group.first) sum += realize_anchor(mini.ctx, *a, mini.shift);
    group.second = operator_norm(sum);
  }
  return groups;
}

}  // namespace

double interaction_norm(const Interaction& phi, const DecayFunction& f) {
  if (phi.empty()) return 0.0;
  auto spins = phi.referenced_spins();
  if (spins.empty()) return 0.0;
  auto groups = grouped_anchor_norms(phi, spins);

  // sup over displacements r of sum_Z ||Phi_Z|| #{p in Z : p + r in Z} / F(r).
  std::map<std::vector<int>, double> by_displacement;
  for (const auto& [key, group] : groups) {
    if (group.second == 0.0) continue;
    const auto& support = group.first.front()->support;
    for (const auto& p : support)
      for (const auto& q : support) {
        IntVector r = q - p;
        by_displacement[{r.data(), r.data() + r.size()}] += group.second;
      }
  }
  double best = 0.0;
  IntVector zero = IntVector::Zero(phi.dim());
  for (const auto& [r, weight] : by_displacement) {
    IntVector rv = Eigen::Map<const IntVector>(r.data(), r.size());
    best = std::max(best, weight / f(rv, zero));
  }
  return best;
}

bool interactions_equal(const Interaction& a, const Interaction& b, double tol) {
  Interaction diff = add_interactions(a, scale_interaction(b, -1.0));
  if (diff.empty()) return true;
  auto spins = diff.referenced_spins();
  if (spins.empty()) return true;
  for (const auto& [key, group] : grouped_anchor_norms(diff, spins))
    if (group.second > tol) return false;
  return true;
}

bool interaction_is_selfadjoint(const Interaction& phi, double tol) {
  return interactions_equal(phi, adjoint_interaction(phi), tol);
}

LocalOperator local_hamiltonian(const Interaction& phi, const FockContext& ctx) {
  if (phi.range() > 2 * ctx.half_width)
    throw Error(ErrorCode::RangeExceedsWindow, "anchor extent " + std::to_string(phi.range()) +
                                                   " exceeds window extent " +
                                                   std::to_string(2 * ctx.half_width));
  Matrix h = Matrix::Zero(ctx.fock_dim, ctx.fock_dim);
  std::vector<int> support;
  for (const auto& anchor : phi.anchors()) {
    std::set<std::vector<int>> seen;
    for (const auto& u : ctx.sites) {
      std::vector<int> translated;
      translated.reserve(anchor.support.size());
      for (const auto& o : anchor.support) translated.push_back(ctx.site_index(IntVector(o + u)));
      std::sort(translated.begin(), translated.end());
      if (!seen.insert(translated).second) continue;
      h += realize_anchor(ctx, anchor, u);
      support.insert(support.end(), translated.begin(), translated.end());
    }
  }
  return make_local_operator(ctx, std::move(h), std::move(support));
}

LocalOperator energy_per_site_element(const Interaction& phi, const FockContext& ctx) {
  Matrix e = Matrix::Zero(ctx.fock_dim, ctx.fock_dim);
  std::vector<int> support;
  for (const auto& anchor : phi.anchors()) {
    const double card = static_cast<double>(anchor.support.size());
    for (const auto& p : anchor.support) {
      e += realize_anchor(ctx, anchor, IntVector(-p)) / card;
      for (const auto& o : anchor.support) support.push_back(ctx.site_index(IntVector(o - p)));
    }
  }
  return make_local_operator(ctx, std::move(e), std::move(support));
}

Matrix derivation(const Matrix& hamiltonian, const Matrix& a) {
  return Complex(0.0, 1.0) * (hamiltonian * a - a * hamiltonian);
}

LocalOperator derivation(const Interaction& phi, const FockContext& ctx, const LocalOperator& a) {
  LocalOperator u = local_hamiltonian(phi, ctx);
  std::vector<int> support = u.support;
  support.insert(support.end(), a.support.begin(), a.support.end());
  return make_local_operator(ctx, derivation(u.mat, a.mat), std::move(support));
}

}  // namespace mflab
