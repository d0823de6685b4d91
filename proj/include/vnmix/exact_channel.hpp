#ifndef VNMIX_EXACT_CHANNEL_HPP
#define VNMIX_EXACT_CHANNEL_HPP

// Exact reachability ρ = ω∘φ by a quantum channel, through the GNS
// representation of ω.
//
// Block i of A acts on the GNS carrier H_i = C^{n_i} ⊗ C^{r_i}, r_i = rank D_i^ω,
// as x ↦ x ⊗ 1 (carrier index a·r_i + k). With D_i^ω = Σ_k λ_k e_k e_k*, the
// cyclic vector is ξ_i = Σ_k √λ_k e_k ⊗ f_k and the commutant is 1 ⊗ M_{r_i}.
//
// A channel exists iff some density T on the carrier matches ρ on π(A) and
// the vector state of ξ on π(A)'. Both constraint families are block
// diagonal and include the central projections, so T is searched block by
// block. From a solution T the channel is read off a purification η of T:
// u(yξ) = y^{(k)} η defines a partial isometry intertwining the commutant,
// so its components lie in π(A).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vnmix/algebra.hpp"
#include "vnmix/channels.hpp"
#include "vnmix/functionals.hpp"
#include "vnmix/numerics/dykstra.hpp"
#include "vnmix/numerics/eigh.hpp"

namespace vnmix {

struct GnsBlock {
  std::size_t n = 0;             // block dimension
  std::size_t rank = 0;          // r_i
  std::vector<double> weights;   // λ_k > 0, descending
  Matrix eigvecs;                // n × r, columns e_k
  std::vector<cplx> cyclic;      // ξ_i, length n·r

  std::size_t carrier_dim() const { return n * rank; }
  Matrix represent(const Matrix& x) const { return kron(x, Matrix::identity(rank)); }
  Matrix commutant(const Matrix& y) const { return kron(Matrix::identity(n), y); }
  std::vector<Matrix> commutant_basis() const {
    std::vector<Matrix> b;
    for (const auto& h : hermitian_basis(rank)) b.push_back(commutant(h));
    return b;
  }
  cplx vector_state(const Matrix& op) const { return dot(cyclic, matvec(op, cyclic)); }
};

struct GnsData {
  AlgebraSpec source;
  std::vector<GnsBlock> blocks;
  Ideal kernel_ideal;  // blocks with r_i = 0

  std::vector<std::size_t> block_ranks() const {
    std::vector<std::size_t> r;
    for (const auto& b : blocks) r.push_back(b.rank);
    return r;
  }
  std::size_t carrier_dim() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += b.carrier_dim();
    return s;
  }
  // ⟨π(x)ξ, ξ⟩
  cplx vector_state(const Element& x) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].rank > 0) s += blocks[i].vector_state(blocks[i].represent(x.block(i)));
    return s;
  }
};

inline GnsData gns(const Functional& w, const Tolerances& tol = {}) {
  if (!w.is_state(tol.eig)) throw Error("gns: input must be a state");
  GnsData g;
  g.source = w.algebra();
  std::vector<bool> kernel;
  for (std::size_t i = 0; i < w.algebra().blocks(); ++i) {
    GnsBlock b;
    b.n = w.algebra().dim(i);
    const auto es = numerics::eigh_hermitian(w.density(i));
    const double cut = tol.eig * std::max(1.0, std::abs(es.values.front()));
    for (std::size_t k = 0; k < es.values.size(); ++k)
      if (es.values[k] > cut) b.weights.push_back(es.values[k]);
    b.rank = b.weights.size();
    b.eigvecs = Matrix(b.n, b.rank);
    for (std::size_t a = 0; a < b.n; ++a)
      for (std::size_t k = 0; k < b.rank; ++k) b.eigvecs(a, k) = es.vectors(a, k);
    b.cyclic.assign(b.n * b.rank, 0.0);
    for (std::size_t a = 0; a < b.n; ++a)
      for (std::size_t k = 0; k < b.rank; ++k) b.cyclic[a * b.rank + k] = std::sqrt(b.weights[k]) * b.eigvecs(a, k);
    kernel.push_back(b.rank == 0);
    g.blocks.push_back(std::move(b));
  }
  g.kernel_ideal = Ideal(w.algebra(), kernel);
  return g;
}

// Numerical rank of {π(x)ξ : x ∈ A} on each block; equals n_i·r_i when ξ is cyclic.
inline std::vector<std::size_t> cyclic_span_ranks(const GnsData& g) {
  std::vector<std::size_t> ranks;
  for (const auto& b : g.blocks) {
    const auto d = b.carrier_dim();
    if (d == 0) {
      ranks.push_back(0);
      continue;
    }
    Matrix gram(d, d);
    for (std::size_t p = 0; p < b.n; ++p)
      for (std::size_t q = 0; q < b.n; ++q) {
        const auto v = matvec(b.represent(Matrix::unit(b.n, p, q)), b.cyclic);
        gram += outer(v, v);
      }
    const auto es = numerics::eigh_hermitian(gram);
    std::size_t r = 0;
    for (double x : es.values)
      if (x > 1e-10 * std::max(1.0, es.values.front())) ++r;
    ranks.push_back(r);
  }
  return ranks;
}

struct ExtensionCertificate {
  std::vector<Matrix> density;     // T_i on each carrier block (empty when r_i = 0)
  double algebra_residual = 0.0;   // max |tr(T π(x)) - ρ(x)| over a hermitian basis
  double commutant_residual = 0.0; // max |tr(T y) - ⟨yξ, ξ⟩| over a hermitian basis
  double min_eigenvalue = 0.0;
  int iterations = 0;
};

struct ExtensionOutcome {
  numerics::Feasibility status = numerics::Feasibility::indeterminate;
  std::optional<ExtensionCertificate> certificate;
  GnsData gns;
  std::string explanation;
};

inline numerics::FeasibilityOptions feasibility_options(const Tolerances& tol) {
  numerics::FeasibilityOptions o;
  o.tolerance = tol.feas;
  return o;
}

inline ExtensionOutcome extension_feasible(const Functional& w, const Functional& r, const Tolerances& tol = {}) {
  require_same(w.algebra(), r.algebra());
  if (!r.is_state(tol.eig)) throw Error("extension_feasible: rho must be a state");
  ExtensionOutcome out;
  out.gns = gns(w, tol);
  const auto& g = out.gns;

  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    if (g.blocks[i].rank == 0 && r.density(i).max_abs() > tol.feas) {
      out.status = numerics::Feasibility::infeasible;
      out.explanation = "rho does not annihilate the kernel of the GNS representation (block " +
                        std::to_string(i + 1) + " has no omega-mass)";
      return out;
    }
  }

  ExtensionCertificate cert;
  int iterations = 0;
  cert.min_eigenvalue = INFINITY;
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const auto& b = g.blocks[i];
    if (b.rank == 0) {
      cert.density.emplace_back();
      continue;
    }
    numerics::FeasibilityProblem prob;
    prob.dimension = b.carrier_dim();
    prob.options = feasibility_options(tol);
    for (const auto& h : hermitian_basis(b.n))
      prob.constraints.push_back({b.represent(h), trace_product(r.density(i), h).real()});
    for (const auto& y : b.commutant_basis()) prob.constraints.push_back({y, b.vector_state(y).real()});

    const auto res = numerics::solve_feasibility(prob);
    iterations += res.iterations;
    if (res.status != numerics::Feasibility::feasible) {
      out.status = res.status;
      out.explanation = "block " + std::to_string(i + 1) + ": " + res.detail +
                        (res.algebraic ? " (rho and omega assign different mass to this block)" : "");
      return out;
    }
    const Matrix& t = *res.point;
    for (const auto& h : hermitian_basis(b.n))
      cert.algebra_residual = std::max(cert.algebra_residual,
                                       std::abs(trace_product(t, b.represent(h)).real() -
                                                trace_product(r.density(i), h).real()));
    for (const auto& y : b.commutant_basis())
      cert.commutant_residual =
          std::max(cert.commutant_residual, std::abs(trace_product(t, y).real() - b.vector_state(y).real()));
    cert.min_eigenvalue = std::min(cert.min_eigenvalue, res.min_eigenvalue);
    cert.density.push_back(t);
  }
  cert.iterations = iterations;
  out.status = numerics::Feasibility::feasible;
  out.certificate = std::move(cert);
  out.explanation = "found a density on the GNS carrier extending rho and agreeing with omega on the commutant";
  return out;
}

struct ExactChannel {
  KrausMap channel;
  std::size_t multiplicity = 0;        // purification size k
  double isometry_residual = 0.0;      // ||u*u - P_[R'ξ]||
  double cyclic_residual = 0.0;        // ||uξ - η||
  double intertwining_residual = 0.0;  // max ||u y - y^(k) u||
  double raw_unitality_residual = 0.0; // before the final renormalization
  double unitality_residual = 0.0;
  double composition_residual = 0.0;   // max |ω(φ(x)) - ρ(x)| over a unit basis
};

inline double composition_residual(const KrausMap& phi, const Functional& w, const Functional& r) {
  double m = 0.0;
  const auto& a = w.algebra();
  for (std::size_t i = 0; i < a.blocks(); ++i)
    for (const auto& h : hermitian_basis(a.dim(i))) {
      const auto x = Element::on_block(a, i, h);
      m = std::max(m, std::abs(evaluate(w, apply_kraus(phi, x)) - evaluate(r, x)));
    }
  return m;
}

inline ExactChannel construct_exact_channel(const Functional& w, const Functional& r, const ExtensionOutcome& ext,
                                            const Tolerances& tol = {}) {
  if (ext.status != numerics::Feasibility::feasible || !ext.certificate)
    throw Error("construct_exact_channel: no extension certificate (" + ext.explanation + ")");
  const auto& g = ext.gns;
  const auto& alg = w.algebra();
  ExactChannel out;

  // per block, the Kraus components a_{j,i} (n_i × n_i)
  std::vector<std::vector<Matrix>> comps(alg.blocks());
  for (std::size_t i = 0; i < alg.blocks(); ++i) {
    const auto& b = g.blocks[i];
    if (b.rank == 0) continue;
    const auto d = b.carrier_dim();
    const Matrix& t = ext.certificate->density[i];

    // purification: η_j = √t_j w_j
    const auto es = numerics::eigh_hermitian(t);
    const double cut = tol.eig * std::max(1.0, es.values.front());
    std::vector<std::vector<cplx>> eta;
    for (std::size_t j = 0; j < es.values.size() && es.values[j] > cut; ++j) {
      auto v = column(es.vectors, j);
      for (auto& c : v) c *= std::sqrt(es.values[j]);
      eta.push_back(std::move(v));
    }
    out.multiplicity = std::max(out.multiplicity, eta.size());

    // [R'ξ] spanned by (1 ⊗ E_ab)ξ; columns of V, images y^(k)η in Y_j
    const std::size_t r2 = b.rank * b.rank;
    std::vector<Matrix> units;
    for (std::size_t a = 0; a < b.rank; ++a)
      for (std::size_t c = 0; c < b.rank; ++c) units.push_back(b.commutant(Matrix::unit(b.rank, a, c)));
    Matrix vmat(d, r2);
    std::vector<Matrix> ymat(eta.size(), Matrix(d, r2));
    for (std::size_t col = 0; col < r2; ++col) {
      const auto v = matvec(units[col], b.cyclic);
      for (std::size_t row = 0; row < d; ++row) vmat(row, col) = v[row];
      for (std::size_t j = 0; j < eta.size(); ++j) {
        const auto y = matvec(units[col], eta[j]);
        for (std::size_t row = 0; row < d; ++row) ymat[j](row, col) = y[row];
      }
    }
    const Matrix gram_pinv = numerics::pinv_hermitian(vmat.adjoint() * vmat, 1e-12);
    const Matrix right = gram_pinv * vmat.adjoint();
    const Matrix range_proj = vmat * right;

    std::vector<Matrix> u;
    for (const auto& y : ymat) u.push_back(y * right);

    Matrix utu(d, d);
    for (const auto& uj : u) utu += uj.adjoint() * uj;
    out.isometry_residual = std::max(out.isometry_residual, (utu - range_proj).max_abs());
    for (std::size_t j = 0; j < u.size(); ++j) {
      const auto ux = matvec(u[j], b.cyclic);
      for (std::size_t row = 0; row < d; ++row)
        out.cyclic_residual = std::max(out.cyclic_residual, std::abs(ux[row] - eta[j][row]));
    }
    for (const auto& y : units)
      for (const auto& uj : u) out.intertwining_residual = std::max(out.intertwining_residual, (uj * y - y * uj).max_abs());

    // u_j ∈ π(A) = M_n ⊗ 1: pull back by the normalized partial trace
    for (const auto& uj : u)
      comps[i].push_back(partial_trace_fast(uj, b.n, b.rank) * (1.0 / static_cast<double>(b.rank)));
  }
  if (out.intertwining_residual > 1e-6)
    throw Error("purification inconsistent: intertwining residual " + std::to_string(out.intertwining_residual));

  // support correction φ(x) = Σ p a_j* x a_j p + p⊥ x p⊥
  const Element p = support_projection(w, tol);
  std::vector<Element> kraus;
  for (std::size_t j = 0; j < out.multiplicity; ++j) {
    Element a = Element::zero(alg);
    for (std::size_t i = 0; i < alg.blocks(); ++i)
      if (j < comps[i].size()) a.block(i) = comps[i][j] * p.block(i);
    kraus.push_back(std::move(a));
  }
  {
    auto k = kraus;
    k.push_back(Element::identity(alg) - p);
    out.raw_unitality_residual = KrausMap(alg, std::move(k)).unitality_residual();
  }
  // Σ p a_j* a_j p equals p up to the feasibility residual; rescale on the
  // range of p so the channel is unital to rounding.
  {
    Element s = Element::zero(alg);
    for (const auto& a : kraus) s += a.adjoint() * a;
    std::vector<Matrix> fix;
    for (const auto& sb : s.blocks())
      fix.push_back(numerics::spectral_apply(sb.hermitian_part(), [](double x) { return x > 0.5 ? 1.0 / std::sqrt(x) : 0.0; }));
    const Element f(alg, std::move(fix));
    for (auto& a : kraus) a = a * f;
  }
  kraus.push_back(Element::identity(alg) - p);
  out.channel = KrausMap(alg, std::move(kraus));
  out.unitality_residual = out.channel.unitality_residual();
  out.composition_residual = composition_residual(out.channel, w, r);
  return out;
}

inline ExactChannel construct_exact_channel(const Functional& w, const Functional& r, const Tolerances& tol = {}) {
  return construct_exact_channel(w, r, extension_feasible(w, r, tol), tol);
}

}  // namespace vnmix

#endif  // VNMIX_EXACT_CHANNEL_HPP
