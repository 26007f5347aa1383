#pragma once

#include <iostream>
#include <numeric>
#include <vector>

#include "dklm/bootstrap.hpp"
#include "dklm/spectral.hpp"

namespace dklm {

/// Learned similarity kernel. `xi` is the diagonal-dominance margin the
/// construction put on every row: K_ii - sum_{j != i} K_ij == xi.
struct KernelMatrix {
  SymMatrix k;
  double xi = 0.0;

  Index n() const { return k.n(); }
  const Matrix& mat() const { return k.mat(); }
};

/// Data-driven kernel from the normalized affinity:
///   K_ij = exp(G_ij - 2 max(G))                      for i != j
///   K_ii = sum_{q != i} exp(G_iq - 2 max(G)) + xi
inline KernelMatrix learn_kernel(const NormalizedAffinity& g, double xi) {
  if (!(xi > 0.0 && xi < 1.0)) {
    throw ParameterError("learn_kernel: xi must lie in (0, 1)");
  }
  const Index n = g.g.n();
  const double m = g.max_entry;
  Matrix k = (g.g.mat().array() - 2.0 * m).exp().matrix();
  Vector offdiag_sums = k.rowwise().sum() - k.diagonal();
  k.diagonal() = offdiag_sums.array() + xi;
  return {SymMatrix(k), xi};
}

/// Outcome of checking the three kernel conditions plus the measured
/// worst-row dominance margin min_i (K_ii - sum_{j != i} |K_ij|).
struct ValidationReport {
  bool nonnegative = false;
  bool symmetric = false;
  bool positive_semidefinite = false;
  double min_entry = 0.0;
  double min_eigenvalue = 0.0;
  double dominance_margin = 0.0;

  bool all_pass() const { return nonnegative && symmetric && positive_semidefinite; }
};

inline ValidationReport validate_kernel(const KernelMatrix& k,
                                        double psd_tol = 1e-8) {
  ValidationReport r;
  const Matrix& m = k.mat();
  const Index n = k.n();
  r.min_entry = m.size() > 0 ? m.minCoeff() : 0.0;
  r.nonnegative = r.min_entry >= 0.0;
  r.symmetric = true;  // SymMatrix enforces this at construction
  if (n == 0) {
    r.positive_semidefinite = true;
  } else if (n <= 600) {
    r.min_eigenvalue = min_eigenvalue(k.k);
    r.positive_semidefinite = r.min_eigenvalue >= -psd_tol;
  } else {
    // Cholesky of K + tol I certifies the eigenvalue bound; the reported
    // min_eigenvalue is then a shift-invert estimate.
    Eigen::LLT<Matrix> llt(m + psd_tol * Matrix::Identity(n, n));
    r.positive_semidefinite = llt.info() == Eigen::Success;
    r.min_eigenvalue = min_eigenvalue(k.k);
  }
  Vector margins = m.diagonal() - (m.cwiseAbs().rowwise().sum() - m.diagonal().cwiseAbs());
  r.dominance_margin = n > 0 ? margins.minCoeff() : 0.0;
  return r;
}

/// One failing multiplicative-triangle triple: K(i,j) < K(i,l) * K(l,j).
struct TriangleViolation {
  Index i, l, j;
  double lhs, rhs;
};

/// Exhaustive check of K_ij >= K_il * K_lj over all ordered triples of
/// distinct indices. Returns the violating triples (empty for any kernel
/// built by learn_kernel).
inline std::vector<TriangleViolation> check_mult_triangle(const KernelMatrix& k,
                                                          double slack = 1e-12) {
  std::vector<TriangleViolation> out;
  const Matrix& m = k.mat();
  const Index n = k.n();
  for (Index i = 0; i < n; ++i) {
    for (Index l = 0; l < n; ++l) {
      if (l == i) continue;
      for (Index j = 0; j < n; ++j) {
        if (j == i || j == l) continue;
        double lhs = m(i, j);
        double rhs = m(i, l) * m(l, j);
        if (lhs < rhs - slack) out.push_back({i, l, j, lhs, rhs});
      }
    }
  }
  return out;
}

/// How the diagonal shift rho of the Nystrom assembly is chosen.
struct RhoPolicy {
  enum class Kind { adaptive, fixed };
  Kind kind = Kind::adaptive;
  double value = 0.0;

  static RhoPolicy adaptive() { return {Kind::adaptive, 0.0}; }
  static RhoPolicy fixed(double v) { return {Kind::fixed, v}; }
};

/// Low-rank kernel approximation state: the N x Q cross block, the Q x Q
/// sampled block, the diagonal shift and the sampled column indices.
struct NystromKernel {
  Matrix k_nq;
  Matrix k_qq;
  double rho = 0.0;
  double xi = 0.0;
  std::vector<Index> sample_indices;
};

namespace detail {

// N x Q column restriction of the learn_kernel formula; rows belonging to
// sampled indices carry the full-formula diagonal entry.
inline Matrix kernel_block(const NormalizedAffinity& g, double xi,
                           const std::vector<Index>& cols) {
  const Index n = g.g.n();
  const double m = g.max_entry;
  Matrix e = (g.g.mat().array() - 2.0 * m).exp().matrix();
  Vector offdiag_sums = e.rowwise().sum() - e.diagonal();
  Matrix block(n, static_cast<Index>(cols.size()));
  for (size_t jj = 0; jj < cols.size(); ++jj) {
    block.col(static_cast<Index>(jj)) = e.col(cols[jj]);
    block(cols[jj], static_cast<Index>(jj)) = offdiag_sums(cols[jj]) + xi;
  }
  return block;
}

// Proportional per-group quotas via largest remainder.
inline std::vector<Index> group_quotas(const std::vector<Index>& sizes, Index q,
                                       Index n) {
  std::vector<Index> base(sizes.size());
  std::vector<std::pair<double, size_t>> rema(sizes.size());
  Index assigned = 0;
  for (size_t gi = 0; gi < sizes.size(); ++gi) {
    double quota = double(sizes[gi]) * double(q) / double(n);
    base[gi] = std::min<Index>(static_cast<Index>(quota), sizes[gi]);
    assigned += base[gi];
    rema[gi] = {quota - double(base[gi]), gi};
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (size_t ri = 0; assigned < q && ri < rema.size(); ++ri) {
    size_t gi = rema[ri].second;
    if (base[gi] < sizes[gi]) {
      ++base[gi];
      ++assigned;
    }
  }
  // leftover capacity (some groups saturated): round-robin over the rest
  for (size_t gi = 0; assigned < q && gi < base.size(); ++gi) {
    while (base[gi] < sizes[gi] && assigned < q) {
      ++base[gi];
      ++assigned;
    }
  }
  return base;
}

// K_tilde K_hat^{-1} K_tilde^T, with a trace-scaled ridge when K_hat is
// numerically singular.
inline Matrix assemble_low_rank(const NystromKernel& nk);

}  // namespace detail

/// Nystrom sampling and block construction. Preliminary groups come from
/// spectral clustering of the bootstrap affinity; each group contributes
/// proportionally many samples, nearest to its embedding centroid first.
inline NystromKernel nystrom_approx(const Matrix& /*x*/, const SelfRepMatrix& z_boot,
                                    Index q, double xi,
                                    RhoPolicy rho_policy = RhoPolicy::adaptive(),
                                    Index groups = 2, std::uint64_t seed = 0) {
  const Index n = z_boot.n();
  if (q < 2 || q > n) {
    throw ParameterError("nystrom_approx: q must lie in [2, N]");
  }
  if (groups < 1) throw ParameterError("nystrom_approx: groups must be >= 1");
  SymMatrix w = build_affinity(z_boot);
  NormalizedAffinity g = normalize_degree(w);

  std::vector<Index> selected;
  if (q == n) {
    selected.resize(n);
    std::iota(selected.begin(), selected.end(), Index{0});
  } else {
    SpectralEmbedding emb = spectral_embed(w, groups);
    LabelVector labels = kmeans_embedding(emb, groups, seed);
    std::vector<std::vector<Index>> members(static_cast<size_t>(groups));
    for (Index i = 0; i < n; ++i) members[labels.labels[i]].push_back(i);
    std::vector<Index> sizes;
    for (auto& m : members) sizes.push_back(static_cast<Index>(m.size()));
    std::vector<Index> quota = detail::group_quotas(sizes, q, n);
    for (size_t gi = 0; gi < members.size(); ++gi) {
      if (members[gi].empty() || quota[gi] == 0) continue;
      Vector centroid = Vector::Zero(emb.rows.cols());
      for (Index i : members[gi]) centroid += emb.rows.row(i).transpose();
      centroid /= double(members[gi].size());
      std::vector<std::pair<double, Index>> ranked;
      for (Index i : members[gi]) {
        ranked.push_back({(emb.rows.row(i).transpose() - centroid).norm(), i});
      }
      std::sort(ranked.begin(), ranked.end());
      for (Index t = 0; t < quota[gi]; ++t) selected.push_back(ranked[t].second);
    }
    std::sort(selected.begin(), selected.end());
  }

  NystromKernel nk;
  nk.xi = xi;
  nk.sample_indices = selected;
  nk.k_nq = detail::kernel_block(g, xi, selected);
  nk.k_qq.resize(q, q);
  for (Index r = 0; r < q; ++r) nk.k_qq.row(r) = nk.k_nq.row(selected[r]);

  // rho per policy, using the assembled low-rank part
  if (rho_policy.kind == RhoPolicy::Kind::fixed) {
    nk.rho = rho_policy.value;
  } else {
    Matrix low = detail::assemble_low_rank(nk);
    double lmin = min_eigenvalue(SymMatrix(low));
    nk.rho = std::max(0.0, -lmin) + 1e-8;
  }
  return nk;
}

namespace detail {

inline Matrix assemble_low_rank(const NystromKernel& nk) {
  const Index q = nk.k_qq.rows();
  SymMatrix khat(nk.k_qq);
  Matrix cross;
  try {
    cross = solve_spd(khat, nk.k_nq.transpose());
  } catch (const SingularityError&) {
    double ridge = 1e-10 * std::max(1.0, nk.k_qq.trace());
    std::cerr << "[dklm] warning: sampled kernel block numerically singular, "
                 "adding ridge "
              << ridge << "\n";
    SymMatrix reg(nk.k_qq + ridge * Matrix::Identity(q, q));
    cross = solve_spd(reg, nk.k_nq.transpose());
  }
  Matrix m = nk.k_nq * cross;
  return 0.5 * (m + m.transpose());
}

}  // namespace detail

/// Dense N x N kernel K* = K_tilde K_hat^{-1} K_tilde^T + rho I, symmetrized.
inline KernelMatrix assemble_nystrom(const NystromKernel& nk) {
  Matrix m = detail::assemble_low_rank(nk);
  m.diagonal().array() += nk.rho;
  return {SymMatrix(m), nk.xi};
}

}  // namespace dklm
