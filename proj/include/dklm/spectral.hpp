#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dklm/bootstrap.hpp"
#include "dklm/numerics.hpp"

namespace dklm {

/// Cluster assignment for N points, ids in [0, k).
struct LabelVector {
  std::vector<int> labels;
  int k = 0;

  Index size() const { return static_cast<Index>(labels.size()); }
};

/// Affinity for the final clustering step: (Z + Z^T)/2 with negatives
/// clamped and the diagonal zeroed.
inline SymMatrix affinity_from_z(const Matrix& z) {
  require_finite(z, "affinity_from_z");
  Matrix w = 0.5 * (z + z.transpose());
  w = w.cwiseMax(0.0);
  w.diagonal().setZero();
  return SymMatrix(w);
}

inline SymMatrix affinity_from_z(const SelfRepMatrix& z) {
  return affinity_from_z(z.mat());
}

/// Rows of the normalized-Laplacian eigenvector embedding, unit-normalized
/// (zero rows stay zero).
struct SpectralEmbedding {
  Matrix rows;
};

inline SpectralEmbedding spectral_embed(const SymMatrix& w, Index k) {
  const Index n = w.n();
  if (k < 1 || k > n) throw ParameterError("spectral_embed: k must lie in [1, N]");
  Vector d = w.mat().rowwise().sum();
  Vector dm(n);
  for (Index i = 0; i < n; ++i) dm(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  Matrix lsym = Matrix::Identity(n, n) -
                (dm.asDiagonal() * w.mat() * dm.asDiagonal());
  EigenPairs bottom = smallest_eigs_psd(SymMatrix(lsym), k);
  Matrix rows = bottom.vectors;
  for (Index i = 0; i < n; ++i) {
    double nrm = rows.row(i).norm();
    if (nrm > 0.0) rows.row(i) /= nrm;
  }
  return {rows};
}

namespace detail {

struct KmeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

// One seeded k-means run: farthest-first init, Lloyd updates, ties to the
// lowest index, empty clusters re-seeded from the farthest point.
inline KmeansResult kmeans_once(const Matrix& pts, Index k, std::uint64_t seed) {
  const Index n = pts.rows();
  std::mt19937_64 rng(seed);
  std::vector<Index> centers_idx;
  centers_idx.push_back(std::uniform_int_distribution<Index>(0, n - 1)(rng));
  Vector min_d2 = (pts.rowwise() - pts.row(centers_idx[0])).rowwise().squaredNorm();
  while (static_cast<Index>(centers_idx.size()) < k) {
    Index best = 0;
    for (Index i = 1; i < n; ++i) {
      if (min_d2(i) > min_d2(best)) best = i;
    }
    centers_idx.push_back(best);
    Vector d2 = (pts.rowwise() - pts.row(best)).rowwise().squaredNorm();
    min_d2 = min_d2.cwiseMin(d2);
  }
  Matrix centers(k, pts.cols());
  for (Index c = 0; c < k; ++c) centers.row(c) = pts.row(centers_idx[c]);

  std::vector<int> labels(n, 0);
  for (int pass = 0; pass < 100; ++pass) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double bd = (pts.row(i) - centers.row(0)).squaredNorm();
      for (Index c = 1; c < k; ++c) {
        double d2 = (pts.row(i) - centers.row(c)).squaredNorm();
        if (d2 < bd) {
          bd = d2;
          best = c;
        }
      }
      if (labels[i] != static_cast<int>(best)) {
        labels[i] = static_cast<int>(best);
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, pts.cols());
    std::vector<Index> counts(k, 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += pts.row(i);
      ++counts[labels[i]];
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / double(counts[c]);
      } else {
        // farthest point from its own center takes over the empty slot
        Index far = 0;
        double fd = -1.0;
        for (Index i = 0; i < n; ++i) {
          double d2 = (pts.row(i) - centers.row(labels[i])).squaredNorm();
          if (d2 > fd) {
            fd = d2;
            far = i;
          }
        }
        centers.row(c) = pts.row(far);
        changed = true;
      }
    }
    if (!changed) break;
  }
  double inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    inertia += (pts.row(i) - centers.row(labels[i])).squaredNorm();
  }
  return {std::move(labels), inertia};
}

}  // namespace detail

/// Seeded k-means over embedding rows, 20 restarts, best inertia kept.
inline LabelVector kmeans_embedding(const SpectralEmbedding& emb, Index k,
                                    std::uint64_t seed, int restarts = 20) {
  const Index n = emb.rows.rows();
  if (k < 1 || k > n) throw ParameterError("kmeans: k must lie in [1, N]");
  detail::KmeansResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    std::uint64_t rs = seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(r + 1);
    detail::KmeansResult run = detail::kmeans_once(emb.rows, k, rs);
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      have = true;
    }
  }
  return {std::move(best.labels), static_cast<int>(k)};
}

/// Normalized-Laplacian spectral clustering of a symmetric nonnegative
/// affinity into k groups; fully deterministic for fixed (w, k, seed).
inline LabelVector spectral_cluster(const SymMatrix& w, Index k, std::uint64_t seed) {
  if (k > w.n()) throw ParameterError("spectral_cluster: k exceeds point count");
  if (k == 1) return {std::vector<int>(static_cast<size_t>(w.n()), 0), 1};
  SpectralEmbedding emb = spectral_embed(w, k);
  return kmeans_embedding(emb, k, seed);
}

namespace detail {

struct UnionFind {
  std::vector<Index> parent;

  explicit UnionFind(Index n) : parent(n) {
    for (Index i = 0; i < n; ++i) parent[i] = i;
  }
  Index find(Index a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace detail

/// Connected components of the graph whose edges are w(i,j) >= threshold,
/// by union-find.
inline Index count_components(const SymMatrix& w, double threshold) {
  const Index n = w.n();
  detail::UnionFind uf(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (w(i, j) >= threshold) uf.unite(i, j);
    }
  }
  Index count = 0;
  for (Index i = 0; i < n; ++i) {
    if (uf.find(i) == i) ++count;
  }
  return count;
}

/// Multiplicity of eigenvalue zero of the Laplacian of the thresholded
/// (binary) graph; verifier counterpart of count_components.
inline Index laplacian_zero_multiplicity(const SymMatrix& w, double threshold,
                                         double tol = 1e-6) {
  const Index n = w.n();
  Matrix adj = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && w(i, j) >= threshold) adj(i, j) = 1.0;
    }
  }
  Matrix lap = Matrix(adj.rowwise().sum().asDiagonal()) - adj;
  EigenPairs eig = sym_eig(SymMatrix(lap));
  Index count = 0;
  for (Index i = 0; i < n; ++i) {
    if (eig.values(i) < tol) ++count;
  }
  return count;
}

}  // namespace dklm
