#include <catch_amalgamated.hpp>
#include <functional>
#include <map>
#include <random>

#include "dklm/spectral.hpp"

using namespace dklm;

namespace {

Matrix two_blocks(Index a, Index b) {
  Matrix c = Matrix::Zero(a + b, a + b);
  c.topLeftCorner(a, a).setOnes();
  c.bottomRightCorner(b, b).setOnes();
  c.diagonal().setZero();
  return c;
}

Matrix permutation(Index n, std::uint64_t seed) {
  std::vector<Index> p(n);
  std::iota(p.begin(), p.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  Matrix pm = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) pm(p[i], i) = 1.0;
  return pm;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, bwd;
  for (size_t i = 0; i < a.size(); ++i) {
    auto [it, inserted] = fwd.try_emplace(a[i], b[i]);
    if (!inserted && it->second != b[i]) return false;
    auto [jt, jnew] = bwd.try_emplace(b[i], a[i]);
    if (!jnew && jt->second != a[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("affinity_from_z clamps, symmetrizes, zeroes diagonal", "[spectral]") {
  Matrix z(3, 3);
  z << 1.0, 0.4, -2.0, 0.8, 1.0, 0.5, -2.0, 0.1, 1.0;
  SymMatrix w = affinity_from_z(z);
  CHECK(w(0, 1) == Catch::Approx(0.6));
  CHECK(w(0, 2) == 0.0);  // negative average clamps
  CHECK(w(1, 2) == Catch::Approx(0.3));
  CHECK(w.mat().diagonal().cwiseAbs().maxCoeff() == 0.0);

  Matrix sym = two_blocks(2, 2);
  CHECK((affinity_from_z(sym).mat() - sym).cwiseAbs().maxCoeff() == 0.0);
  CHECK(affinity_from_z(Matrix::Zero(3, 3)).mat().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral_cluster separates two planted blocks", "[spectral]") {
  SymMatrix w(two_blocks(6, 5));
  LabelVector labels = spectral_cluster(w, 2, 42);
  REQUIRE(labels.size() == 11);
  for (Index i = 1; i < 6; ++i) CHECK(labels.labels[i] == labels.labels[0]);
  for (Index i = 7; i < 11; ++i) CHECK(labels.labels[i] == labels.labels[6]);
  CHECK(labels.labels[0] != labels.labels[6]);
}

TEST_CASE("spectral_cluster k=1 and k>N", "[spectral]") {
  SymMatrix w(two_blocks(3, 3));
  LabelVector one = spectral_cluster(w, 1, 0);
  for (int lab : one.labels) CHECK(lab == 0);
  CHECK_THROWS_AS(spectral_cluster(w, 7, 0), ParameterError);
}

TEST_CASE("spectral_cluster recovers three planted cliques", "[spectral]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  const Index sizes[3] = {8, 6, 7};
  const Index n = 21;
  Matrix w = Matrix::Zero(n, n);
  Index off = 0;
  std::vector<int> truth(n);
  for (int b = 0; b < 3; ++b) {
    for (Index i = off; i < off + sizes[b]; ++i) {
      truth[static_cast<size_t>(i)] = b;
      for (Index j = i + 1; j < off + sizes[b]; ++j) {
        w(i, j) = w(j, i) = u(rng);
      }
    }
    off += sizes[b];
  }
  LabelVector labels = spectral_cluster(SymMatrix(w), 3, 11);

  // union-find oracle over the positive edges
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  std::function<Index(Index)> find = [&](Index a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (w(i, j) > 0) {
        Index ra = find(i), rb = find(j);
        if (ra != rb) parent[rb] = ra;
      }
    }
  }
  std::vector<int> oracle(n);
  for (Index i = 0; i < n; ++i) oracle[static_cast<size_t>(i)] = static_cast<int>(find(i));
  CHECK(same_partition(labels.labels, oracle));
}

TEST_CASE("spectral_cluster deterministic for fixed inputs", "[spectral]") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix w = Matrix::Zero(15, 15);
  for (Index i = 0; i < 15; ++i) {
    for (Index j = i + 1; j < 15; ++j) w(i, j) = w(j, i) = u(rng);
  }
  LabelVector a = spectral_cluster(SymMatrix(w), 3, 99);
  LabelVector b = spectral_cluster(SymMatrix(w), 3, 99);
  CHECK(a.labels == b.labels);
}

TEST_CASE("spectral_cluster label permutation equivariance", "[spectral]") {
  SymMatrix w(two_blocks(7, 6));
  Matrix p = permutation(13, 3);
  LabelVector base = spectral_cluster(w, 2, 5);
  LabelVector perm =
      spectral_cluster(SymMatrix(Matrix(p.transpose() * w.mat() * p)), 2, 5);
  // map base labels through the permutation and compare partitions
  std::vector<int> mapped(13);
  for (Index i = 0; i < 13; ++i) {
    for (Index j = 0; j < 13; ++j) {
      if (p(j, i) == 1.0) mapped[static_cast<size_t>(i)] = base.labels[static_cast<size_t>(j)];
    }
  }
  CHECK(same_partition(perm.labels, mapped));
}

TEST_CASE("count_components basics", "[spectral]") {
  SymMatrix blocks(two_blocks(4, 3));
  CHECK(count_components(blocks, 1e-3) == 2);
  CHECK(laplacian_zero_multiplicity(blocks, 1e-3) == 2);

  Matrix full = Matrix::Ones(5, 5);
  full.diagonal().setZero();
  CHECK(count_components(SymMatrix(full), 1e-3) == 1);

  // threshold cuts weak edges
  Matrix weak = two_blocks(3, 3);
  weak(0, 5) = weak(5, 0) = 1e-5;
  CHECK(count_components(SymMatrix(weak), 1e-3) == 2);
  CHECK(count_components(SymMatrix(weak), 1e-6) == 1);
}

TEST_CASE("component count equals Laplacian zero multiplicity", "[spectral]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::uniform_int_distribution<int> nblocks(1, 6);
  for (int trial = 0; trial < 25; ++trial) {
    int b = nblocks(rng);
    std::vector<Index> sizes;
    Index n = 0;
    for (int i = 0; i < b; ++i) {
      Index s = 2 + static_cast<Index>(rng() % 5);
      sizes.push_back(s);
      n += s;
    }
    Matrix w = Matrix::Zero(n, n);
    Index off = 0;
    for (Index s : sizes) {
      for (Index i = off; i < off + s; ++i) {
        for (Index j = i + 1; j < off + s; ++j) w(i, j) = w(j, i) = u(rng);
      }
      off += s;
    }
    SymMatrix sm(w);
    CHECK(count_components(sm, 1e-3) == b);
    CHECK(laplacian_zero_multiplicity(sm, 1e-3) == b);
  }
}
