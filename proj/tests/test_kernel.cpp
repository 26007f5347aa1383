#include <catch_amalgamated.hpp>
#include <random>

#include "dklm/kernel.hpp"

using namespace dklm;

namespace {

// Bootstrap-shaped random affinity: symmetric, nonnegative, zero diagonal.
NormalizedAffinity random_g(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
  }
  return normalize_degree(SymMatrix(w));
}

NormalizedAffinity affinity_of(const Matrix& g_entries) {
  NormalizedAffinity g{SymMatrix(g_entries), 0.0};
  g.max_entry = g_entries.size() > 0 ? g_entries.maxCoeff() : 0.0;
  return g;
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

}  // namespace

TEST_CASE("learn_kernel hand-checked 2x2", "[kernel]") {
  Matrix g(2, 2);
  g << 0.0, 1.0, 1.0, 0.0;
  KernelMatrix k = learn_kernel(affinity_of(g), 0.1);
  CHECK(k.mat()(0, 1) == Catch::Approx(std::exp(-1.0)));
  CHECK(k.mat()(0, 1) == Catch::Approx(0.36788).epsilon(1e-4));
  CHECK(k.mat()(0, 0) == Catch::Approx(std::exp(-1.0) + 0.1));
  CHECK(k.mat()(1, 1) == Catch::Approx(0.46788).epsilon(1e-4));
}

TEST_CASE("learn_kernel zero-G case", "[kernel]") {
  KernelMatrix k = learn_kernel(affinity_of(Matrix::Zero(3, 3)), 0.5);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      if (i == j) {
        CHECK(k.mat()(i, j) == Catch::Approx(2.5));
      } else {
        CHECK(k.mat()(i, j) == Catch::Approx(1.0));
      }
    }
  }
}

TEST_CASE("learn_kernel rejects xi outside (0,1)", "[kernel]") {
  NormalizedAffinity g = random_g(4, 1);
  CHECK_THROWS_AS(learn_kernel(g, 0.0), ParameterError);
  CHECK_THROWS_AS(learn_kernel(g, 1.0), ParameterError);
  CHECK_THROWS_AS(learn_kernel(g, -0.2), ParameterError);
}

TEST_CASE("dominance identity holds exactly", "[kernel]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Index n = 3 + static_cast<Index>(s * 3);
    double xi = 0.05 + 0.09 * double(s);
    KernelMatrix k = learn_kernel(random_g(n, 40 + s), xi);
    for (Index i = 0; i < n; ++i) {
      double offsum = k.mat().row(i).sum() - k.mat()(i, i);
      CHECK(std::abs(k.mat()(i, i) - offsum - xi) < 1e-12);
    }
  }
}

TEST_CASE("validate_kernel passes on learned kernels", "[kernel]") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    KernelMatrix k = learn_kernel(random_g(12 + 5 * static_cast<Index>(s), 60 + s), 0.1);
    ValidationReport r = validate_kernel(k);
    CHECK(r.nonnegative);
    CHECK(r.symmetric);
    CHECK(r.positive_semidefinite);
    CHECK(r.min_eigenvalue >= -1e-8);
    CHECK(r.dominance_margin == Catch::Approx(0.1).margin(1e-10));
    CHECK(r.all_pass());
  }
}

TEST_CASE("validate_kernel flags a negative entry", "[kernel]") {
  Matrix m(2, 2);
  m << 1.0, -0.5, -0.5, 1.0;
  ValidationReport r = validate_kernel({SymMatrix(m), 0.0});
  CHECK_FALSE(r.nonnegative);
  CHECK(r.symmetric);
  CHECK(r.positive_semidefinite);
  CHECK_FALSE(r.all_pass());

  ValidationReport id = validate_kernel({SymMatrix(Matrix::Identity(3, 3)), 0.0});
  CHECK(id.all_pass());
}

TEST_CASE("multiplicative triangle inequality on learned kernels", "[kernel]") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    Index n = 5 + static_cast<Index>(s * 10);
    KernelMatrix k = learn_kernel(random_g(n, 80 + s), 0.1);
    CHECK(check_mult_triangle(k).empty());
  }
}

TEST_CASE("triangle check is vacuous for n=2 and catches a violation", "[kernel]") {
  KernelMatrix k2 = learn_kernel(random_g(2, 5), 0.1);
  CHECK(check_mult_triangle(k2).empty());

  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = m(1, 0) = 0.1;
  m(0, 2) = m(2, 0) = 0.9;
  m(2, 1) = m(1, 2) = 0.9;
  auto violations = check_mult_triangle({SymMatrix(m), 0.0});
  REQUIRE_FALSE(violations.empty());
  bool found = false;
  for (const auto& v : violations) {
    if (v.i == 0 && v.l == 2 && v.j == 1) found = true;
  }
  CHECK(found);  // K(0,1)=0.1 < K(0,2)*K(2,1)=0.81
}

TEST_CASE("kernel monotone in G for fixed max", "[kernel]") {
  Matrix g = Matrix::Zero(4, 4);
  auto set = [&](Index i, Index j, double v) { g(i, j) = g(j, i) = v; };
  set(0, 1, 0.9);  // pins max(G)
  set(0, 2, 0.2);
  set(1, 3, 0.5);
  KernelMatrix a = learn_kernel(affinity_of(g), 0.1);
  set(0, 2, 0.4);  // raise one entry below the max
  KernelMatrix b = learn_kernel(affinity_of(g), 0.1);
  CHECK(b.mat()(0, 2) > a.mat()(0, 2));
  CHECK(b.mat()(0, 1) == Catch::Approx(a.mat()(0, 1)));
}

TEST_CASE("learn_kernel permutation equivariance", "[kernel]") {
  NormalizedAffinity g = random_g(9, 91);
  Matrix p = permutation(9, 92);
  KernelMatrix direct =
      learn_kernel(affinity_of(Matrix(p.transpose() * g.g.mat() * p)), 0.1);
  KernelMatrix mapped = learn_kernel(g, 0.1);
  Matrix expected = p.transpose() * mapped.mat() * p;
  CHECK((direct.mat() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

namespace {

SelfRepMatrix random_bootstrap(Index d, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix x(d, n);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < n; ++j) x(i, j) = dist(rng);
  }
  return lsr_selfrep(x, 1.0);
}

}  // namespace

TEST_CASE("nystrom full sampling reproduces the dense kernel", "[kernel][nystrom]") {
  SelfRepMatrix zb = random_bootstrap(3, 24, 7);
  Matrix x = Matrix::Zero(3, 24);
  NystromKernel nk = nystrom_approx(x, zb, 24, 0.1, RhoPolicy::adaptive(), 2, 0);
  KernelMatrix assembled = assemble_nystrom(nk);
  KernelMatrix dense = learn_kernel(normalize_degree(build_affinity(zb)), 0.1);
  Matrix expected = dense.mat() + nk.rho * Matrix::Identity(24, 24);
  CHECK((assembled.mat() - expected).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(nk.sample_indices.size() == 24);
}

TEST_CASE("nystrom sampled block is the row restriction", "[kernel][nystrom]") {
  SelfRepMatrix zb = random_bootstrap(4, 30, 11);
  NystromKernel nk = nystrom_approx(Matrix::Zero(4, 30), zb, 10, 0.1,
                                    RhoPolicy::adaptive(), 3, 5);
  REQUIRE(nk.sample_indices.size() == 10);
  for (Index r = 0; r < 10; ++r) {
    CHECK((nk.k_qq.row(r) - nk.k_nq.row(nk.sample_indices[static_cast<size_t>(r)]))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("assembled nystrom kernel is symmetric PSD", "[kernel][nystrom]") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    Index n = 20 + static_cast<Index>(s) * 8;
    Index q = 6 + static_cast<Index>(s) * 3;
    SelfRepMatrix zb = random_bootstrap(5, n, 100 + s);
    NystromKernel nk = nystrom_approx(Matrix::Zero(5, n), zb, q, 0.1,
                                      RhoPolicy::adaptive(), 2, s);
    KernelMatrix k = assemble_nystrom(nk);
    CHECK((k.mat() - k.mat().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(min_eigenvalue(k.k) >= -1e-8);
  }
}

TEST_CASE("rank-1 cross block assembles to a rank-1 kernel", "[kernel][nystrom]") {
  NystromKernel nk;
  nk.xi = 0.1;
  nk.rho = 0.0;
  nk.sample_indices = {0};
  nk.k_nq = Matrix::Ones(6, 1) * 2.0;
  nk.k_qq = Matrix::Ones(1, 1) * 2.0;
  KernelMatrix k = assemble_nystrom(nk);
  EigenPairs e = sym_eig(k.k);
  Index nonzero = 0;
  for (Index i = 0; i < 6; ++i) {
    if (std::abs(e.values(i)) > 1e-10) ++nonzero;
  }
  CHECK(nonzero == 1);
}

TEST_CASE("nystrom rejects q out of range", "[kernel][nystrom]") {
  SelfRepMatrix zb = random_bootstrap(3, 12, 5);
  CHECK_THROWS_AS(nystrom_approx(Matrix::Zero(3, 12), zb, 1, 0.1), ParameterError);
  CHECK_THROWS_AS(nystrom_approx(Matrix::Zero(3, 12), zb, 13, 0.1), ParameterError);
}

TEST_CASE("fixed rho policy is honored", "[kernel][nystrom]") {
  SelfRepMatrix zb = random_bootstrap(3, 18, 6);
  NystromKernel nk =
      nystrom_approx(Matrix::Zero(3, 18), zb, 6, 0.1, RhoPolicy::fixed(0.25), 2, 0);
  CHECK(nk.rho == 0.25);
  KernelMatrix k = assemble_nystrom(nk);
  Matrix low = k.mat() - 0.25 * Matrix::Identity(18, 18);
  CHECK(min_eigenvalue(SymMatrix(low)) >= -1e-8);
}
