#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "phonlat/kernels.hpp"
#include "phonlat/operators.hpp"
#include "phonlat/terms.hpp"

using namespace phonlat;
using kernels::Backend;
using kernels::CsrMatrix;
using kernels::RowMajor;
using ops::Complex;

namespace {

ops::SparseOperator random_sparse(int dim, std::mt19937& rng, double fill = 0.35) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ops::Entry> entries;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < fill)
        entries.push_back({r, c, Complex(u(rng), u(rng))});
  return ops::SparseOperator(dim, entries);
}

RowMajor random_dense(int dim, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RowMajor m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(u(rng), u(rng));
  return m;
}

RowMajor to_dense_rm(const ops::SparseOperator& op) {
  RowMajor m = RowMajor::Zero(op.dim(), op.dim());
  for (const auto& e : op.entries()) m(e.row, e.col) = e.value;
  return m;
}

}  // namespace

TEST_CASE("CSR round-trips the canonical sparse form") {
  std::mt19937 rng(11);
  for (int dim : {1, 2, 7, 23}) {
    const auto op = random_sparse(dim, rng);
    const auto csr = CsrMatrix::from_sparse(op);
    CHECK(csr.nnz() == op.nnz());
    CHECK(csr.to_sparse() == op);
  }
}

TEST_CASE("sparse-dense products match the dense reference on both backends") {
  std::mt19937 rng(22);
  for (int dim : {1, 3, 8, 24, 40}) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto A = random_sparse(dim, rng);
      const auto csr = CsrMatrix::from_sparse(A);
      const RowMajor X = random_dense(dim, rng);
      const RowMajor base = random_dense(dim, rng);
      const Complex alpha(0.3, -0.8);

      const RowMajor dense_a = to_dense_rm(A);
      const RowMajor want_left = base + alpha * (dense_a * X);
      const RowMajor want_right = base + alpha * (X * dense_a);

      for (Backend backend : {Backend::serial, Backend::openmp}) {
        RowMajor out = base;
        kernels::spmm_left_acc(alpha, csr, X, out, backend);
        CHECK((out - want_left).cwiseAbs().maxCoeff() < 1e-13);

        out = base;
        kernels::spmm_right_acc(alpha, X, csr, out, backend);
        CHECK((out - want_right).cwiseAbs().maxCoeff() < 1e-13);
      }
    }
  }
}

TEST_CASE("lindblad kernel matches the dense master-equation right-hand side") {
  const ops::CompositeSpace space({
      ops::ModeSpec{"m", ops::ModeKind::mechanical, 1.0, 0.0, 3},
      ops::ModeSpec{"x", ops::ModeKind::auxiliary, 2.0, 0.1, 2},
  });
  const int dim = static_cast<int>(space.total_dim());

  terms::TermSum h(space);
  {
    terms::Monomial free;
    free.coeff = 1.3;
    free.factors = {{0, 0, 1, 0}};
    h.add(free);
    terms::Monomial drv;
    drv.coeff = Complex(0.4, 0.2);
    drv.rotation = 2.5;
    drv.factors = {{0, 1, 0, 0}, {1, 0, 0, 1}};
    h.add_with_adjoint(drv);
  }

  const auto a0 = ops::embed(ops::annihilation(3), space, 0);
  const auto a1 = ops::embed(ops::annihilation(2), space, 1);
  const std::vector<std::pair<double, ops::SparseOperator>> channels = {
      {0.3, a0}, {0.7, a1}, {0.0, ops::embed(ops::number(3), space, 0)}};

  const auto kernel = kernels::build_kernel(h, channels);
  CHECK_FALSE(kernel.is_static());
  CHECK(kernel.rotating.size() == 2);

  std::mt19937 rng(33);
  RowMajor rho = random_dense(dim, rng);
  rho = 0.5 * (rho + rho.adjoint().eval());  // Hermitian input

  for (double t : {0.0, 0.41, 3.7}) {
    const RowMajor hd = to_dense_rm(h.value(t));
    RowMajor want = Complex(0.0, -1.0) * (hd * rho - rho * hd);
    for (const auto& [rate, A] : channels) {
      const RowMajor ad = to_dense_rm(A);
      want += rate * (ad * rho * ad.adjoint() -
                      0.5 * (ad.adjoint() * ad * rho + rho * ad.adjoint() * ad));
    }

    for (Backend backend : {Backend::serial, Backend::openmp}) {
      RowMajor out, scratch;
      kernels::apply_kernel(kernel, t, rho, out, scratch, backend);
      CHECK((out - want).cwiseAbs().maxCoeff() < 1e-13);

      // Generator output stays Hermitian and traceless for Hermitian input.
      CHECK((out - out.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-13);
      CHECK(std::abs(out.trace()) < 1e-13);
    }
  }
}

TEST_CASE("backends produce identical results on a larger static kernel") {
  const ops::CompositeSpace space({
      ops::ModeSpec{"m1", ops::ModeKind::mechanical, 1.0, 0.0, 4},
      ops::ModeSpec{"m2", ops::ModeKind::mechanical, 1.0, 0.0, 4},
      ops::ModeSpec{"b", ops::ModeKind::auxiliary, 5.0, 0.1, 3},
  });
  const int dim = static_cast<int>(space.total_dim());

  terms::TermSum h(space);
  terms::Monomial hop;
  hop.coeff = Complex(0.0, 0.25);
  hop.factors = {{0, 0, 0, 1}, {1, 1, 0, 0}};
  h.add_with_adjoint(hop);
  terms::Monomial nb;
  nb.coeff = 2.0;
  nb.factors = {{2, 0, 1, 0}};
  h.add(nb);

  const auto kernel = kernels::build_kernel(
      h, {{0.05, ops::embed(ops::annihilation(3), space, 2)}});

  std::mt19937 rng(44);
  RowMajor rho = random_dense(dim, rng);
  rho = 0.5 * (rho + rho.adjoint().eval());

  RowMajor out_s, out_p, scratch;
  kernels::apply_kernel(kernel, 0.9, rho, out_s, scratch, Backend::serial);
  kernels::apply_kernel(kernel, 0.9, rho, out_p, scratch, Backend::openmp);
  CHECK((out_s - out_p).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kernel construction validates input") {
  const ops::CompositeSpace space({ops::ModeSpec{"m", ops::ModeKind::mechanical, 1.0, 0.0, 3}});
  terms::TermSum h(space);
  CHECK_THROWS_AS(kernels::build_kernel(h, {{-1.0, ops::annihilation(3)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernels::build_kernel(h, {{1.0, ops::annihilation(4)}}),
                  std::invalid_argument);
}
