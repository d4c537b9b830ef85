#include "phonlat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#ifdef PHONLAT_HAVE_OPENMP
#include <omp.h>
#endif

namespace phonlat::kernels {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(std::string("phonlat::kernels: ") + what);
}

void spmm_left_rows(const Complex& alpha, const CsrMatrix& A, const RowMajor& X, RowMajor& out,
                    int row_begin, int row_end) {
  const int n = static_cast<int>(X.cols());
  const Complex* x = X.data();
  Complex* o = out.data();
  for (int i = row_begin; i < row_end; ++i) {
    Complex* orow = o + static_cast<std::ptrdiff_t>(i) * n;
    for (int idx = A.row_ptr[i]; idx < A.row_ptr[i + 1]; ++idx) {
      const Complex a = alpha * A.val[idx];
      const Complex* xrow = x + static_cast<std::ptrdiff_t>(A.col[idx]) * n;
      for (int j = 0; j < n; ++j) orow[j] += a * xrow[j];
    }
  }
}

void spmm_right_rows(const Complex& alpha, const RowMajor& X, const CsrMatrix& B, RowMajor& out,
                     int row_begin, int row_end) {
  const int n = static_cast<int>(X.cols());
  const Complex* x = X.data();
  Complex* o = out.data();
  for (int i = row_begin; i < row_end; ++i) {
    const Complex* xrow = x + static_cast<std::ptrdiff_t>(i) * n;
    Complex* orow = o + static_cast<std::ptrdiff_t>(i) * n;
    for (int k = 0; k < n; ++k) {
      const Complex xv = alpha * xrow[k];
      if (xv == Complex(0.0, 0.0)) continue;
      for (int idx = B.row_ptr[k]; idx < B.row_ptr[k + 1]; ++idx)
        orow[B.col[idx]] += xv * B.val[idx];
    }
  }
}

}  // namespace

bool openmp_compiled() {
#ifdef PHONLAT_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int openmp_max_threads() {
#ifdef PHONLAT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

CsrMatrix CsrMatrix::from_sparse(const ops::SparseOperator& op) {
  CsrMatrix m;
  m.dim = op.dim();
  m.row_ptr.assign(m.dim + 1, 0);
  m.col.reserve(op.nnz());
  m.val.reserve(op.nnz());
  for (const auto& e : op.entries()) ++m.row_ptr[e.row + 1];
  for (int i = 0; i < m.dim; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  // Entries are already sorted by (row, col) in canonical SparseOperator form.
  for (const auto& e : op.entries()) {
    m.col.push_back(e.col);
    m.val.push_back(e.value);
  }
  return m;
}

ops::SparseOperator CsrMatrix::to_sparse() const {
  std::vector<ops::Entry> entries;
  entries.reserve(val.size());
  for (int i = 0; i < dim; ++i)
    for (int idx = row_ptr[i]; idx < row_ptr[i + 1]; ++idx)
      entries.push_back({i, col[idx], val[idx]});
  return ops::SparseOperator(dim, entries);
}

void spmm_left_acc(const Complex& alpha, const CsrMatrix& A, const RowMajor& X, RowMajor& out,
                   Backend backend) {
  require(A.dim == X.rows() && X.rows() == out.rows() && X.cols() == out.cols(),
          "spmm_left_acc dimension mismatch");
  const int rows = A.dim;
  if (backend == Backend::openmp && openmp_compiled()) {
#ifdef PHONLAT_HAVE_OPENMP
#pragma omp parallel
    {
      const int nt = omp_get_num_threads();
      const int id = omp_get_thread_num();
      const int chunk = (rows + nt - 1) / nt;
      const int lo = std::min(rows, id * chunk);
      const int hi = std::min(rows, lo + chunk);
      spmm_left_rows(alpha, A, X, out, lo, hi);
    }
#endif
    return;
  }
  spmm_left_rows(alpha, A, X, out, 0, rows);
}

void spmm_right_acc(const Complex& alpha, const RowMajor& X, const CsrMatrix& B, RowMajor& out,
                    Backend backend) {
  require(B.dim == X.cols() && X.rows() == out.rows() && X.cols() == out.cols(),
          "spmm_right_acc dimension mismatch");
  const int rows = static_cast<int>(X.rows());
  if (backend == Backend::openmp && openmp_compiled()) {
#ifdef PHONLAT_HAVE_OPENMP
#pragma omp parallel
    {
      const int nt = omp_get_num_threads();
      const int id = omp_get_thread_num();
      const int chunk = (rows + nt - 1) / nt;
      const int lo = std::min(rows, id * chunk);
      const int hi = std::min(rows, lo + chunk);
      spmm_right_rows(alpha, X, B, out, lo, hi);
    }
#endif
    return;
  }
  spmm_right_rows(alpha, X, B, out, 0, rows);
}

LindbladKernel build_kernel(const terms::TermSum& hamiltonian,
                            const std::vector<std::pair<double, ops::SparseOperator>>& channels) {
  LindbladKernel k;
  k.dim = static_cast<int>(hamiltonian.space().total_dim());

  const Complex minus_i(0.0, -1.0);
  ops::SparseOperator drift = ops::scale(minus_i, hamiltonian.static_value());
  for (const auto& [rate, A] : channels) {
    require(rate >= 0.0, "channel rate must be non-negative");
    require(A.dim() == k.dim, "channel operator dimension mismatch");
    const auto Adag = ops::adjoint(A);
    drift = ops::add(drift, ops::scale(-0.5 * rate, ops::matmul(Adag, A)));
    LindbladKernel::Channel c;
    c.rate = rate;
    c.A = CsrMatrix::from_sparse(A);
    c.Adag = CsrMatrix::from_sparse(Adag);
    k.channels.push_back(std::move(c));
  }
  k.drift = CsrMatrix::from_sparse(drift);
  k.drift_dag = CsrMatrix::from_sparse(ops::adjoint(drift));

  const terms::TermSum merged = hamiltonian.merged();
  std::map<double, std::vector<ops::Entry>> groups;
  for (const auto& m : merged.monomials()) {
    if (m.rotation == 0.0) continue;
    const auto op = ops::scale(m.coeff, terms::monomial_operator(hamiltonian.space(), m));
    auto& entries = groups[m.rotation];
    entries.insert(entries.end(), op.entries().begin(), op.entries().end());
  }
  for (auto& [rotation, entries] : groups) {
    LindbladKernel::Rotating r;
    r.rotation = rotation;
    r.op = CsrMatrix::from_sparse(ops::SparseOperator(k.dim, entries));
    k.rotating.push_back(std::move(r));
  }
  return k;
}

void apply_kernel(const LindbladKernel& kernel, double t, const RowMajor& rho, RowMajor& out,
                  RowMajor& scratch, Backend backend) {
  require(rho.rows() == kernel.dim && rho.cols() == kernel.dim, "state dimension mismatch");
  out.resize(kernel.dim, kernel.dim);
  out.setZero();

  const Complex one(1.0, 0.0);
  spmm_left_acc(one, kernel.drift, rho, out, backend);
  spmm_right_acc(one, rho, kernel.drift_dag, out, backend);

  for (const auto& c : kernel.channels) {
    if (c.rate == 0.0) continue;
    scratch.resize(kernel.dim, kernel.dim);
    scratch.setZero();
    spmm_left_acc(one, c.A, rho, scratch, backend);
    spmm_right_acc(Complex(c.rate, 0.0), scratch, c.Adag, out, backend);
  }

  for (const auto& g : kernel.rotating) {
    const Complex phase = std::exp(Complex(0.0, -g.rotation * t));
    spmm_left_acc(Complex(0.0, -1.0) * phase, g.op, rho, out, backend);
    spmm_right_acc(Complex(0.0, 1.0) * phase, rho, g.op, out, backend);
  }
}

}  // namespace phonlat::kernels
