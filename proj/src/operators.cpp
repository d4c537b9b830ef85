// operators.cpp — sparse operator algebra on truncated Fock spaces.
#include "phonlat/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace phonlat::ops {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Sort by (row, col), merge duplicates, drop exact zeros.
std::vector<Entry> canonicalize(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const Entry& e : entries) {
    if (!out.empty() && out.back().row == e.row && out.back().col == e.col) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const Entry& e) { return e.value == Complex{}; });
  return out;
}

}  // namespace

std::string to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::mechanical: return "mechanical";
    case ModeKind::auxiliary: return "auxiliary";
    case ModeKind::auxiliary_pair_member: return "auxiliary_pair_member";
  }
  throw std::invalid_argument("to_string: bad ModeKind");
}

ModeKind mode_kind_from_string(const std::string& s) {
  if (s == "mechanical") return ModeKind::mechanical;
  if (s == "auxiliary") return ModeKind::auxiliary;
  if (s == "auxiliary_pair_member") return ModeKind::auxiliary_pair_member;
  throw std::invalid_argument("mode kind must be mechanical|auxiliary|auxiliary_pair_member, got '" + s + "'");
}

CompositeSpace::CompositeSpace(std::vector<ModeSpec> modes) : modes_(std::move(modes)) {
  require(!modes_.empty(), "CompositeSpace: at least one mode required");
  std::unordered_set<std::string> seen;
  for (const ModeSpec& m : modes_) {
    require(!m.label.empty(), "CompositeSpace: mode label must be non-empty");
    require(seen.insert(m.label).second, "CompositeSpace: duplicate mode label '" + m.label + "'");
    require(m.frequency > 0.0, "CompositeSpace: mode '" + m.label + "' frequency must be > 0");
    require(m.damping_rate >= 0.0, "CompositeSpace: mode '" + m.label + "' damping_rate must be >= 0");
    require(m.truncation_dim >= 2, "CompositeSpace: mode '" + m.label + "' truncation_dim must be >= 2");
    total_dim_ *= m.truncation_dim;
  }
}

const ModeSpec& CompositeSpace::mode(int slot) const {
  require(slot >= 0 && slot < slot_count(),
          "CompositeSpace: slot " + std::to_string(slot) + " out of range [0," +
              std::to_string(slot_count()) + ")");
  return modes_[static_cast<std::size_t>(slot)];
}

int CompositeSpace::slot_of(const std::string& label) const {
  for (int s = 0; s < slot_count(); ++s) {
    if (modes_[static_cast<std::size_t>(s)].label == label) return s;
  }
  throw std::invalid_argument("CompositeSpace: unknown mode label '" + label + "'");
}

bool CompositeSpace::has_label(const std::string& label) const {
  return std::any_of(modes_.begin(), modes_.end(),
                     [&](const ModeSpec& m) { return m.label == label; });
}

std::int64_t CompositeSpace::left_dim(int slot) const {
  mode(slot);  // range check
  std::int64_t d = 1;
  for (int s = 0; s < slot; ++s) d *= modes_[static_cast<std::size_t>(s)].truncation_dim;
  return d;
}

std::int64_t CompositeSpace::right_dim(int slot) const {
  mode(slot);
  std::int64_t d = 1;
  for (int s = slot + 1; s < slot_count(); ++s) d *= modes_[static_cast<std::size_t>(s)].truncation_dim;
  return d;
}

SparseOperator::SparseOperator(int dim, std::vector<Entry> entries) : dim_(dim) {
  require(dim >= 1, "SparseOperator: dimension must be >= 1");
  for (const Entry& e : entries) {
    require(e.row >= 0 && e.row < dim && e.col >= 0 && e.col < dim,
            "SparseOperator: entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                ") outside dimension " + std::to_string(dim));
  }
  entries_ = canonicalize(std::move(entries));
}

SparseOperator SparseOperator::zero(int dim) { return SparseOperator(dim, {}); }

SparseOperator SparseOperator::identity(int dim) {
  std::vector<Entry> e;
  e.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) e.push_back({i, i, Complex(1.0, 0.0)});
  return SparseOperator(dim, std::move(e));
}

SparseOperator annihilation(int dim) {
  require(dim >= 2, "annihilation: dimension must be >= 2, got " + std::to_string(dim));
  std::vector<Entry> e;
  e.reserve(static_cast<std::size_t>(dim - 1));
  for (int n = 1; n < dim; ++n) e.push_back({n - 1, n, Complex(std::sqrt(double(n)), 0.0)});
  return SparseOperator(dim, std::move(e));
}

SparseOperator creation(int dim) { return adjoint(annihilation(dim)); }

SparseOperator number(int dim) { return number_power(dim, 1); }

SparseOperator number_power(int dim, int p) {
  require(dim >= 2, "number_power: dimension must be >= 2, got " + std::to_string(dim));
  require(p >= 0, "number_power: exponent must be >= 0");
  std::vector<Entry> e;
  for (int n = 0; n < dim; ++n) {
    double v = std::pow(double(n), double(p));
    if (v != 0.0) e.push_back({n, n, Complex(v, 0.0)});
  }
  return SparseOperator(dim, std::move(e));
}

SparseOperator adjoint(const SparseOperator& op) {
  std::vector<Entry> e;
  e.reserve(op.nnz());
  for (const Entry& x : op.entries()) e.push_back({x.col, x.row, std::conj(x.value)});
  return SparseOperator(op.dim(), std::move(e));
}

SparseOperator scale(Complex factor, const SparseOperator& op) {
  std::vector<Entry> e;
  e.reserve(op.nnz());
  for (const Entry& x : op.entries()) e.push_back({x.row, x.col, factor * x.value});
  return SparseOperator(op.dim(), std::move(e));
}

SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
  require(a.dim() == b.dim(), "add: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                                  std::to_string(b.dim()));
  std::vector<Entry> e = a.entries();
  e.insert(e.end(), b.entries().begin(), b.entries().end());
  return SparseOperator(a.dim(), std::move(e));
}

SparseOperator sub(const SparseOperator& a, const SparseOperator& b) {
  return add(a, scale(Complex(-1.0, 0.0), b));
}

SparseOperator matmul(const SparseOperator& a, const SparseOperator& b) {
  require(a.dim() == b.dim(), "matmul: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                                  std::to_string(b.dim()));
  const int dim = a.dim();
  // Group B's entries by row for row-wise accumulation.
  std::vector<std::size_t> b_row_start(static_cast<std::size_t>(dim) + 1, 0);
  for (const Entry& x : b.entries()) ++b_row_start[static_cast<std::size_t>(x.row) + 1];
  for (int r = 0; r < dim; ++r)
    b_row_start[static_cast<std::size_t>(r) + 1] += b_row_start[static_cast<std::size_t>(r)];

  std::vector<Entry> out;
  std::vector<Complex> scratch(static_cast<std::size_t>(dim), Complex{});
  std::vector<int> touched;
  std::size_t i = 0;
  const auto& ae = a.entries();
  while (i < ae.size()) {
    const int row = ae[i].row;
    touched.clear();
    for (; i < ae.size() && ae[i].row == row; ++i) {
      const int k = ae[i].col;
      const Complex v = ae[i].value;
      for (std::size_t j = b_row_start[static_cast<std::size_t>(k)];
           j < b_row_start[static_cast<std::size_t>(k) + 1]; ++j) {
        const Entry& be = b.entries()[j];
        if (scratch[static_cast<std::size_t>(be.col)] == Complex{}) touched.push_back(be.col);
        scratch[static_cast<std::size_t>(be.col)] += v * be.value;
      }
    }
    for (int c : touched) {
      out.push_back({row, c, scratch[static_cast<std::size_t>(c)]});
      scratch[static_cast<std::size_t>(c)] = Complex{};
    }
  }
  return SparseOperator(dim, std::move(out));
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  return sub(matmul(a, b), matmul(b, a));
}

double max_abs(const SparseOperator& op) {
  double m = 0.0;
  for (const Entry& e : op.entries()) m = std::max(m, std::abs(e.value));
  return m;
}

bool is_hermitian(const SparseOperator& op, double tol_rel) {
  const double scale = max_abs(op);
  if (scale == 0.0) return true;
  return max_abs(sub(op, adjoint(op))) <= tol_rel * scale;
}

SparseOperator embed(const SparseOperator& op, const CompositeSpace& space, int slot) {
  const ModeSpec& m = space.mode(slot);  // throws on bad slot
  require(op.dim() == m.truncation_dim,
          "embed: operator dimension " + std::to_string(op.dim()) + " does not match mode '" +
              m.label + "' truncation " + std::to_string(m.truncation_dim));
  const std::int64_t left = space.left_dim(slot);
  const std::int64_t right = space.right_dim(slot);
  const std::int64_t ds = m.truncation_dim;
  const std::int64_t total = space.total_dim();
  require(total <= std::int64_t{1} << 30, "embed: composite dimension too large");

  std::vector<Entry> out;
  out.reserve(op.nnz() * static_cast<std::size_t>(left * right));
  for (std::int64_t l = 0; l < left; ++l) {
    for (const Entry& e : op.entries()) {
      const std::int64_t row_base = (l * ds + e.row) * right;
      const std::int64_t col_base = (l * ds + e.col) * right;
      for (std::int64_t r = 0; r < right; ++r) {
        out.push_back({static_cast<int>(row_base + r), static_cast<int>(col_base + r), e.value});
      }
    }
  }
  return SparseOperator(static_cast<int>(total), std::move(out));
}

Dense to_dense(const SparseOperator& op) {
  Dense m = Dense::Zero(op.dim(), op.dim());
  for (const Entry& e : op.entries()) m(e.row, e.col) += e.value;
  return m;
}

SparseOperator from_dense(const Dense& m, double drop_tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("from_dense: matrix must be square");
  std::vector<Entry> e;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > drop_tol) {
        e.push_back({static_cast<int>(r), static_cast<int>(c), m(r, c)});
      }
    }
  }
  return SparseOperator(static_cast<int>(m.rows()), std::move(e));
}

}  // namespace phonlat::ops
