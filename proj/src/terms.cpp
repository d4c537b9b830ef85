#include "phonlat/terms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace phonlat::terms {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("phonlat::terms: " + what);
}

bool is_identity(const SlotFactor& f) {
  return f.create_pow == 0 && f.number_pow == 0 && f.annihilate_pow == 0;
}

double normalize_zero(double x) { return x == 0.0 ? 0.0 : x; }

// Comparable key for a factor list (factors assumed normalized/sorted).
using FactorKey = std::vector<std::tuple<int, int, int, int>>;

FactorKey factor_key(const std::vector<SlotFactor>& fs) {
  FactorKey key;
  key.reserve(fs.size());
  for (const auto& f : fs)
    key.emplace_back(f.slot, f.create_pow, f.number_pow, f.annihilate_pow);
  return key;
}

using TermKey = std::pair<double, FactorKey>;  // (rotation, factors)

// Stirling numbers of the second kind S2(w, j), j = 0..w.
std::vector<double> stirling2_row(int w) {
  std::vector<std::vector<double>> s(w + 1);
  for (int n = 0; n <= w; ++n) {
    s[n].assign(n + 1, 0.0);
    s[n][0] = (n == 0) ? 1.0 : 0.0;
    for (int k = 1; k <= n; ++k)
      s[n][k] = (n == 0) ? 0.0 : k * (n - 1 >= k ? s[n - 1][k] : 0.0) + s[n - 1][k - 1];
  }
  return s[w];
}

}  // namespace

bool slot_factor_less(const SlotFactor& a, const SlotFactor& b) {
  return std::tuple(a.slot, a.create_pow, a.number_pow, a.annihilate_pow) <
         std::tuple(b.slot, b.create_pow, b.number_pow, b.annihilate_pow);
}

Monomial monomial_adjoint(const Monomial& m) {
  Monomial out = m;
  out.coeff = std::conj(m.coeff);
  out.rotation = normalize_zero(-m.rotation);
  for (auto& f : out.factors) std::swap(f.create_pow, f.annihilate_pow);
  return out;
}

int net_excess(const Monomial& m, int slot) {
  for (const auto& f : m.factors)
    if (f.slot == slot) return f.create_pow - f.annihilate_pow;
  return 0;
}

SparseOperator monomial_operator(const CompositeSpace& space, const Monomial& m) {
  SparseOperator result = SparseOperator::identity(space.total_dim());
  for (const auto& f : m.factors) {
    const int d = space.mode(f.slot).truncation_dim;
    // Direct entries of (a†)^p n^w a^q on a d-level ladder:
    // |col⟩ → sqrt(col!/(col-q)!) · (col-q)^w · sqrt((col-q+p)!/(col-q)!) |col-q+p⟩.
    std::vector<ops::Entry> entries;
    for (int col = f.annihilate_pow; col < d; ++col) {
      const int mid = col - f.annihilate_pow;
      const int row = mid + f.create_pow;
      if (row >= d) continue;
      double v = 1.0;
      for (int i = 0; i < f.annihilate_pow; ++i) v *= static_cast<double>(col - i);
      for (int i = 1; i <= f.create_pow; ++i) v *= static_cast<double>(mid + i);
      v = std::sqrt(v);
      for (int i = 0; i < f.number_pow; ++i) v *= static_cast<double>(mid);
      if (v != 0.0) entries.push_back({row, col, Complex(v, 0.0)});
    }
    SparseOperator slot_op(d, entries);
    result = ops::matmul(result, ops::embed(slot_op, space, f.slot));
  }
  return result;
}

std::vector<Monomial> to_ladder_normal(const Monomial& m) {
  std::vector<Monomial> out;
  Monomial base = m;
  base.factors.clear();
  out.push_back(base);
  for (const auto& f : m.factors) {
    const auto row = stirling2_row(f.number_pow);
    std::vector<Monomial> next;
    for (const auto& partial : out) {
      for (int j = 0; j <= f.number_pow; ++j) {
        if (row[j] == 0.0) continue;
        Monomial t = partial;
        t.coeff *= row[j];
        SlotFactor nf{f.slot, f.create_pow + j, 0, f.annihilate_pow + j};
        if (!is_identity(nf)) t.factors.push_back(nf);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

TermSum::TermSum(CompositeSpace space) : space_(std::move(space)) {}

void TermSum::add(Monomial m) {
  require(std::isfinite(m.rotation), "rotation must be finite");
  require(std::isfinite(m.coeff.real()) && std::isfinite(m.coeff.imag()),
          "coefficient must be finite");
  std::vector<SlotFactor> cleaned;
  for (const auto& f : m.factors) {
    require(f.slot >= 0 && f.slot < space_.slot_count(), "factor slot out of range");
    require(f.create_pow >= 0 && f.number_pow >= 0 && f.annihilate_pow >= 0,
            "factor powers must be non-negative");
    if (!is_identity(f)) cleaned.push_back(f);
  }
  std::sort(cleaned.begin(), cleaned.end(),
            [](const SlotFactor& a, const SlotFactor& b) { return a.slot < b.slot; });
  for (std::size_t i = 1; i < cleaned.size(); ++i)
    require(cleaned[i].slot != cleaned[i - 1].slot, "duplicate slot in factor list");
  m.factors = std::move(cleaned);
  m.rotation = normalize_zero(m.rotation);
  if (m.coeff == Complex(0.0, 0.0)) return;
  terms_.push_back(std::move(m));
}

void TermSum::add_all(const std::vector<Monomial>& ms) {
  for (const auto& m : ms) add(m);
}

void TermSum::add_with_adjoint(Monomial m) {
  Monomial adj = monomial_adjoint(m);
  const bool self_adjoint =
      adj.rotation == normalize_zero(m.rotation) && factor_key(adj.factors) == factor_key(m.factors);
  if (self_adjoint) {
    add(std::move(m));
    return;
  }
  if (!adj.label.empty()) adj.label += "+hc";
  add(std::move(m));
  add(std::move(adj));
}

SparseOperator TermSum::value(double t) const {
  std::vector<ops::Entry> entries;
  for (const auto& m : terms_) {
    const Complex phase = std::exp(Complex(0.0, -m.rotation * t));
    const SparseOperator op = ops::scale(m.coeff * phase, monomial_operator(space_, m));
    entries.insert(entries.end(), op.entries().begin(), op.entries().end());
  }
  return SparseOperator(space_.total_dim(), entries);
}

SparseOperator TermSum::static_value() const {
  std::vector<ops::Entry> entries;
  for (const auto& m : terms_) {
    if (m.rotation != 0.0) continue;
    const SparseOperator op = ops::scale(m.coeff, monomial_operator(space_, m));
    entries.insert(entries.end(), op.entries().begin(), op.entries().end());
  }
  return SparseOperator(space_.total_dim(), entries);
}

bool TermSum::is_static() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Monomial& m) { return m.rotation == 0.0; });
}

double TermSum::max_abs_rotation() const {
  double r = 0.0;
  for (const auto& m : terms_) r = std::max(r, std::abs(m.rotation));
  return r;
}

TermSum TermSum::merged(double drop_tol) const {
  std::map<TermKey, std::pair<Complex, std::string>> groups;
  double max_coeff = 0.0;
  for (const auto& m : terms_) {
    max_coeff = std::max(max_coeff, std::abs(m.coeff));
    auto key = TermKey(m.rotation, factor_key(m.factors));
    auto it = groups.find(key);
    if (it == groups.end()) {
      groups.emplace(std::move(key), std::make_pair(m.coeff, m.label));
    } else {
      it->second.first += m.coeff;
      if (!m.label.empty()) {
        if (!it->second.second.empty()) it->second.second += "|";
        it->second.second += m.label;
      }
    }
  }
  TermSum out(space_);
  for (const auto& [key, cl] : groups) {
    if (std::abs(cl.first) <= drop_tol * max_coeff) continue;
    Monomial m;
    m.rotation = key.first;
    for (const auto& [slot, p, w, q] : key.second) m.factors.push_back({slot, p, w, q});
    m.coeff = cl.first;
    m.label = cl.second;
    out.add(std::move(m));
  }
  return out;
}

bool TermSum::hermitian_pairing_ok(double tol) const {
  const TermSum m = merged();
  std::map<TermKey, Complex> groups;
  double max_coeff = 0.0;
  for (const auto& t : m.monomials()) {
    groups[TermKey(t.rotation, factor_key(t.factors))] = t.coeff;
    max_coeff = std::max(max_coeff, std::abs(t.coeff));
  }
  if (groups.empty()) return true;
  for (const auto& [key, coeff] : groups) {
    Monomial probe;
    probe.coeff = coeff;
    probe.rotation = key.first;
    for (const auto& [slot, p, w, q] : key.second) probe.factors.push_back({slot, p, w, q});
    const Monomial adj = monomial_adjoint(probe);
    const auto it = groups.find(TermKey(adj.rotation, factor_key(adj.factors)));
    if (it == groups.end()) {
      if (std::abs(coeff) > tol * max_coeff) return false;
      continue;
    }
    if (std::abs(it->second - adj.coeff) > tol * max_coeff) return false;
  }
  return true;
}

TermSum TermSum::adjoint() const {
  TermSum out(space_);
  for (const auto& m : terms_) out.add(monomial_adjoint(m));
  return out;
}

TermSum TermSum::scaled(const Complex& factor) const {
  TermSum out(space_);
  for (auto m : terms_) {
    m.coeff *= factor;
    out.add(std::move(m));
  }
  return out;
}

TermSum TermSum::plus(const TermSum& other) const {
  require(space_ == other.space_, "TermSum::plus requires matching spaces");
  TermSum out = *this;
  for (const auto& m : other.terms_) out.add(m);
  return out;
}

TermSum merged_ladder_normal(const TermSum& sum, double drop_tol) {
  TermSum expanded(sum.space());
  for (const auto& m : sum.monomials()) expanded.add_all(to_ladder_normal(m));
  return expanded.merged(drop_tol);
}

bool same_term_set(const TermSum& a, const TermSum& b, double tol) {
  if (!(a.space() == b.space())) return false;
  const TermSum ca = merged_ladder_normal(a, 0.0);
  const TermSum cb = merged_ladder_normal(b, 0.0);
  std::map<TermKey, Complex> ma, mb;
  double max_coeff = 0.0;
  for (const auto& m : ca.monomials()) {
    ma[TermKey(m.rotation, factor_key(m.factors))] = m.coeff;
    max_coeff = std::max(max_coeff, std::abs(m.coeff));
  }
  for (const auto& m : cb.monomials()) {
    mb[TermKey(m.rotation, factor_key(m.factors))] = m.coeff;
    max_coeff = std::max(max_coeff, std::abs(m.coeff));
  }
  if (max_coeff == 0.0) return true;
  for (const auto& [key, coeff] : ma) {
    const auto it = mb.find(key);
    const Complex other = (it == mb.end()) ? Complex(0.0, 0.0) : it->second;
    if (std::abs(coeff - other) > tol * max_coeff) return false;
  }
  for (const auto& [key, coeff] : mb) {
    if (ma.count(key)) continue;
    if (std::abs(coeff) > tol * max_coeff) return false;
  }
  return true;
}

}  // namespace phonlat::terms
