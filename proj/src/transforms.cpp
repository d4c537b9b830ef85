#include "phonlat/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace phonlat::transforms {

using ops::Complex;
using ops::CompositeSpace;
using ops::Entry;
using ops::ModeKind;
using ops::SparseOperator;
using terms::Monomial;
using terms::SlotFactor;
using terms::TermSum;

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("phonlat::transforms: " + what);
}

int slot_of_kind(const CompositeSpace& space, const std::string& label, ModeKind kind,
                 const char* role) {
  const int slot = space.slot_of(label);
  if (space.mode(slot).kind != kind)
    fail(std::string(role) + " '" + label + "' has the wrong mode kind");
  return slot;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

int digit_of(const CompositeSpace& space, std::int64_t idx, int slot) {
  return static_cast<int>((idx / space.right_dim(slot)) % space.mode(slot).truncation_dim);
}

// Index with `slot`'s digit removed (row-major, slot 0 most significant).
std::int64_t collapse_index(const CompositeSpace& space, std::int64_t idx, int slot) {
  const std::int64_t right = space.right_dim(slot);
  const std::int64_t d = space.mode(slot).truncation_dim;
  return (idx / (right * d)) * right + idx % right;
}

CompositeSpace space_without(const CompositeSpace& space, int slot) {
  std::vector<ops::ModeSpec> modes;
  for (int s = 0; s < space.slot_count(); ++s)
    if (s != slot) modes.push_back(space.mode(s));
  return CompositeSpace(std::move(modes));
}

// op restricted to the remaining slots when op = I_slot ⊗ rest; nullopt when
// the operator actually touches `slot`.
std::optional<SparseOperator> slice_identity(const SparseOperator& op, const CompositeSpace& space,
                                             int slot) {
  const int d = space.mode(slot).truncation_dim;
  const int reduced_dim = static_cast<int>(space.total_dim() / d);
  std::vector<std::vector<Entry>> buckets(d);
  for (const auto& e : op.entries()) {
    const int mr = digit_of(space, e.row, slot);
    if (mr != digit_of(space, e.col, slot)) return std::nullopt;
    buckets[mr].push_back(Entry{static_cast<int>(collapse_index(space, e.row, slot)),
                                static_cast<int>(collapse_index(space, e.col, slot)), e.value});
  }
  SparseOperator first(reduced_dim, std::move(buckets[0]));
  for (int m = 1; m < d; ++m)
    if (SparseOperator(reduced_dim, std::move(buckets[m])) != first) return std::nullopt;
  return first;
}

Complex frobenius(const SparseOperator& a, const SparseOperator& b) {
  Complex sum(0.0, 0.0);
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    const auto ka = std::make_pair(ia->row, ia->col);
    const auto kb = std::make_pair(ib->row, ib->col);
    if (ka < kb)
      ++ia;
    else if (kb < ka)
      ++ib;
    else {
      sum += std::conj(ia->value) * ib->value;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

bool nearly_real(const Complex& v, double scale) {
  return std::abs(v.imag()) <= 1e-12 * std::max(1.0, std::max(scale, std::abs(v.real())));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

TermSum to_interaction_picture(const models::MasterEquationModel& model) {
  const CompositeSpace& space = model.space();
  const int ns = space.slot_count();
  std::vector<Complex> free_coeff(ns, Complex(0.0, 0.0));
  TermSum out(space);

  for (const auto& m : model.hamiltonian.monomials()) {
    if (m.rotation == 0.0 && m.factors.size() == 1) {
      const SlotFactor& f = m.factors.front();
      const bool number_form = f.create_pow == 0 && f.number_pow == 1 && f.annihilate_pow == 0;
      const bool ladder_form = f.create_pow == 1 && f.number_pow == 0 && f.annihilate_pow == 1;
      if (number_form || ladder_form) {
        free_coeff[f.slot] += m.coeff;
        continue;
      }
    }
    Monomial moved = m;
    double shift = 0.0;
    for (const auto& f : m.factors)
      shift += double(f.create_pow - f.annihilate_pow) * space.mode(f.slot).frequency;
    moved.rotation = m.rotation - shift;
    out.add(std::move(moved));
  }

  for (int s = 0; s < ns; ++s) {
    const double w = space.mode(s).frequency;
    if (!nearly_real(free_coeff[s], std::abs(w)) ||
        std::abs(free_coeff[s].real() - w) > 1e-9 * std::max(1.0, std::abs(w)))
      fail("free part of mode '" + space.mode(s).label + "' (" + fmt(free_coeff[s].real()) +
           ") inconsistent with mode registry frequency " + fmt(w));
  }
  return out;
}

std::pair<TermSum, ResonanceReport> rwa_filter(const TermSum& ts, double cutoff) {
  if (!(cutoff >= 0.0)) fail("rwa_filter cutoff must be >= 0");
  TermSum kept(ts.space());
  ResonanceReport rep;
  rep.min_dropped_detuning = std::numeric_limits<double>::infinity();
  for (const auto& m : ts.monomials()) {
    const double detuning = std::abs(m.rotation);
    if (detuning <= cutoff) {
      kept.add(m);
      ++rep.kept_terms;
      rep.max_kept_detuning = std::max(rep.max_kept_detuning, detuning);
    } else {
      rep.dropped.push_back(m);
      ++rep.dropped_terms;
      rep.min_dropped_detuning = std::min(rep.min_dropped_detuning, detuning);
    }
  }
  if (rep.dropped_terms > 0 && rep.max_kept_detuning > 0.0 &&
      rep.min_dropped_detuning < 2.0 * rep.max_kept_detuning)
    rep.warnings.push_back("cutoff " + fmt(cutoff) + " cuts through a rotation cluster: kept " +
                           fmt(rep.max_kept_detuning) + " vs dropped " +
                           fmt(rep.min_dropped_detuning));
  return {std::move(kept), std::move(rep)};
}

models::MasterEquationModel supermode_transform(const models::MasterEquationModel& model,
                                                const std::string& member_c,
                                                const std::string& member_d) {
  const CompositeSpace& space = model.space();
  const int sc = slot_of_kind(space, member_c, ModeKind::auxiliary_pair_member, "pair member");
  const int sd = slot_of_kind(space, member_d, ModeKind::auxiliary_pair_member, "pair member");
  if (sc == sd) fail("supermode_transform needs two distinct pair members");

  models::MasterEquationModel out(space);

  using FactorKey = std::vector<std::tuple<int, int, int, int>>;
  for (const auto& raw : model.hamiltonian.monomials()) {
    for (const auto& mono : terms::to_ladder_normal(raw)) {
      int pc = 0, qc = 0, pd = 0, qd = 0;
      std::vector<SlotFactor> others;
      for (const auto& f : mono.factors) {
        if (f.slot == sc) {
          pc = f.create_pow;
          qc = f.annihilate_pow;
        } else if (f.slot == sd) {
          pd = f.create_pow;
          qd = f.annihilate_pow;
        } else {
          others.push_back(f);
        }
      }
      if (pc + qc + pd + qd == 0) {
        out.hamiltonian.add(mono);
        continue;
      }
      // c̃†^pc d̃†^pd c̃^qc d̃^qd with c̃ = (c+d)/√2, d̃ = (c−d)/√2; creation and
      // annihilation blocks expand independently, so the result stays normal
      // ordered. Merge the expansion of this one monomial, keep its label.
      const double norm = std::pow(0.5, 0.5 * double(pc + pd + qc + qd));
      std::map<FactorKey, Complex> expanded;
      for (int i1 = 0; i1 <= pc; ++i1)
        for (int i2 = 0; i2 <= pd; ++i2)
          for (int k1 = 0; k1 <= qc; ++k1)
            for (int k2 = 0; k2 <= qd; ++k2) {
              const double sign = (((pd - i2) + (qd - k2)) % 2 == 0) ? 1.0 : -1.0;
              const double weight =
                  norm * sign * binom(pc, i1) * binom(pd, i2) * binom(qc, k1) * binom(qd, k2);
              std::vector<SlotFactor> fs = others;
              if (i1 + i2 > 0 || k1 + k2 > 0) fs.push_back(SlotFactor{sc, i1 + i2, 0, k1 + k2});
              if (pc - i1 + pd - i2 > 0 || qc - k1 + qd - k2 > 0)
                fs.push_back(SlotFactor{sd, pc - i1 + pd - i2, 0, qc - k1 + qd - k2});
              std::sort(fs.begin(), fs.end(),
                        [](const SlotFactor& a, const SlotFactor& b) { return a.slot < b.slot; });
              FactorKey key;
              for (const auto& f : fs)
                key.emplace_back(f.slot, f.create_pow, f.number_pow, f.annihilate_pow);
              expanded[key] += mono.coeff * weight;
            }
      for (const auto& [key, coeff] : expanded) {
        if (coeff == Complex(0.0, 0.0)) continue;
        Monomial t;
        t.coeff = coeff;
        t.rotation = mono.rotation;
        t.label = mono.label;
        for (const auto& [slot, p, w, q] : key) t.factors.push_back(SlotFactor{slot, p, w, q});
        out.hamiltonian.add(std::move(t));
      }
    }
  }

  const SparseOperator ann_c =
      ops::embed(ops::annihilation(space.mode(sc).truncation_dim), space, sc);
  const SparseOperator ann_d =
      ops::embed(ops::annihilation(space.mode(sd).truncation_dim), space, sd);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& dis : model.dissipators) {
    const auto cut_c = slice_identity(dis.op, space, sc);
    if (cut_c && slice_identity(dis.op, space, sd)) {
      out.dissipators.push_back(dis);
      continue;
    }
    const Complex alpha = frobenius(ann_c, dis.op) / frobenius(ann_c, ann_c);
    const Complex beta = frobenius(ann_d, dis.op) / frobenius(ann_d, ann_d);
    const SparseOperator residual =
        ops::sub(dis.op, ops::add(ops::scale(alpha, ann_c), ops::scale(beta, ann_d)));
    if (ops::max_abs(residual) > 1e-12 * ops::max_abs(dis.op))
      fail("dissipator '" + dis.label + "' is not linear in the pair modes");
    const SparseOperator rotated = ops::add(ops::scale((alpha + beta) * inv_sqrt2, ann_c),
                                            ops::scale((alpha - beta) * inv_sqrt2, ann_d));
    out.dissipators.push_back(models::Dissipator{dis.rate, rotated, dis.label});
  }
  return out;
}

SchwingerOps schwinger_qubit_ops(const CompositeSpace& space, const std::string& member_c,
                                 const std::string& member_d) {
  const int sc = slot_of_kind(space, member_c, ModeKind::auxiliary_pair_member, "pair member");
  const int sd = slot_of_kind(space, member_d, ModeKind::auxiliary_pair_member, "pair member");
  if (sc == sd) fail("schwinger_qubit_ops needs two distinct pair members");

  std::vector<Entry> proj;
  for (std::int64_t idx = 0; idx < space.total_dim(); ++idx)
    if (digit_of(space, idx, sc) + digit_of(space, idx, sd) == 1)
      proj.push_back(Entry{static_cast<int>(idx), static_cast<int>(idx), Complex(1.0, 0.0)});
  SchwingerOps res;
  res.projector = SparseOperator(static_cast<int>(space.total_dim()), std::move(proj));

  const SparseOperator nc = ops::embed(ops::number(space.mode(sc).truncation_dim), space, sc);
  const SparseOperator nd = ops::embed(ops::number(space.mode(sd).truncation_dim), space, sd);
  const SparseOperator raise =
      ops::matmul(ops::embed(ops::creation(space.mode(sc).truncation_dim), space, sc),
                  ops::embed(ops::annihilation(space.mode(sd).truncation_dim), space, sd));
  res.sigma_z = ops::matmul(res.projector, ops::matmul(ops::sub(nc, nd), res.projector));
  res.sigma_plus = ops::matmul(res.projector, ops::matmul(raise, res.projector));
  res.sigma_minus = ops::adjoint(res.sigma_plus);
  return res;
}

PerturbativeResult perturbative_diagonalize(const models::MasterEquationModel& model,
                                            const std::string& mech, const std::string& member_c,
                                            const std::string& member_d) {
  const CompositeSpace& space = model.space();
  const int sm = slot_of_kind(space, mech, ModeKind::mechanical, "mechanical mode");
  const int sc = slot_of_kind(space, member_c, ModeKind::auxiliary_pair_member, "pair member");
  const int sd = slot_of_kind(space, member_d, ModeKind::auxiliary_pair_member, "pair member");
  if (sc == sd) fail("perturbative_diagonalize needs two distinct pair members");

  const auto ladder_one = [](int slot, bool create) {
    return create ? SlotFactor{slot, 1, 0, 0} : SlotFactor{slot, 0, 0, 1};
  };
  auto sorted = [](std::vector<SlotFactor> fs) {
    std::sort(fs.begin(), fs.end(),
              [](const SlotFactor& a, const SlotFactor& b) { return a.slot < b.slot; });
    return fs;
  };
  const std::vector<SlotFactor> free_c = {SlotFactor{sc, 1, 0, 1}};
  const std::vector<SlotFactor> free_d = {SlotFactor{sd, 1, 0, 1}};
  const std::vector<SlotFactor> exch =
      sorted({ladder_one(sm, false), ladder_one(sc, true), ladder_one(sd, false)});
  const std::vector<SlotFactor> exch_adj =
      sorted({ladder_one(sm, true), ladder_one(sc, false), ladder_one(sd, true)});

  Complex coeff_c(0.0, 0.0), coeff_d(0.0, 0.0), coeff_f(0.0, 0.0), coeff_f_adj(0.0, 0.0);
  const TermSum canonical = terms::merged_ladder_normal(model.hamiltonian, 1e-14);
  for (const auto& m : canonical.monomials()) {
    if (m.rotation != 0.0) fail("exchange qubit model must be static");
    if (m.factors == free_c)
      coeff_c = m.coeff;
    else if (m.factors == free_d)
      coeff_d = m.coeff;
    else if (m.factors == exch)
      coeff_f = m.coeff;
    else if (m.factors == exch_adj)
      coeff_f_adj = m.coeff;
    else
      fail("Hamiltonian is not the exchange qubit model (unexpected term '" + m.label + "')");
  }
  const double scale = std::abs(coeff_c) + std::abs(coeff_f);
  if (!nearly_real(coeff_c, scale) || !nearly_real(coeff_d, scale) ||
      !nearly_real(coeff_f, scale) || std::abs(coeff_f_adj - std::conj(coeff_f)) > 1e-12 * scale)
    fail("exchange qubit model coefficients must be real with Hermitian pairing");

  const double omega = (coeff_c.real() + coeff_d.real()) / 2.0;
  const double delta = (coeff_c.real() - coeff_d.real()) / 2.0;
  const double f = coeff_f.real();
  if (f != 0.0 && delta == 0.0) fail("exchange coupling requires a nonzero detuning");
  const double eps = (f == 0.0) ? 0.0 : f / delta;

  PerturbativeResult result{
      models::MasterEquationModel(CompositeSpace(
          sm < sc ? std::vector<ops::ModeSpec>{space.mode(sm), space.mode(sc)}
                  : std::vector<ops::ModeSpec>{space.mode(sc), space.mode(sm)})),
      eps,
      {}};
  const CompositeSpace& rspace = result.model.space();
  const int rm = rspace.slot_of(mech);
  const int rc = rspace.slot_of(member_c);
  if (std::abs(eps) > 0.3)
    result.warnings.push_back("perturbative parameter f/delta = " + fmt(eps) +
                              " exceeds 0.3; second-order truncation degrades");

  result.model.hamiltonian.add(
      Monomial{Complex(omega + delta + eps * f / 2.0, 0.0), 0.0, {SlotFactor{rc, 0, 1, 0}}, "dressed@" + member_c});
  if (eps != 0.0)
    result.model.hamiltonian.add(Monomial{Complex(eps * f / 2.0, 0.0),
                                          0.0,
                                          {SlotFactor{rm, 0, 1, 0}, SlotFactor{rc, 0, 1, 0}},
                                          "xkerr@" + member_c + "*" + mech});

  const SparseOperator ann_m = ops::embed(ops::annihilation(space.mode(sm).truncation_dim), space, sm);
  const SparseOperator ann_c = ops::embed(ops::annihilation(space.mode(sc).truncation_dim), space, sc);
  const SparseOperator ann_d = ops::embed(ops::annihilation(space.mode(sd).truncation_dim), space, sd);
  const SparseOperator r_ann_m =
      ops::embed(ops::annihilation(rspace.mode(rm).truncation_dim), rspace, rm);
  const SparseOperator r_ann_c =
      ops::embed(ops::annihilation(rspace.mode(rc).truncation_dim), rspace, rc);
  double kappa_c = 0.0;
  for (const auto& dis : model.dissipators) {
    if (dis.op == ann_m)
      result.model.dissipators.push_back(models::Dissipator{dis.rate, r_ann_m, dis.label});
    else if (dis.op == ann_c) {
      kappa_c = dis.rate;
      result.model.dissipators.push_back(models::Dissipator{dis.rate, r_ann_c, dis.label});
    } else if (dis.op == ann_d)
      continue;  // acts on the vacuum mode that is dropped
    else
      fail("dissipator '" + dis.label + "' is not a plain mode-damping channel");
  }
  if (kappa_c > 0.0 && eps != 0.0)
    result.model.dissipators.push_back(models::Dissipator{
        eps * eps * kappa_c / 4.0, ops::matmul(r_ann_c, r_ann_m), "induced@" + member_c + "*" + mech});
  return result;
}

EliminationResult adiabatic_eliminate(const models::MasterEquationModel& model,
                                      const std::string& fast_mode,
                                      const SparseOperator& coupling, double omega, double kappa) {
  const CompositeSpace& space = model.space();
  const int sf = space.slot_of(fast_mode);
  if (!(omega != 0.0 || kappa > 0.0)) fail("adiabatic_eliminate needs a fast scale");
  if (kappa < 0.0) fail("kappa must be >= 0");
  if (coupling.dim() != space.total_dim())
    fail("coupling operator dimension does not match the model space");

  const auto k_reduced = slice_identity(coupling, space, sf);
  if (!k_reduced || ops::max_abs(*k_reduced) == 0.0)
    fail("coupling operator must act on the remaining modes only");
  const CompositeSpace rspace = space_without(space, sf);

  // Recognize K: scalar·n_s (diagonal branch) or a_{s1} + a_{s2} (linear branch).
  int number_slot = -1, lin_slot1 = -1, lin_slot2 = -1;
  double number_scale = 0.0;
  {
    const double knorm = ops::max_abs(*k_reduced);
    for (int s = 0; s < rspace.slot_count() && number_slot < 0; ++s) {
      const SparseOperator cand =
          ops::embed(ops::number(rspace.mode(s).truncation_dim), rspace, s);
      const Complex c = frobenius(cand, *k_reduced) / frobenius(cand, cand);
      if (ops::max_abs(ops::sub(*k_reduced, ops::scale(c, cand))) <= 1e-12 * knorm) {
        if (!nearly_real(c, knorm)) fail("diagonal coupling operator must be Hermitian");
        number_slot = s;
        number_scale = c.real();
      }
    }
    if (number_slot < 0) {
      std::vector<std::pair<int, Complex>> hits;
      SparseOperator recon = SparseOperator::zero(static_cast<int>(rspace.total_dim()));
      for (int s = 0; s < rspace.slot_count(); ++s) {
        const SparseOperator cand =
            ops::embed(ops::annihilation(rspace.mode(s).truncation_dim), rspace, s);
        const Complex c = frobenius(cand, *k_reduced) / frobenius(cand, cand);
        if (std::abs(c) > 1e-12 * knorm) {
          hits.emplace_back(s, c);
          recon = ops::add(recon, ops::scale(c, cand));
        }
      }
      const bool two_equal_units =
          hits.size() == 2 && std::abs(hits[0].second - Complex(1.0, 0.0)) <= 1e-12 &&
          std::abs(hits[1].second - Complex(1.0, 0.0)) <= 1e-12;
      if (!two_equal_units || ops::max_abs(ops::sub(*k_reduced, recon)) > 1e-12 * knorm)
        fail("coupling shape not recognized (supported: scalar*n_s, a_s1 + a_s2)");
      lin_slot1 = hits[0].first;
      lin_slot2 = hits[1].first;
      for (int s : {lin_slot1, lin_slot2})
        if (rspace.mode(s).kind != ModeKind::mechanical)
          fail("linear elimination expects mechanical modes in the coupling");
    }
  }

  // Split the Hamiltonian around the fast slot.
  EliminationResult result{models::MasterEquationModel(rspace), {}};
  auto remap = [&](const Monomial& m) {
    Monomial r = m;
    for (auto& f : r.factors)
      if (f.slot > sf) --f.slot;
    return r;
  };
  TermSum raise_part(rspace);
  TermSum lower_part(rspace);
  Complex fast_free(0.0, 0.0);
  bool saw_fast_free = false;
  for (const auto& m : model.hamiltonian.monomials()) {
    const SlotFactor* ff = nullptr;
    for (const auto& f : m.factors)
      if (f.slot == sf) ff = &f;
    if (ff == nullptr) {
      result.model.hamiltonian.add(remap(m));
      continue;
    }
    const bool is_number = ff->create_pow == 0 && ff->number_pow == 1 && ff->annihilate_pow == 0;
    const bool is_ladder_n = ff->create_pow == 1 && ff->number_pow == 0 && ff->annihilate_pow == 1;
    if ((is_number || is_ladder_n) && m.factors.size() == 1 && m.rotation == 0.0) {
      fast_free += m.coeff;
      saw_fast_free = true;
      continue;
    }
    if (m.rotation != 0.0) fail("time-dependent fast-mode coupling is unsupported");
    Monomial residual = m;
    residual.factors.erase(
        std::remove_if(residual.factors.begin(), residual.factors.end(),
                       [&](const SlotFactor& f) { return f.slot == sf; }),
        residual.factors.end());
    if (ff->create_pow == 1 && ff->number_pow == 0 && ff->annihilate_pow == 0)
      raise_part.add(remap(residual));
    else if (ff->create_pow == 0 && ff->number_pow == 0 && ff->annihilate_pow == 1)
      lower_part.add(remap(residual));
    else
      fail("fast mode enters a term of unsupported shape ('" + m.label + "')");
  }
  if (saw_fast_free) {
    if (!nearly_real(fast_free, std::abs(omega)) ||
        std::abs(fast_free.real() - omega) > 1e-9 * std::max(1.0, std::abs(omega)))
      fail("fast-mode frequency in the model (" + fmt(fast_free.real()) +
           ") conflicts with the passed omega " + fmt(omega));
  }
  if (raise_part.empty()) fail("no coupling to the fast mode found");

  const SparseOperator r_op = raise_part.static_value();
  if (ops::max_abs(ops::sub(lower_part.static_value(), ops::adjoint(r_op))) >
      1e-10 * std::max(1.0, ops::max_abs(r_op)))
    fail("fast-mode coupling is not Hermitian");
  const Complex pref = frobenius(*k_reduced, r_op) / frobenius(*k_reduced, *k_reduced);
  if (ops::max_abs(ops::sub(r_op, ops::scale(pref, *k_reduced))) > 1e-10 * ops::max_abs(r_op))
    fail("fast-mode coupling is not proportional to the supplied operator");

  const double denom = omega * omega + kappa * kappa;
  const double q2 = std::norm(pref) *
                    (number_slot >= 0 ? number_scale * number_scale : 1.0);
  const double h_rate = q2 * omega / denom;
  const double d_rate = q2 * kappa / denom;
  const double adiabaticity = std::sqrt(q2) / std::sqrt(denom);
  if (adiabaticity > 0.1)
    result.warnings.push_back("coupling prefactor / fast scale = " + fmt(adiabaticity) +
                              " exceeds 0.1; the eliminated model degrades");

  if (number_slot >= 0) {
    if (h_rate != 0.0)
      result.model.hamiltonian.add(Monomial{Complex(h_rate, 0.0),
                                            0.0,
                                            {SlotFactor{number_slot, 0, 2, 0}},
                                            "kerr@" + rspace.mode(number_slot).label});
    if (d_rate != 0.0)
      result.model.dissipators.push_back(models::Dissipator{
          d_rate,
          ops::embed(ops::number(rspace.mode(number_slot).truncation_dim), rspace, number_slot),
          "dephasing@" + rspace.mode(number_slot).label});
  } else {
    const int s1 = std::min(lin_slot1, lin_slot2);
    const int s2 = std::max(lin_slot1, lin_slot2);
    if (h_rate != 0.0)
      result.model.hamiltonian.add_with_adjoint(
          Monomial{Complex(0.0, h_rate),
                   0.0,
                   {SlotFactor{s1, 0, 0, 1}, SlotFactor{s2, 1, 0, 0}},
                   "hop@" + rspace.mode(s1).label + "-" + rspace.mode(s2).label});
    if (d_rate != 0.0) {
      const SparseOperator collective =
          ops::add(ops::embed(ops::annihilation(rspace.mode(s1).truncation_dim), rspace, s1),
                   ops::embed(ops::annihilation(rspace.mode(s2).truncation_dim), rspace, s2));
      result.model.dissipators.push_back(models::Dissipator{
          d_rate, collective, "collective@" + rspace.mode(s1).label + "+" + rspace.mode(s2).label});
    }
  }

  const SparseOperator ann_fast =
      ops::embed(ops::annihilation(space.mode(sf).truncation_dim), space, sf);
  for (const auto& dis : model.dissipators) {
    if (dis.op == ann_fast) {
      if (std::abs(dis.rate - kappa) > 1e-9 * std::max(1.0, kappa))
        fail("fast-mode damping rate in the model conflicts with the passed kappa");
      continue;
    }
    const auto sliced = slice_identity(dis.op, space, sf);
    if (!sliced) fail("dissipator '" + dis.label + "' touches the eliminated mode");
    result.model.dissipators.push_back(models::Dissipator{dis.rate, *sliced, dis.label});
  }
  return result;
}

}  // namespace phonlat::transforms
