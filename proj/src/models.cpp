#include "phonlat/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace phonlat::models {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("phonlat::models: " + what);
}

terms::Monomial mono(Complex coeff, double rotation, std::vector<terms::SlotFactor> factors,
                     std::string label) {
  terms::Monomial m;
  m.coeff = coeff;
  m.rotation = rotation;
  m.factors = std::move(factors);
  m.label = std::move(label);
  return m;
}

int slot_with_kind(const CompositeSpace& space, const std::string& label,
                   std::initializer_list<ops::ModeKind> kinds, const char* role) {
  const int slot = space.slot_of(label);
  const auto kind = space.mode(slot).kind;
  for (auto k : kinds)
    if (kind == k) return slot;
  throw std::invalid_argument("phonlat::models: mode '" + label + "' has the wrong kind for " +
                              role);
}

}  // namespace

bool hamiltonian_hermitian(const MasterEquationModel& model, double tol) {
  if (!model.hamiltonian.hermitian_pairing_ok(tol)) return false;
  // Fixed sample times; irrational spacing avoids accidental phase alignment.
  static const double kTimes[] = {0.0,         0.3777127589, 0.9134735,   1.6180339887,
                                  2.2360679775, 3.1415926536, 4.123105626, 5.0990195136,
                                  6.7823299831, 9.8696044011};
  for (double t : kTimes) {
    if (!ops::is_hermitian(model.hamiltonian.value(t), tol)) return false;
  }
  return true;
}

void validate_lattice(const LatticeGraph& graph) {
  require(!graph.nodes.empty(), "lattice has no nodes");
  std::set<std::string> labels;
  for (const auto& n : graph.nodes) {
    require(!n.label.empty(), "lattice node label empty");
    require(labels.insert(n.label).second, "duplicate lattice node label '" + n.label + "'");
    require(std::isfinite(n.kerr), "node kerr strength must be finite");
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : graph.edges) {
    require(labels.count(e.from) && labels.count(e.to),
            "lattice edge references unknown node ('" + e.from + "', '" + e.to + "')");
    require(e.from != e.to, "lattice self-edge on '" + e.from + "'");
    require(std::isfinite(e.hop), "edge hop strength must be finite");
    auto key = std::minmax(e.from, e.to);
    require(seen.insert(key).second,
            "duplicate lattice edge between '" + e.from + "' and '" + e.to + "'");
  }
}

double EffectiveParams::epsilon() const {
  if (f == 0.0) return 0.0;
  if (delta == 0.0)
    throw std::invalid_argument("phonlat::models: epsilon() requires delta != 0 when f != 0");
  return f / delta;
}

MasterEquationModel build_bose_hubbard(const LatticeGraph& graph,
                                       const std::map<std::string, int>& dims) {
  validate_lattice(graph);
  std::vector<ops::ModeSpec> modes;
  for (const auto& n : graph.nodes) {
    const auto it = dims.find(n.label);
    require(it != dims.end(), "missing truncation dim for node '" + n.label + "'");
    modes.push_back({n.label, ops::ModeKind::mechanical, 1.0, 0.0, it->second});
  }
  MasterEquationModel model{CompositeSpace(modes)};
  const auto& space = model.space();
  for (const auto& n : graph.nodes) {
    if (n.kerr == 0.0) continue;
    const int s = space.slot_of(n.label);
    model.hamiltonian.add(mono(n.kerr, 0.0, {{s, 0, 2, 0}}, "kerr@" + n.label));
  }
  for (const auto& e : graph.edges) {
    if (e.hop == 0.0) continue;
    const int si = space.slot_of(e.from);
    const int sj = space.slot_of(e.to);
    model.hamiltonian.add_with_adjoint(
        mono(e.hop, 0.0, {{si, 0, 0, 1}, {sj, 1, 0, 0}}, "hop@" + e.from + "-" + e.to));
  }
  return model;
}

namespace {

std::vector<int> slots_of_kind(const CompositeSpace& space, bool mechanical) {
  std::vector<int> out;
  for (int s = 0; s < space.slot_count(); ++s) {
    const auto kind = space.mode(s).kind;
    if (mechanical && kind == ops::ModeKind::mechanical) out.push_back(s);
    if (!mechanical && kind == ops::ModeKind::auxiliary) out.push_back(s);
  }
  return out;
}

void add_free_terms(MasterEquationModel& model) {
  const auto& space = model.space();
  for (int s = 0; s < space.slot_count(); ++s) {
    const auto& m = space.mode(s);
    model.hamiltonian.add(mono(m.frequency, 0.0, {{s, 0, 1, 0}}, "free@" + m.label));
  }
}

}  // namespace

MasterEquationModel build_radiation_pressure(const Eigen::MatrixXd& g,
                                             const CompositeSpace& space) {
  const auto mech = slots_of_kind(space, true);
  const auto aux = slots_of_kind(space, false);
  require(g.rows() == static_cast<Eigen::Index>(mech.size()) &&
              g.cols() == static_cast<Eigen::Index>(aux.size()),
          "coupling matrix shape must be (mechanical slots) x (auxiliary slots)");
  MasterEquationModel model{space};
  add_free_terms(model);
  for (std::size_t i = 0; i < mech.size(); ++i) {
    for (std::size_t j = 0; j < aux.size(); ++j) {
      const double gij = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (gij == 0.0) continue;
      const std::string tag =
          "rp@" + space.mode(mech[i]).label + "-" + space.mode(aux[j]).label;
      model.hamiltonian.add_with_adjoint(
          mono(gij, 0.0, {{mech[i], 1, 0, 0}, {aux[j], 0, 1, 0}}, tag));
    }
  }
  return model;
}

MasterEquationModel build_displaced_coupling(const Eigen::MatrixXd& g,
                                             const std::vector<DriveTone>& tones,
                                             const CompositeSpace& space) {
  const auto mech = slots_of_kind(space, true);
  const auto aux = slots_of_kind(space, false);
  require(g.rows() == static_cast<Eigen::Index>(mech.size()) &&
              g.cols() == static_cast<Eigen::Index>(aux.size()),
          "coupling matrix shape must be (mechanical slots) x (auxiliary slots)");

  std::vector<std::vector<const DriveTone*>> by_aux(aux.size());
  for (const auto& tone : tones) {
    require(std::isfinite(tone.frequency), "tone frequency must be finite");
    const int slot = space.slot_of(tone.target);
    const auto it = std::find(aux.begin(), aux.end(), slot);
    require(it != aux.end(), "tone target '" + tone.target + "' is not an auxiliary mode");
    by_aux[static_cast<std::size_t>(it - aux.begin())].push_back(&tone);
  }

  MasterEquationModel model{space};
  add_free_terms(model);

  for (std::size_t i = 0; i < mech.size(); ++i) {
    const int sm = mech[i];
    const std::string& ml = space.mode(sm).label;
    for (std::size_t j = 0; j < aux.size(); ++j) {
      const double gij = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (gij == 0.0) continue;
      const int sa = aux[j];
      const std::string& al = space.mode(sa).label;
      const auto& tlist = by_aux[j];

      // Each scalar structure times (a + a†) separately, labels preserved.
      auto add_pair = [&](Complex coeff, double rotation, std::vector<terms::SlotFactor> aux_part,
                          const std::string& tag) {
        auto lower = aux_part;
        lower.push_back({sm, 0, 0, 1});
        auto raise = aux_part;
        raise.push_back({sm, 1, 0, 0});
        model.hamiltonian.add(mono(coeff, rotation, std::move(lower), tag + "*a@" + ml));
        model.hamiltonian.add(mono(coeff, rotation, std::move(raise), tag + "*adag@" + ml));
      };

      add_pair(gij, 0.0, {{sa, 0, 1, 0}}, "bb@" + al);
      for (const auto* tk : tlist) {
        const std::string tl = tk->label.empty() ? ("tone" + std::to_string(tk->frequency)) : tk->label;
        add_pair(gij * tk->amplitude, tk->frequency, {{sa, 1, 0, 0}}, "beta(" + tl + ")*bdag@" + al);
        add_pair(gij * std::conj(tk->amplitude), -tk->frequency, {{sa, 0, 0, 1}},
                 "betaconj(" + tl + ")*b@" + al);
      }
      for (const auto* tk : tlist) {
        for (const auto* tl : tlist) {
          const Complex c = gij * tk->amplitude * std::conj(tl->amplitude);
          const std::string tag = "beta2(" + (tk->label.empty() ? "k" : tk->label) + "," +
                                  (tl->label.empty() ? "k'" : tl->label) + ")@" + al;
          add_pair(c, tk->frequency - tl->frequency, {}, tag);
        }
      }
    }
  }
  return model;
}

double hop_rate(const EffectiveParams& p) {
  const double denom = p.delta_omega * p.delta_omega + p.kappa * p.kappa;
  require(denom > 0.0, "hop rate requires delta_omega and kappa not both zero");
  const double gb = p.g * std::abs(p.beta);
  return gb * gb * p.delta_omega / denom;
}

double hop_induced_rate(const EffectiveParams& p) {
  const double denom = p.delta_omega * p.delta_omega + p.kappa * p.kappa;
  require(denom > 0.0, "induced rate requires delta_omega and kappa not both zero");
  const double gb = p.g * std::abs(p.beta);
  return gb * gb * p.kappa / denom;
}

MasterEquationModel build_effective_hop(const EffectiveParams& p, const CompositeSpace& space,
                                        const std::string& mode1, const std::string& mode2) {
  require(mode1 != mode2, "effective hop requires two distinct modes");
  const int s1 = slot_with_kind(space, mode1, {ops::ModeKind::mechanical}, "effective hop");
  const int s2 = slot_with_kind(space, mode2, {ops::ModeKind::mechanical}, "effective hop");
  const double lambda = hop_rate(p);
  const double gamma = hop_induced_rate(p);

  MasterEquationModel model{space};
  if (lambda != 0.0) {
    model.hamiltonian.add_with_adjoint(mono(Complex(0.0, lambda), 0.0,
                                            {{s1, 0, 0, 1}, {s2, 1, 0, 0}},
                                            "hop@" + mode1 + "-" + mode2));
  }
  if (gamma != 0.0) {
    const auto d1 = space.mode(s1).truncation_dim;
    const auto d2 = space.mode(s2).truncation_dim;
    const auto a_sum = ops::add(ops::embed(ops::annihilation(d1), space, s1),
                                ops::embed(ops::annihilation(d2), space, s2));
    model.dissipators.push_back({gamma, a_sum, "collective@" + mode1 + "+" + mode2});
  }
  return model;
}

MasterEquationModel build_pair_with_mixing(const EffectiveParams& p, const CompositeSpace& space,
                                           const std::string& mech, const std::string& member_c,
                                           const std::string& member_d) {
  const int sa = slot_with_kind(space, mech, {ops::ModeKind::mechanical}, "pair coupling");
  const int sc =
      slot_with_kind(space, member_c, {ops::ModeKind::auxiliary_pair_member}, "pair coupling");
  const int sd =
      slot_with_kind(space, member_d, {ops::ModeKind::auxiliary_pair_member}, "pair coupling");
  require(sc != sd, "pair members must be distinct modes");
  const double omega_pair = space.mode(sc).frequency;
  require(space.mode(sd).frequency == omega_pair,
          "pair members must share a registry frequency");

  MasterEquationModel model{space};
  model.hamiltonian.add(mono(space.mode(sa).frequency, 0.0, {{sa, 0, 1, 0}}, "free@" + mech));
  model.hamiltonian.add(mono(omega_pair, 0.0, {{sc, 0, 1, 0}}, "free@" + member_c));
  model.hamiltonian.add(mono(omega_pair, 0.0, {{sd, 0, 1, 0}}, "free@" + member_d));
  if (p.s != 0.0) {
    model.hamiltonian.add_with_adjoint(
        mono(p.s, 0.0, {{sc, 0, 0, 1}, {sd, 1, 0, 0}}, "mixing@" + member_c + "-" + member_d));
  }
  if (p.f != 0.0) {
    model.hamiltonian.add_with_adjoint(
        mono(p.f, 0.0, {{sc, 0, 1, 0}, {sa, 0, 0, 1}}, "couple+@" + member_c));
    model.hamiltonian.add_with_adjoint(
        mono(-p.f, 0.0, {{sd, 0, 1, 0}, {sa, 0, 0, 1}}, "couple-@" + member_d));
  }
  return model;
}

double kerr_rate(const EffectiveParams& p) {
  const double denom = p.omega_big * p.omega_big + p.kappa * p.kappa;
  require(denom > 0.0, "kerr rate requires omega_big and kappa not both zero");
  const double pref = p.epsilon() * p.f * p.alpha / 4.0;
  return pref * pref * p.omega_big / denom;
}

double kerr_dephasing_rate(const EffectiveParams& p) {
  const double denom = p.omega_big * p.omega_big + p.kappa * p.kappa;
  require(denom > 0.0, "dephasing rate requires omega_big and kappa not both zero");
  const double pref = p.epsilon() * p.f * p.alpha / 4.0;
  return pref * pref * p.kappa / denom;
}

MasterEquationModel build_kerr_effective(const EffectiveParams& p, const CompositeSpace& space,
                                         const std::string& mode) {
  const int s = slot_with_kind(space, mode, {ops::ModeKind::mechanical}, "self-Kerr");
  const double chi = kerr_rate(p);
  const double gamma = kerr_dephasing_rate(p);

  MasterEquationModel model{space};
  if (chi != 0.0) model.hamiltonian.add(mono(chi, 0.0, {{s, 0, 2, 0}}, "kerr@" + mode));
  if (gamma != 0.0) {
    const auto n_op =
        ops::embed(ops::number(space.mode(s).truncation_dim), space, s);
    model.dissipators.push_back({gamma, n_op, "dephasing@" + mode});
  }
  return model;
}

MasterEquationModel build_cross_kerr(double chi_x, const CompositeSpace& space,
                                     const std::string& mode_a, const std::string& mode_b) {
  require(mode_a != mode_b, "cross-Kerr requires two distinct modes (same mode given twice)");
  const int sa = space.slot_of(mode_a);
  const int sb = space.slot_of(mode_b);
  require(std::isfinite(chi_x), "cross-Kerr strength must be finite");
  MasterEquationModel model{space};
  if (chi_x != 0.0) {
    model.hamiltonian.add(
        mono(chi_x, 0.0, {{sa, 0, 1, 0}, {sb, 0, 1, 0}}, "xkerr@" + mode_a + "-" + mode_b));
  }
  return model;
}

MasterEquationModel build_intermediate_qubit_model(const EffectiveParams& p,
                                                   const CompositeSpace& space,
                                                   const std::string& mech,
                                                   const std::string& member_c,
                                                   const std::string& member_d) {
  const int sa = slot_with_kind(space, mech, {ops::ModeKind::mechanical}, "qubit model");
  const int sc =
      slot_with_kind(space, member_c, {ops::ModeKind::auxiliary_pair_member}, "qubit model");
  const int sd =
      slot_with_kind(space, member_d, {ops::ModeKind::auxiliary_pair_member}, "qubit model");
  require(sc != sd, "pair members must be distinct modes");
  const double omega_pair = space.mode(sc).frequency;
  require(space.mode(sd).frequency == omega_pair,
          "pair members must share a registry frequency");

  MasterEquationModel model{space};
  model.hamiltonian.add(
      mono(omega_pair + p.delta, 0.0, {{sc, 0, 1, 0}}, "freq+@" + member_c));
  model.hamiltonian.add(
      mono(omega_pair - p.delta, 0.0, {{sd, 0, 1, 0}}, "freq-@" + member_d));
  if (p.f != 0.0) {
    model.hamiltonian.add_with_adjoint(mono(
        p.f, 0.0, {{sa, 0, 0, 1}, {sc, 1, 0, 0}, {sd, 0, 0, 1}}, "exchange@" + member_c));
  }
  return model;
}

}  // namespace phonlat::models
