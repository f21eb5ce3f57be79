#include "ssolab/sg.hpp"

namespace ssolab::sg {

namespace {

struct Gammas {
  Real d1, d2, q1, q2;
};

Gammas gammas(const SgParams& p) {
  Gammas g;
  g.d1 = (p.xpp_d - p.x_l) / (p.xp_d - p.x_l);
  g.d2 = (p.xp_d - p.xpp_d) / ((p.xp_d - p.x_l) * (p.xp_d - p.x_l));
  g.q1 = (p.xpp_q - p.x_l) / (p.xp_q - p.x_l);
  g.q2 = (p.xp_q - p.xpp_q) / ((p.xp_q - p.x_l) * (p.xp_q - p.x_l));
  return g;
}

/// rotor, exciter and governor derivatives shared by both variants
void rotor_residual(const SgParams& p, const Setpoints& sp, Real omega_b,
                    Eigen::Ref<const VecX> x, Real i_d, Real i_q, Real t_e, Real v_t,
                    Real du, Eigen::Ref<VecX> dx) {
  const Gammas g = gammas(p);
  const Real dw = x[DW];

  dx[DELTA] = omega_b * dw;
  const Real t_m = x[PM] / (1.0 + dw);
  dx[DW] = (t_m - t_e - p.d * dw) / (2.0 * p.h);
  dx[EQP] = (x[EFD] - x[EQP] -
             (p.x_d - p.xp_d) *
                 (i_d - g.d2 * (x[PSI1D] + (p.xp_d - p.x_l) * i_d - x[EQP]))) /
            p.tp_d0;
  dx[PSI1D] = (-x[PSI1D] + x[EQP] - (p.xp_d - p.x_l) * i_d) / p.tpp_d0;
  dx[EDP] = (-x[EDP] + (p.x_q - p.xp_q) *
                           (i_q - g.q2 * (x[PSI2Q] + (p.xp_q - p.x_l) * i_q + x[EDP]))) /
            p.tp_q0;
  dx[PSI2Q] = (-x[PSI2Q] - x[EDP] - (p.xp_q - p.x_l) * i_q) / p.tpp_q0;
  dx[EFD] = (-x[EFD] + p.k_a * (sp.v_ref - v_t)) / p.t_e;
  dx[PM] = (sp.p_ref + du - dw / p.r_gov - x[PM]) / p.t_gov;
}

Complex subtransient_flux(const SgParams& p, Eigen::Ref<const VecX> x) {
  const Gammas g = gammas(p);
  const Real psi_pp_d = g.d1 * x[EQP] + (1.0 - g.d1) * x[PSI1D];
  const Real psi_pp_q = -g.q1 * x[EDP] + (1.0 - g.q1) * x[PSI2Q];
  return {psi_pp_d, psi_pp_q};
}

}  // namespace

Init initialize(const SgParams& p, Framework fw, Complex v_bus, Complex i_inj,
                const std::string& who) {
  Init out;
  out.x = VecX::Zero(n_states(fw));
  auto& x = out.x;

  // rotor position from the q-axis internal EMF
  const Complex e_int = v_bus + Complex(p.r_a, p.x_q) * i_inj;
  const Real delta = std::arg(e_int) - kPi / 2.0;
  const Complex rot = cis(-delta);
  const Complex vm = v_bus * rot;
  const Complex im = i_inj * rot;
  const Real v_d = vm.real(), v_q = vm.imag();
  const Real i_d = im.real(), i_q = im.imag();

  const Real psi_d = v_q + p.r_a * i_q;
  const Real psi_q = -(v_d + p.r_a * i_d);
  const Real eqp = psi_d + p.xp_d * i_d;
  const Real edp = (p.x_q - p.xp_q) * i_q;
  const Real efd = eqp + (p.x_d - p.xp_d) * i_d;
  const Real t_e = psi_d * i_q - psi_q * i_d;
  if (efd <= 0.0)
    throw SpecError(who + ": machine terminal condition infeasible (E_fd <= 0)");

  x[DELTA] = delta;
  x[DW] = 0.0;
  x[EQP] = eqp;
  x[PSI1D] = eqp - (p.xp_d - p.x_l) * i_d;
  x[EDP] = edp;
  x[PSI2Q] = -edp - (p.xp_q - p.x_l) * i_q;
  x[EFD] = efd;
  x[PM] = t_e;
  if (fw == Framework::SPC) {
    x[PSID] = psi_d;
    x[PSIQ] = psi_q;
  }
  out.sp.v_ref = std::abs(vm) + efd / p.k_a;
  out.sp.p_ref = t_e;
  return out;
}

Complex residual_spc(const SgParams& p, const Setpoints& sp, Real omega_b,
                     Eigen::Ref<const VecX> x, Complex v_bus, Real du, Eigen::Ref<VecX> dx) {
  const Real delta = x[DELTA];
  const Complex vm = v_bus * cis(-delta);
  const Complex psi_pp = subtransient_flux(p, x);

  const Real i_d = (psi_pp.real() - x[PSID]) / p.xpp_d;
  const Real i_q = (psi_pp.imag() - x[PSIQ]) / p.xpp_q;
  const Real omega = 1.0 + x[DW];

  dx[PSID] = omega_b * (vm.real() + p.r_a * i_d + omega * x[PSIQ]);
  dx[PSIQ] = omega_b * (vm.imag() + p.r_a * i_q - omega * x[PSID]);

  const Real t_e = x[PSID] * i_q - x[PSIQ] * i_d;
  rotor_residual(p, sp, omega_b, x, i_d, i_q, t_e, std::abs(vm), du, dx);

  return Complex(i_d, i_q) * cis(delta);
}

void residual_qpc(const SgParams& p, const Setpoints& sp, Real omega_b,
                  Eigen::Ref<const VecX> x, Complex v_bus, Real du, Eigen::Ref<VecX> dx) {
  const Complex vm = v_bus * cis(-x[DELTA]);
  const Complex psi_pp = subtransient_flux(p, x);
  const Complex e_pp(-psi_pp.imag(), psi_pp.real());  // j * psi''
  const Complex im = (e_pp - vm) / Complex(p.r_a, p.xpp_d);

  const Real i_d = im.real(), i_q = im.imag();
  const Real psi_d = psi_pp.real() - p.xpp_d * i_d;
  const Real psi_q = psi_pp.imag() - p.xpp_q * i_q;
  const Real t_e = psi_d * i_q - psi_q * i_d;
  rotor_residual(p, sp, omega_b, x, i_d, i_q, t_e, std::abs(vm), du, dx);
}

Complex norton_admittance(const SgParams& p) { return 1.0 / Complex(p.r_a, p.xpp_d); }

Complex norton_current(const SgParams& p, Eigen::Ref<const VecX> x) {
  const Complex psi_pp = subtransient_flux(p, x);
  const Complex e_pp(-psi_pp.imag(), psi_pp.real());
  return e_pp * norton_admittance(p) * cis(x[DELTA]);
}

std::vector<std::string> state_names(Framework fw) {
  std::vector<std::string> n{"delta", "dw", "e_q_p", "psi_1d", "e_d_p", "psi_2q", "e_fd", "p_m"};
  if (fw == Framework::SPC) {
    n.push_back("psi_d");
    n.push_back("psi_q");
  }
  return n;
}

}  // namespace ssolab::sg
