#include "ssolab/gfc.hpp"

namespace ssolab::gfc {

Init initialize(const GfcParams& p, Complex v_bus, Complex i_inj, const std::string& who) {
  Init out;
  auto& x = out.x;

  const Complex zt(p.r_t, p.x_t);
  const Complex vc_net = v_bus + zt * i_inj;  // capacitor voltage, network frame
  const Real delta = std::arg(vc_net);
  const Complex rot = cis(-delta);  // network -> converter frame

  const Complex it = i_inj * rot;  // v_c lands on the d axis
  const Complex vc(std::abs(vc_net), 0.0);
  if (std::abs(it) > p.i_max)
    throw SpecError(who + ": terminal condition infeasible, |i_t| = " +
                    std::to_string(std::abs(it)) + " exceeds limit " +
                    std::to_string(p.i_max));

  const Complex i_f = it + Complex(0.0, p.c_f) * vc;        // cap draws j*w*C*v at w = 1
  const Complex vm = vc + Complex(p.r_f, p.l_f) * i_f;      // VSC terminal voltage
  const Real p_meas = (vc * std::conj(it)).real();
  const Complex xi_c = p.r_f * i_f / p.k_ic;

  x[IFD] = i_f.real();
  x[IFQ] = i_f.imag();
  x[VCD] = vc.real();
  x[VCQ] = 0.0;
  x[ITD] = it.real();
  x[ITQ] = it.imag();
  x[VDC] = p.v_dc_nom;
  x[DELTA] = delta;
  x[PF] = p_meas;
  x[XIO] = vc.real() / p.k_io;
  x[XIVD] = 0.0;
  x[XIVQ] = 0.0;
  x[XICD] = xi_c.real();
  x[XICQ] = xi_c.imag();

  out.sp.v_star = vc.real();
  // droop must balance at synchronous speed: w* + m_p (p* - p_f) = 1
  out.sp.p_star = p_meas + (1.0 - p.omega_star) / p.m_p;
  out.sp.p_src = (vm * std::conj(i_f)).real();
  return out;
}

Complex residual(const GfcParams& p, const Setpoints& sp, Real omega_b,
                 Eigen::Ref<const VecX> x, Complex v_bus, Real p_delayed, Real du,
                 Eigen::Ref<VecX> dx) {
  const Complex i_f(x[IFD], x[IFQ]);
  const Complex vc(x[VCD], x[VCQ]);
  const Complex it(x[ITD], x[ITQ]);
  const Real v_dc = x[VDC];
  const Real delta = x[DELTA];
  const Complex j(0.0, 1.0);

  const Complex v_g = v_bus * cis(-delta);  // grid voltage in the converter frame

  const Real omega_c = p.omega_star + p.m_p * (sp.p_star + du - p_delayed);

  // outer voltage-magnitude loop -> inner voltage reference on the d axis
  const Real vmag = std::abs(vc);
  const Real e_o = sp.v_star - vmag;
  const Complex v_ref(p.k_po * e_o + p.k_io * x[XIO], 0.0);

  // inner voltage loop -> filter current reference (load + cap feedforward)
  const Complex e_v = v_ref - vc;
  const Complex i_ref = p.k_pv * e_v + p.k_iv * Complex(x[XIVD], x[XIVQ]) + it +
                        j * omega_c * p.c_f * vc;

  // inner current loop -> VSC voltage (grid feedforward + decoupling)
  const Complex e_c = i_ref - i_f;
  const Complex v_m = p.k_pc * e_c + p.k_ic * Complex(x[XICD], x[XICQ]) + vc +
                      j * omega_c * p.l_f * i_f;

  const Complex d_if = (omega_b / p.l_f) * (v_m - vc - p.r_f * i_f - j * omega_c * p.l_f * i_f);
  const Complex d_vc = (omega_b / p.c_f) * (i_f - it - j * omega_c * p.c_f * vc);
  const Complex d_it = (omega_b / p.x_t) * (vc - v_g - p.r_t * it - j * omega_c * p.x_t * it);

  const Real p_ac = (v_m * std::conj(i_f)).real();
  const Real p_meas = (vc * std::conj(it)).real();

  dx[IFD] = d_if.real();
  dx[IFQ] = d_if.imag();
  dx[VCD] = d_vc.real();
  dx[VCQ] = d_vc.imag();
  dx[ITD] = d_it.real();
  dx[ITQ] = d_it.imag();
  dx[VDC] = (sp.p_src - p_ac) / (p.c_dc * v_dc);
  dx[DELTA] = omega_b * (omega_c - 1.0);
  dx[PF] = p.omega_f * (p_meas - x[PF]);
  dx[XIO] = e_o;
  dx[XIVD] = e_v.real();
  dx[XIVQ] = e_v.imag();
  dx[XICD] = e_c.real();
  dx[XICQ] = e_c.imag();

  return it * cis(delta);  // injection, machine base, network frame
}

std::vector<std::string> state_names() {
  return {"i_f_d", "i_f_q", "v_c_d", "v_c_q", "i_t_d", "i_t_q", "v_dc",
          "delta", "p_f",   "xi_o",  "xi_v_d", "xi_v_q", "xi_c_d", "xi_c_q"};
}

}  // namespace ssolab::gfc
