#include "tubesolv/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace tubesolv {

std::string format_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

std::string opt_str(const std::optional<Real>& v) { return v ? format_real(*v) : ""; }

} // namespace

void write_conditions_csv(const std::string& path, const std::vector<DioMargin>& margins,
                          const std::vector<OscillationConstants>& constants,
                          const CorollaryReport* homog) {
  if (margins.size() != constants.size())
    throw std::invalid_argument("write_conditions_csv: table size mismatch");
  auto os = open_out(path);
  os << "xi,abs_xi,resonant,margin,Dplus,Dminus,Dbeta,vacuous";
  if (homog) os << ",signChange,maxComponents,corollaryReason";
  os << "\n";
  for (size_t i = 0; i < margins.size(); ++i) {
    const auto& m = margins[i];
    const auto& oc = constants[i];
    os << freq_to_string(m.xi) << "," << format_real(m.r) << "," << (m.resonant ? 1 : 0) << ","
       << format_real(m.margin) << "," << opt_str(oc.Dplus) << "," << opt_str(oc.Dminus) << ","
       << opt_str(oc.Dbeta) << "," << (oc.vacuous ? 1 : 0);
    if (homog) {
      const RayReport* ray = nullptr;
      const int g = freq_gcd(m.xi);
      if (g > 0) {
        const Freq xihat = m.xi / g;
        for (const auto& rr : homog->rays)
          if (rr.xihat == xihat) ray = &rr;
      }
      if (ray)
        os << "," << (ray->sc.changes ? 1 : 0) << "," << ray->scan.max_components << ","
           << (ray->ok ? "ok" : ray->reason);
      else
        os << ",,,";
    }
    os << "\n";
  }
}

void write_verdict_summary(const std::string& path, const Verdict& verdict,
                           const CorollaryReport* homog, const std::vector<std::string>& extra) {
  auto os = open_out(path);
  os << "solvable_at_cutoff = " << (verdict.solvable_at_cutoff ? "true" : "false") << "\n";
  os << "cutoff_K = " << format_real(verdict.K) << "\n";
  os << "dc_ok = " << (verdict.dc_ok ? "true" : "false") << "\n";
  os << "dc_vacuous = " << (verdict.dio.vacuous ? "true" : "false") << "\n";
  os << "dc_Chat = " << format_real(verdict.dio.Chat) << "\n";
  os << "dc_Mhat = " << format_real(verdict.dio.Mhat) << "\n";
  os << "dc_exp1_Mhat = " << format_real(verdict.dio.exp1_Mhat) << "\n";
  os << "dc_exp2_Mhat = " << format_real(verdict.dio.exp2_Mhat) << "\n";
  os << "dc_lemma_consistent = " << (verdict.dio.lemma_consistent ? "true" : "false") << "\n";
  os << "dc_offenders = " << verdict.dio.offenders.size() << "\n";
  os << "osc_bounded = " << (verdict.osc_bounded ? "true" : "false") << "\n";
  os << "supD = " << format_real(verdict.supD) << "\n";
  os << "envelope_slope = " << format_real(verdict.envelope_slope) << "\n";
  if (homog) {
    os << "corollary_solvable = " << (homog->solvable ? "true" : "false") << "\n";
    os << "corollary_agrees = " << (homog->solvable == verdict.solvable_at_cutoff ? "true" : "false")
       << "\n";
  }
  for (const auto& r : verdict.reasons) os << "reason = " << r << "\n";
  if (homog)
    for (const auto& r : homog->reasons) os << "corollary_reason = " << r << "\n";
  for (const auto& e : extra) os << e << "\n";
}

void write_margin_plot(const std::string& path, const std::vector<DioMargin>& margins) {
  auto os = open_out(path);
  os << "abs_xi,margin,exp_margin1,exp_margin2,resonant\n";
  for (const auto& m : margins)
    os << format_real(m.r) << "," << format_real(m.margin) << "," << format_real(m.exp_margin1)
       << "," << format_real(m.exp_margin2) << "," << (m.resonant ? 1 : 0) << "\n";
}

void write_dstar_plot(const std::string& path, const std::vector<OscillationConstants>& constants) {
  auto os = open_out(path);
  os << "abs_xi,Dplus,Dminus,Dbeta,vacuous\n";
  for (const auto& oc : constants)
    os << format_real(oc.r) << "," << opt_str(oc.Dplus) << "," << opt_str(oc.Dminus) << ","
       << opt_str(oc.Dbeta) << "," << (oc.vacuous ? 1 : 0) << "\n";
}

void write_solve_report(const std::string& path, const SolveDiagnostics& diag,
                        const FrequencyBox& box) {
  auto os = open_out(path);
  os << "residual_sup = " << format_real(diag.residual_sup) << "\n";
  os << "residual_rel = " << format_real(diag.residual_rel) << "\n";
  os << "f_sup = " << format_real(diag.f_sup) << "\n";
  os << "u_decay_exponent_order0 = " << format_real(diag.u_decay0.exponent) << "\n";
  os << "u_decay_exponent_order1 = " << format_real(diag.u_decay1.exponent) << "\n";
  os << "f_decay_exponent = " << format_real(diag.f_decay.exponent) << "\n";
  os << "saturated_modes = " << diag.saturated_modes.size() << "\n";
  for (int i : diag.saturated_modes) os << "saturated = " << freq_to_string(box[i]) << "\n";
  os << "windowed_modes = " << diag.windowed_modes.size() << "\n";
  for (int i : diag.windowed_modes) os << "windowed = " << freq_to_string(box[i]) << "\n";
  os << "small_divisor_modes = " << diag.small_divisor_modes.size() << "\n";
  for (int i : diag.small_divisor_modes) os << "small_divisor = " << freq_to_string(box[i]) << "\n";
}

namespace {

nlohmann::json freq_json(const Freq& xi) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < xi.size(); ++i) a.push_back(xi[i]);
  return a;
}

} // namespace

void write_forged_sidecar(const std::string& path, const ForgedRHS& forged) {
  nlohmann::json j;
  j["tag"] = forged.tag;
  j["phi_integral"] = forged.phi_integral;
  j["modes"] = nlohmann::json::array();
  for (const auto& m : forged.modes) {
    nlohmann::json jm;
    jm["xi"] = freq_json(m.xi);
    jm["abs_xi"] = m.r;
    jm["k"] = m.k;
    jm["ok"] = m.ok;
    jm["note"] = m.note;
    jm["t_k_node"] = m.t_k;
    jm["variant"] = m.variant == ModeBranch::NonResonantForward    ? "forward"
                    : m.variant == ModeBranch::NonResonantBackward ? "backward"
                                                                   : "resonant";
    jm["prefactor_re"] = m.prefactor.real();
    jm["prefactor_im"] = m.prefactor.imag();
    jm["prefactor_abs"] = m.prefactor_abs;
    jm["window_start"] = m.win_start;
    jm["window_steps"] = m.win_steps;
    jm["window2_start"] = m.win2_start;
    jm["target"] = m.target;
    jm["measured"] = m.measured;
    jm["arc_target"] = m.arc_target;
    jm["arc_measured"] = m.arc_measured;
    jm["compat_rel"] = m.compat_rel;
    j["modes"].push_back(jm);
  }
  auto os = open_out(path);
  os << j.dump(2) << "\n";
}

void write_forged_bounds(const std::string& path, const ForgedRHS& forged) {
  auto os = open_out(path);
  os << "xi,abs_xi,k,ok,variant,target,measured,arc_target,arc_measured,compat_rel,note\n";
  for (const auto& m : forged.modes) {
    os << freq_to_string(m.xi) << "," << format_real(m.r) << "," << m.k << "," << (m.ok ? 1 : 0)
       << ","
       << (m.variant == ModeBranch::NonResonantForward    ? "forward"
           : m.variant == ModeBranch::NonResonantBackward ? "backward"
                                                          : "resonant")
       << "," << format_real(m.target) << "," << format_real(m.measured) << ","
       << format_real(m.arc_target) << "," << format_real(m.arc_measured) << ","
       << format_real(m.compat_rel) << "," << m.note << "\n";
  }
}

} // namespace tubesolv
