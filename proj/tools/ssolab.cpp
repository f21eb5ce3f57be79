// ssolab: dual-framework power-system dynamics laboratory.
//
// Subcommands: pf, modes, sv, sweep, sim, prony, classify. Every run drops
// its artifacts plus a manifest.json into --out-dir. Data artifacts (CSV,
// JSON, SVG) are byte-stable across reruns: floats are printed with 12
// significant digits and every file carries the parameter-ledger hash. The
// manifest additionally records a wall-clock timestamp, so it is the one
// file that differs between identical runs.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ssolab/assemble.hpp"
#include "ssolab/freq_response.hpp"
#include "ssolab/grouping.hpp"
#include "ssolab/linearize.hpp"
#include "ssolab/modes.hpp"
#include "ssolab/powerflow.hpp"
#include "ssolab/prony.hpp"
#include "ssolab/simulate.hpp"
#include "ssolab/sweep.hpp"
#include "ssolab/system_spec.hpp"

namespace fs = std::filesystem;
using namespace ssolab;

namespace {

constexpr Real kBandLo = 5.0;   // subsynchronous band of interest, Hz
constexpr Real kBandHi = 55.0;
constexpr Real kSsoZetaMax = 0.05;  // damping below this flags an SSO concern

// ---------------------------------------------------------------- formatting

std::string fmt12(Real v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", v);
  return std::string(b) == "-0" ? "0" : b;
}

std::string jesc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      o += '\\';
      o += c;
    } else if (c == '\n') {
      o += "\\n";
    } else {
      o += c;
    }
  }
  return o;
}

std::string jstr(const std::string& s) { return "\"" + jesc(s) + "\""; }

std::string jlist(const std::vector<std::string>& v) {
  std::string o = "[";
  for (size_t i = 0; i < v.size(); ++i) o += (i ? ", " : "") + jstr(v[i]);
  return o + "]";
}

std::string fnv1a_hex(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char b[17];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

// ------------------------------------------------------------------ run glue

struct Run {
  fs::path out_dir = ".";
  std::string command;
  std::string spec_path;
  std::string framework = "per-spec";
  Real tau_p = -1.0;  // seconds; negative means per-spec
  std::string hash;
  std::string argv_line;
  std::vector<std::string> outputs;

  fs::path path(const std::string& name) { return out_dir / name; }

  void write(const std::string& name, const std::string& text) {
    fs::create_directories(out_dir);
    const fs::path p = out_dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw SpecError("cannot write output file: " + p.string());
    out << text;
    outputs.push_back(name);
  }

  std::string csv_head(const std::string& cols) const {
    return "# ledger " + hash + "\n" + cols + "\n";
  }

  void finish() {
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    std::ostringstream os;
    os << "{\n";
    os << "  \"command\": " << jstr(command) << ",\n";
    os << "  \"spec\": " << jstr(spec_path) << ",\n";
    os << "  \"framework\": " << jstr(framework) << ",\n";
    os << "  \"tau_p_s\": " << (tau_p < 0 ? "null" : fmt12(tau_p)) << ",\n";
    os << "  \"ledger\": " << jstr(hash) << ",\n";
    std::vector<std::string> all = outputs;
    all.push_back("manifest.json");
    os << "  \"outputs\": " << jlist(all) << ",\n";
    os << "  \"argv\": " << jstr(argv_line) << ",\n";
    os << "  \"generated_at\": " << jstr(stamp) << "\n";
    os << "}\n";
    write("manifest.json", os.str());
    outputs.pop_back();
  }
};

// --------------------------------------------------------------- svg plotting

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kNColors = 8;

std::string px(Real v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

Real nice_step(Real span) {
  const Real raw = span / 5.0;
  const Real mag = std::pow(10.0, std::floor(std::log10(raw)));
  const Real n = raw / mag;
  return (n < 1.5 ? 1.0 : n < 3.5 ? 2.0 : n < 7.5 ? 5.0 : 10.0) * mag;
}

std::string tick_label(Real v) {
  char b[32];
  std::snprintf(b, sizeof b, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return b;
}

struct SvgPlot {
  Real x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool logx = false;
  int w = 860, h = 520, ml = 70, mr = 24, mt = 42, mb = 56;
  std::string title, xlabel, ylabel;
  std::ostringstream body;
  std::vector<std::pair<std::string, std::string>> legend;  // label, color

  Real tx(Real x) const {
    const Real u = logx ? std::log10(x / x0) / std::log10(x1 / x0) : (x - x0) / (x1 - x0);
    return ml + u * (w - ml - mr);
  }
  Real ty(Real y) const { return h - mb - (y - y0) / (y1 - y0) * (h - mb - mt); }

  void span_y(Real lo, Real hi) {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const Real pad = 0.06 * (hi - lo);
    y0 = lo - pad;
    y1 = hi + pad;
  }

  void polyline(const std::vector<std::pair<Real, Real>>& pts, const std::string& color,
                const std::string& dash = "") {
    if (pts.empty()) return;
    const size_t stride = pts.size() > 2000 ? (pts.size() + 1999) / 2000 : 1;
    body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (!dash.empty()) body << " stroke-dasharray=\"" << dash << "\"";
    body << " points=\"";
    for (size_t i = 0; i < pts.size(); i += stride)
      body << px(tx(pts[i].first)) << "," << px(ty(pts[i].second)) << " ";
    if ((pts.size() - 1) % stride != 0)
      body << px(tx(pts.back().first)) << "," << px(ty(pts.back().second));
    body << "\"/>\n";
  }

  void marker(Real x, Real y, const std::string& color) {
    body << "<circle cx=\"" << px(tx(x)) << "\" cy=\"" << px(ty(y))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }

  void note(Real x, Real y, const std::string& text) {
    body << "<text x=\"" << px(tx(x) + 5) << "\" y=\"" << px(ty(y) - 5)
         << "\" font-size=\"10\" fill=\"#555\">" << text << "</text>\n";
  }

  std::string render(const std::string& hash) const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<!-- ledger " << hash << " -->\n";
    os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";
    // frame
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr
       << "\" height=\"" << h - mt - mb << "\" fill=\"none\" stroke=\"#333\"/>\n";
    // x ticks
    auto xtick = [&](Real v) {
      const Real X = tx(v);
      os << "<line x1=\"" << px(X) << "\" y1=\"" << h - mb << "\" x2=\"" << px(X) << "\" y2=\""
         << h - mb + 5 << "\" stroke=\"#333\"/>\n";
      os << "<line x1=\"" << px(X) << "\" y1=\"" << mt << "\" x2=\"" << px(X) << "\" y2=\""
         << h - mb << "\" stroke=\"#eee\"/>\n";
      os << "<text x=\"" << px(X) << "\" y=\"" << h - mb + 18
         << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(v) << "</text>\n";
    };
    if (logx) {
      for (Real d = std::pow(10.0, std::floor(std::log10(x0))); d <= x1 * 1.0001; d *= 10.0)
        for (Real m : {1.0, 2.0, 5.0}) {
          const Real v = d * m;
          if (v >= x0 * 0.9999 && v <= x1 * 1.0001) xtick(v);
        }
    } else {
      const Real st = nice_step(x1 - x0);
      for (Real v = std::ceil(x0 / st) * st; v <= x1 + 1e-9 * st; v += st) xtick(v);
    }
    // y ticks
    const Real st = nice_step(y1 - y0);
    for (Real v = std::ceil(y0 / st) * st; v <= y1 + 1e-9 * st; v += st) {
      const Real Y = ty(v);
      os << "<line x1=\"" << ml - 5 << "\" y1=\"" << px(Y) << "\" x2=\"" << ml << "\" y2=\""
         << px(Y) << "\" stroke=\"#333\"/>\n";
      os << "<line x1=\"" << ml << "\" y1=\"" << px(Y) << "\" x2=\"" << w - mr << "\" y2=\""
         << px(Y) << "\" stroke=\"#eee\"/>\n";
      os << "<text x=\"" << ml - 9 << "\" y=\"" << px(Y + 4)
         << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(v) << "</text>\n";
    }
    os << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 14
       << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    os << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << (mt + h - mb) / 2 << ")\">" << ylabel << "</text>\n";
    os << body.str();
    for (size_t i = 0; i < legend.size(); ++i) {
      const int y = mt + 16 + static_cast<int>(i) * 18;
      os << "<line x1=\"" << w - mr - 150 << "\" y1=\"" << y << "\" x2=\"" << w - mr - 120
         << "\" y2=\"" << y << "\" stroke=\"" << legend[i].second
         << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << w - mr - 114 << "\" y=\"" << y + 4 << "\" font-size=\"12\">"
         << legend[i].first << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
  }
};

// ----------------------------------------------------------------- flag logic

Real parse_delay(std::string s) {
  const auto strip = [&](const std::string& suffix) {
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.resize(s.size() - suffix.size());
      return true;
    }
    return false;
  };
  Real scale = 1.0;
  if (strip("ms"))
    scale = 1e-3;
  else
    strip("s");
  try {
    size_t used = 0;
    const Real v = std::stod(s, &used) * scale;
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SpecError("bad delay value \"" + s + "\" (use seconds, or an ms suffix)");
  }
}

// "0,1,2,3,5,10ms": a unit on the final entry applies to every bare entry
std::vector<Real> parse_delay_list(const std::string& list) {
  std::vector<std::string> toks;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (!tok.empty()) toks.push_back(tok);
  }
  if (toks.empty()) throw SpecError("delay list is empty");
  std::string unit;
  std::string& last = toks.back();
  if (last.size() > 2 && last.compare(last.size() - 2, 2, "ms") == 0)
    unit = "ms";
  else if (last.size() > 1 && last.back() == 's')
    unit = "s";
  std::vector<Real> out;
  for (std::string& t : toks) {
    const bool suffixed = (t.size() > 2 && t.compare(t.size() - 2, 2, "ms") == 0) ||
                          (t.size() > 1 && t.back() == 's');
    out.push_back(parse_delay(suffixed ? t : t + unit));
  }
  return out;
}

std::pair<Real, Real> parse_range(const std::string& s, const std::string& what) {
  const size_t c = s.find(':');
  if (c == std::string::npos)
    throw SpecError(what + " must be \"lo:hi\", got \"" + s + "\"");
  try {
    return {std::stod(s.substr(0, c)), std::stod(s.substr(c + 1))};
  } catch (const std::exception&) {
    throw SpecError(what + " must be \"lo:hi\", got \"" + s + "\"");
  }
}

struct GlobalFlags {
  std::string framework;  // "", "spc", "qpc", "both" (sv only)
  std::string tau_p;      // raw; parsed on use
  int pade = -1;
  int jobs = 1;
  std::string out_dir = ".";
};

SystemSpec load_with_overrides(const std::string& path, const GlobalFlags& g, Run& run) {
  SystemSpec spec = load_system(path);
  run.spec_path = path;
  if (!g.framework.empty() && g.framework != "both") {
    spec.framework = g.framework == "qpc" ? Framework::QPC : Framework::SPC;
  }
  run.framework = to_string(spec.framework);
  if (!g.tau_p.empty()) {
    const Real tau = parse_delay(g.tau_p);
    run.tau_p = tau;
    spec.defaults.gfc.tau_p = tau;
    for (auto& m : spec.machines) m.gfc.tau_p = tau;
  }
  if (g.pade >= 0) spec.defaults.pade_order = g.pade;
  run.hash = ledger_hash(spec);
  return spec;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --------------------------------------------------------------- csv reading

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return static_cast<int>(i);
    return -1;
  }
};

Table read_csv(const std::string& text, const std::string& path) {
  Table t;
  std::stringstream ss(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ls(l);
    std::string cell;
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (t.cols.empty())
      t.cols = split(line);
    else
      t.rows.push_back(split(line));
  }
  if (t.cols.empty()) throw SpecError("no header row in " + path);
  return t;
}

Real cell_num(const std::vector<std::string>& row, int idx, const std::string& path) {
  if (idx < 0 || idx >= static_cast<int>(row.size()))
    throw SpecError("short row in " + path);
  try {
    return std::stod(row[idx]);
  } catch (const std::exception&) {
    throw SpecError("non-numeric cell \"" + row[idx] + "\" in " + path);
  }
}

// -------------------------------------------------------------- mode reports

struct ModeReport {
  int id = 0;
  const Mode* mode = nullptr;
  bool sso = false;
  std::vector<std::string> dominant;
  std::optional<Grouping> grouping;
  std::vector<ShapeEntry> shape;
};

std::vector<ModeReport> build_mode_reports(const AssembledModel& model, const LinearModel& lm,
                                           const ModeSet& ms) {
  const auto obs = default_observables(model);
  std::vector<ModeReport> out;
  int id = 0;
  for (const Mode& m : ms.modes) {
    ModeReport r;
    r.id = ++id;
    r.mode = &m;
    const bool oscillatory = m.f_hz > 1e-6;
    r.sso = oscillatory && m.f_hz >= kBandLo && m.f_hz <= kBandHi && m.zeta < kSsoZetaMax;
    if (ms.vectors_ok && m.part.size()) r.dominant = dominant_states(ms, m);
    if (ms.vectors_ok && oscillatory && m.right.size()) {
      r.shape = mode_shape(lm, m, obs);
      r.grouping = classify_grouping(r.shape);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string grouping_json(const Grouping& g) {
  std::ostringstream os;
  os << "{\"kind\": " << jstr(to_string(g.kind)) << ", \"group_a\": " << jlist(g.group_a)
     << ", \"group_b\": " << jlist(g.group_b) << "}";
  return os.str();
}

// --------------------------------------------------------------- subcommands

int cmd_pf(const std::string& spec_path, const GlobalFlags& g, Run& run) {
  const SystemSpec spec = load_with_overrides(spec_path, g, run);
  const PowerFlowSolution sol = run_power_flow(spec);

  std::printf("%s: power flow converged in %d iterations, mismatch %.3e\n", spec.name.c_str(),
              sol.iterations, sol.mismatch_inf);
  std::printf("%-14s %5s %5s %10s %12s\n", "node", "bus", "area", "V (pu)", "angle (deg)");
  for (size_t n = 0; n < sol.graph.nodes.size(); ++n) {
    const NetNode& nd = sol.graph.nodes[n];
    if (nd.bus_id < 0) continue;
    std::printf("%-14s %5d %5d %10.4f %12.3f\n", nd.name.c_str(), nd.bus_id, nd.area,
                sol.v_mag[n], sol.v_ang[n] * 180.0 / kPi);
  }
  for (size_t k = 0; k < spec.machines.size(); ++k)
    std::printf("%-8s P %8.4f pu   Q %8.4f pu (system base)\n", spec.machines[k].name.c_str(),
                sol.machine_s[k].real(), sol.machine_s[k].imag());
  if (!spec.tie_corridor.empty())
    std::printf("tie corridor flow: %.4f pu (%.1f MW)\n", sol.tie_flow_pu,
                sol.tie_flow_pu * spec.s_base_mva);

  std::ostringstream os;
  os << "{\n  \"ledger\": " << jstr(run.hash) << ",\n";
  os << "  \"spec\": " << jstr(spec_path) << ",\n";
  os << "  \"iterations\": " << sol.iterations << ",\n";
  os << "  \"mismatch_inf\": " << fmt12(sol.mismatch_inf) << ",\n";
  os << "  \"tie_flow_pu\": " << fmt12(sol.tie_flow_pu) << ",\n";
  os << "  \"nodes\": [\n";
  for (size_t n = 0; n < sol.graph.nodes.size(); ++n) {
    const NetNode& nd = sol.graph.nodes[n];
    os << "    {\"name\": " << jstr(nd.name) << ", \"bus\": " << nd.bus_id
       << ", \"area\": " << nd.area << ", \"v_pu\": " << fmt12(sol.v_mag[n])
       << ", \"angle_rad\": " << fmt12(sol.v_ang[n]) << "}"
       << (n + 1 < sol.graph.nodes.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"machines\": [\n";
  for (size_t k = 0; k < spec.machines.size(); ++k) {
    os << "    {\"name\": " << jstr(spec.machines[k].name)
       << ", \"p_pu\": " << fmt12(sol.machine_s[k].real())
       << ", \"q_pu\": " << fmt12(sol.machine_s[k].imag()) << "}"
       << (k + 1 < spec.machines.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  run.write("pf.json", os.str());
  return 0;
}

int cmd_modes(const std::string& spec_path, const GlobalFlags& g, Run& run) {
  const SystemSpec spec = load_with_overrides(spec_path, g, run);
  const AssembledModel model = assemble(spec);
  const OperatingPoint op = initialize_states(model);
  const LinearModel lm = linearize(model, op, spec.defaults.pade_order);
  const ModeSet ms = eig_modes(lm);
  const std::vector<ModeReport> reps = build_mode_reports(model, lm, ms);

  std::ostringstream os;
  os << "{\n  \"ledger\": " << jstr(run.hash) << ",\n";
  os << "  \"spec\": " << jstr(spec_path) << ",\n";
  os << "  \"framework\": " << jstr(to_string(spec.framework)) << ",\n";
  os << "  \"pade_order\": " << spec.defaults.pade_order << ",\n";
  os << "  \"n_states\": " << lm.n() << ",\n";
  os << "  \"vectors_ok\": " << (ms.vectors_ok ? "true" : "false") << ",\n";
  os << "  \"band_hz\": [" << fmt12(kBandLo) << ", " << fmt12(kBandHi) << "],\n";
  os << "  \"sso_zeta_max\": " << fmt12(kSsoZetaMax) << ",\n";
  os << "  \"modes\": [\n";
  for (size_t i = 0; i < reps.size(); ++i) {
    const ModeReport& r = reps[i];
    const Mode& m = *r.mode;
    os << "    {\"id\": " << r.id << ", \"f_hz\": " << fmt12(m.f_hz)
       << ", \"zeta_pct\": " << fmt12(100.0 * m.zeta)
       << ", \"sigma_per_s\": " << fmt12(m.lambda.real())
       << ", \"sso_band\": " << (r.sso ? "true" : "false")
       << ", \"dominant_states\": " << jlist(r.dominant) << ", \"grouping\": "
       << (r.grouping ? grouping_json(*r.grouping) : std::string("null")) << "}"
       << (i + 1 < reps.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  run.write("modes.json", os.str());

  std::ostringstream cs;
  cs << run.csv_head("mode_id,f_hz,machine,area,magnitude,angle_deg");
  int n_sso = 0;
  for (const ModeReport& r : reps) {
    if (!r.sso) continue;
    ++n_sso;
    for (const ShapeEntry& e : r.shape)
      cs << r.id << "," << fmt12(r.mode->f_hz) << "," << e.machine << "," << e.area << ","
         << fmt12(std::abs(e.value)) << "," << fmt12(std::arg(e.value) * 180.0 / kPi) << "\n";
  }
  run.write("compass.csv", cs.str());

  std::printf("%s (%s): %d states, %zu distinct modes, %d in the %g-%g Hz band\n",
              spec.name.c_str(), to_string(spec.framework).c_str(), lm.n(), reps.size(), n_sso,
              kBandLo, kBandHi);
  for (const ModeReport& r : reps) {
    if (!r.sso) continue;
    std::printf("  mode %d: %.2f Hz, zeta %.2f %%", r.id, r.mode->f_hz, 100.0 * r.mode->zeta);
    if (r.grouping) {
      std::printf(", %s", to_string(r.grouping->kind).c_str());
      std::printf(" (A:");
      for (const auto& s : r.grouping->group_a) std::printf(" %s", s.c_str());
      std::printf("%s)", r.grouping->group_b.empty() ? "" : " | B: ...");
    }
    std::printf("\n");
  }
  return 0;
}

int cmd_sv(const std::string& spec_path, const GlobalFlags& g, Real fmin, Real fmax, int points,
           Run& run) {
  if (!(fmin < fmax)) throw SpecError("--fmin must be below --fmax");
  if (fmin <= 0) throw SpecError("--fmin must be positive");
  if (points < 1) throw SpecError("--points must be at least 1");

  VecX grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = points == 1 ? fmin
                          : fmin * std::pow(fmax / fmin, static_cast<Real>(i) / (points - 1));

  std::vector<Framework> fws;
  if (g.framework.empty() || g.framework == "both")
    fws = {Framework::SPC, Framework::QPC};
  else
    fws = {g.framework == "qpc" ? Framework::QPC : Framework::SPC};

  SvgPlot plot;
  plot.logx = true;
  plot.x0 = fmin;
  plot.x1 = fmax;
  plot.title = "Largest singular value of the disturbance response";
  plot.xlabel = "frequency (Hz)";
  plot.ylabel = "sigma_max (dB)";
  Real lo = 1e30, hi = -1e30;
  std::vector<std::vector<std::pair<Real, Real>>> curves;

  SystemSpec spec = load_with_overrides(spec_path, g, run);
  run.framework = fws.size() == 2 ? "both" : to_string(fws[0]);
  for (size_t k = 0; k < fws.size(); ++k) {
    spec.framework = fws[k];
    const AssembledModel model = assemble(spec);
    const OperatingPoint op = initialize_states(model);
    const LinearModel lm = linearize(model, op, spec.defaults.pade_order);
    const FreqResponse fr = sigma_max_response(lm, grid, g.jobs);

    std::ostringstream cs;
    cs << run.csv_head("freq_hz,sigma_max_db");
    std::vector<std::pair<Real, Real>> curve;
    Real peak_db = -1e30, peak_f = 0.0;
    for (int i = 0; i < points; ++i) {
      const Real db = 20.0 * std::log10(fr.sigma_max[i]);
      cs << fmt12(fr.f_hz[i]) << "," << fmt12(db) << "\n";
      if (std::isfinite(db)) {
        curve.push_back({fr.f_hz[i], db});
        lo = std::min(lo, db);
        hi = std::max(hi, db);
        if (db > peak_db) {
          peak_db = db;
          peak_f = fr.f_hz[i];
        }
      }
    }
    const std::string name = fws[k] == Framework::SPC ? "sv_spc.csv" : "sv_qpc.csv";
    run.write(name, cs.str());
    curves.push_back(std::move(curve));
    std::printf("%s: peak %.2f dB at %.2f Hz -> %s\n", to_string(fws[k]).c_str(), peak_db,
                peak_f, name.c_str());
  }

  plot.span_y(lo, hi);
  for (size_t k = 0; k < fws.size(); ++k) {
    plot.polyline(curves[k], kColors[k], fws[k] == Framework::QPC ? "6,4" : "");
    plot.legend.push_back({to_string(fws[k]), kColors[k]});
  }
  run.write("sv.svg", plot.render(run.hash));
  return 0;
}

int cmd_sweep(const std::string& spec_path, const GlobalFlags& g, const std::string& tau_list,
              Run& run) {
  const std::vector<Real> taus = parse_delay_list(tau_list);
  const SystemSpec spec = load_with_overrides(spec_path, g, run);
  std::optional<Framework> fw;
  if (!g.framework.empty() && g.framework != "both")
    fw = g.framework == "qpc" ? Framework::QPC : Framework::SPC;

  const SweepResult sr =
      delay_sweep(spec, taus, spec.defaults.pade_order, kBandLo, kBandHi, fw, g.jobs);
  if (sr.n_tracked == 0)
    std::fprintf(stderr, "warning: no modes inside %g-%g Hz at the first delay point\n", kBandLo,
                 kBandHi);

  std::ostringstream cs;
  cs << run.csv_head("tau_ms,mode_id,f_hz,zeta_pct,sigma_per_s,jumped");
  for (const SweepRow& r : sr.rows) {
    cs << fmt12(1e3 * r.tau) << "," << r.mode_id << "," << fmt12(r.f_hz) << ","
       << fmt12(100.0 * r.zeta) << "," << fmt12(r.sigma) << "," << (r.jumped ? 1 : 0) << "\n";
    if (r.jumped)
      std::fprintf(stderr, "warning: mode %d jumped more than 5 Hz reaching tau = %g ms\n",
                   r.mode_id, 1e3 * r.tau);
  }
  run.write("loci.csv", cs.str());

  SvgPlot plot;
  plot.title = "Subsynchronous mode loci over the measurement delay";
  plot.xlabel = "sigma (1/s)";
  plot.ylabel = "frequency (Hz)";
  Real xlo = 0, xhi = 0, ylo = 1e30, yhi = -1e30;
  for (const SweepRow& r : sr.rows) {
    xlo = std::min(xlo, r.sigma);
    xhi = std::max(xhi, r.sigma);
    ylo = std::min(ylo, r.f_hz);
    yhi = std::max(yhi, r.f_hz);
  }
  if (sr.rows.empty()) {
    xlo = -1;
    xhi = 1;
    ylo = kBandLo;
    yhi = kBandHi;
  }
  const Real xpad = 0.08 * std::max(xhi - xlo, 1e-3);
  plot.x0 = xlo - xpad;
  plot.x1 = xhi + xpad;
  plot.span_y(ylo, yhi);
  plot.body << "<line x1=\"" << px(plot.tx(0.0)) << "\" y1=\"" << plot.mt << "\" x2=\""
            << px(plot.tx(0.0)) << "\" y2=\"" << plot.h - plot.mb
            << "\" stroke=\"#999\" stroke-dasharray=\"3,3\"/>\n";
  for (int id = 0; id < sr.n_tracked; ++id) {
    std::vector<std::pair<Real, Real>> pts;
    for (const SweepRow& r : sr.rows)
      if (r.mode_id == id) pts.push_back({r.sigma, r.f_hz});
    const std::string color = kColors[id % kNColors];
    plot.polyline(pts, color);
    for (const SweepRow& r : sr.rows)
      if (r.mode_id == id) {
        plot.marker(r.sigma, r.f_hz, color);
        if (id == 0) plot.note(r.sigma, r.f_hz, tick_label(1e3 * r.tau) + " ms");
      }
    plot.legend.push_back({"mode " + std::to_string(id), color});
  }
  run.write("loci.svg", plot.render(run.hash));

  for (const SweepRow& r : sr.rows)
    std::printf("tau %6.2f ms  mode %d  f %7.3f Hz  zeta %8.3f %%%s\n", 1e3 * r.tau, r.mode_id,
                r.f_hz, 100.0 * r.zeta, r.jumped ? "  [jumped]" : "");
  return 0;
}

int cmd_sim(const std::string& spec_path, const std::string& scenario_path, const GlobalFlags& g,
            Run& run) {
  const SystemSpec spec = load_with_overrides(spec_path, g, run);
  const Scenario scn = load_scenario(scenario_path);
  const AssembledModel model = assemble(spec);
  const OperatingPoint op = initialize_states(model);
  const TimeSeries ts = simulate(model, op, scn);

  std::ostringstream cs;
  std::string header = "time_s";
  for (const std::string& n : ts.names) header += "," + n;
  cs << run.csv_head(header);
  for (int i = 0; i < ts.t.size(); ++i) {
    cs << fmt12(ts.t[i]);
    for (int j = 0; j < ts.data.cols(); ++j) cs << "," << fmt12(ts.data(i, j));
    cs << "\n";
  }
  run.write("timeseries.csv", cs.str());

  std::ostringstream ms;
  ms << "{\n  \"ledger\": " << jstr(run.hash) << ",\n";
  ms << "  \"spec\": " << jstr(spec_path) << ",\n";
  ms << "  \"scenario\": " << jstr(scenario_path) << ",\n";
  ms << "  \"framework\": " << jstr(to_string(ts.framework)) << ",\n";
  ms << "  \"f_base_hz\": " << fmt12(ts.f_base_hz) << ",\n";
  ms << "  \"duration_s\": " << fmt12(scn.duration) << ",\n";
  ms << "  \"dt_s\": " << fmt12(scn.dt) << ",\n";
  ms << "  \"decimation\": " << scn.decimation << ",\n";
  ms << "  \"integrator\": "
     << jstr(scn.integrator == Integrator::RK4 ? "rk4" : "trapezoidal") << ",\n";
  ms << "  \"diverged\": " << (ts.diverged ? "true" : "false") << ",\n";
  ms << "  \"samples\": " << ts.t.size() << ",\n  \"machines\": [\n";
  for (size_t k = 0; k < ts.machines.size(); ++k) {
    const auto& m = ts.machines[k];
    ms << "    {\"name\": " << jstr(m.name) << ", \"kind\": " << jstr(to_string(m.kind))
       << ", \"s_ratio\": " << fmt12(m.s_ratio) << ", \"r_t\": " << fmt12(m.r_t) << "}"
       << (k + 1 < ts.machines.size() ? "," : "") << "\n";
  }
  ms << "  ],\n  \"channels\": " << jlist(ts.names) << "\n}\n";
  run.write("timeseries_meta.json", ms.str());

  SvgPlot plot;
  plot.title = "Converter frequencies";
  plot.xlabel = "time (s)";
  plot.ylabel = "frequency (Hz)";
  plot.x0 = ts.t.size() ? ts.t[0] : 0.0;
  plot.x1 = ts.t.size() ? ts.t[ts.t.size() - 1] : 1.0;
  Real lo = 1e30, hi = -1e30;
  std::vector<std::pair<std::string, VecX>> freq;
  for (const auto& m : ts.machines) {
    if (m.kind != MachineKind::GFC) continue;
    try {
      VecX f = derive_channel(ts, ChannelKind::Frequency, m.name);
      lo = std::min(lo, f.minCoeff());
      hi = std::max(hi, f.maxCoeff());
      freq.push_back({m.name, std::move(f)});
    } catch (const SpecError&) {
      std::fprintf(stderr, "warning: %s frequency channel not recorded, skipping plot line\n",
                   m.name.c_str());
    }
  }
  if (!freq.empty()) {
    plot.span_y(lo, hi);
    for (size_t k = 0; k < freq.size(); ++k) {
      std::vector<std::pair<Real, Real>> pts(ts.t.size());
      for (int i = 0; i < ts.t.size(); ++i) pts[i] = {ts.t[i], freq[k].second[i]};
      plot.polyline(pts, kColors[k % kNColors]);
      plot.legend.push_back({freq[k].first, kColors[k % kNColors]});
    }
    run.write("freq.svg", plot.render(run.hash));
  }

  std::printf("%s (%s): %lld samples over %.3f s%s\n", spec.name.c_str(),
              to_string(spec.framework).c_str(), static_cast<long long>(ts.t.size()),
              ts.t.size() ? ts.t[ts.t.size() - 1] : 0.0, ts.diverged ? ", DIVERGED" : "");
  if (ts.diverged) {
    std::fprintf(stderr, "error: simulation diverged; series truncated\n");
    run.finish();
    return 2;
  }
  return 0;
}

int cmd_prony(const std::string& csv_path, const std::string& channel, const std::string& window,
              int order, const std::string& method, const std::string& band, Run& run) {
  const std::string raw = read_file(csv_path);
  run.spec_path = csv_path;
  run.framework = "none";
  run.hash = fnv1a_hex(raw);
  const Table tab = read_csv(raw, csv_path);
  const int tcol = tab.col("time_s");
  if (tcol < 0) throw SpecError("no time_s column in " + csv_path);
  const int ycol = tab.col(channel);
  if (ycol < 0) throw SpecError("no channel \"" + channel + "\" in " + csv_path);

  const int n = static_cast<int>(tab.rows.size());
  if (n < 2) throw SpecError("fewer than two samples in " + csv_path);
  VecX t(n), y(n);
  for (int i = 0; i < n; ++i) {
    t[i] = cell_num(tab.rows[i], tcol, csv_path);
    y[i] = cell_num(tab.rows[i], ycol, csv_path);
  }
  Real t0 = t[0], t1 = t[n - 1];
  if (!window.empty()) std::tie(t0, t1) = parse_range(window, "--window");
  auto [blo, bhi] = parse_range(band, "--band");

  const PronyEstimate est = method == "pencil" ? matrix_pencil(t, y, t0, t1, order)
                                               : prony_fit(t, y, t0, t1, order);
  std::optional<PronyMode> dom;
  try {
    dom = dominant_mode(est, blo, bhi);
  } catch (const IdentError&) {
  }

  auto mode_json = [](const PronyMode& m) {
    std::ostringstream os;
    os << "{\"f_hz\": " << fmt12(m.f_hz) << ", \"sigma_per_s\": " << fmt12(m.sigma)
       << ", \"zeta_pct\": " << fmt12(100.0 * m.zeta) << ", \"amplitude\": "
       << fmt12(m.amplitude) << ", \"phase_rad\": " << fmt12(m.phase) << "}";
    return os.str();
  };

  std::ostringstream os;
  os << "{\n  \"ledger\": " << jstr(run.hash) << ",\n";
  os << "  \"source\": " << jstr(csv_path) << ",\n";
  os << "  \"channel\": " << jstr(channel) << ",\n";
  os << "  \"method\": " << jstr(method) << ",\n";
  os << "  \"window_s\": [" << fmt12(est.t0) << ", " << fmt12(est.t1) << "],\n";
  os << "  \"order\": " << est.order << ",\n";
  os << "  \"residual\": " << fmt12(est.residual) << ",\n";
  os << "  \"band_hz\": [" << fmt12(blo) << ", " << fmt12(bhi) << "],\n";
  os << "  \"dominant\": " << (dom ? mode_json(*dom) : std::string("null")) << ",\n";
  os << "  \"modes\": [\n";
  for (size_t i = 0; i < est.modes.size(); ++i)
    os << "    " << mode_json(est.modes[i]) << (i + 1 < est.modes.size() ? "," : "") << "\n";
  os << "  ]\n}\n";
  run.write("prony.json", os.str());

  if (dom)
    std::printf("dominant mode in [%g, %g] Hz: f %.4f Hz, zeta %.4f %%, amplitude %.4g\n", blo,
                bhi, dom->f_hz, 100.0 * dom->zeta, dom->amplitude);
  else
    std::printf("no oscillatory mode identified in [%g, %g] Hz\n", blo, bhi);
  return 0;
}

int cmd_classify(const std::string& csv_path, Real threshold, Run& run) {
  const std::string raw = read_file(csv_path);
  run.spec_path = csv_path;
  run.framework = "none";
  run.hash = fnv1a_hex(raw);
  const Table tab = read_csv(raw, csv_path);
  const int c_id = tab.col("mode_id"), c_f = tab.col("f_hz"), c_m = tab.col("machine"),
            c_a = tab.col("area"), c_mag = tab.col("magnitude"), c_ang = tab.col("angle_deg");
  if (c_id < 0 || c_f < 0 || c_m < 0 || c_a < 0 || c_mag < 0 || c_ang < 0)
    throw SpecError(csv_path + " is not a compass table");

  std::vector<int> order;
  std::map<int, std::pair<Real, std::vector<ShapeEntry>>> per_mode;
  for (const auto& row : tab.rows) {
    const int id = static_cast<int>(cell_num(row, c_id, csv_path));
    if (!per_mode.count(id)) order.push_back(id);
    auto& [f, shapes] = per_mode[id];
    f = cell_num(row, c_f, csv_path);
    const Real mag = cell_num(row, c_mag, csv_path);
    const Real ang = cell_num(row, c_ang, csv_path) * kPi / 180.0;
    shapes.push_back({row[c_m], static_cast<int>(cell_num(row, c_a, csv_path)),
                      Complex(mag * std::cos(ang), mag * std::sin(ang))});
  }

  std::ostringstream os;
  os << "{\n  \"ledger\": " << jstr(run.hash) << ",\n";
  os << "  \"source\": " << jstr(csv_path) << ",\n";
  os << "  \"mag_threshold\": " << fmt12(threshold) << ",\n";
  os << "  \"modes\": [\n";
  for (size_t i = 0; i < order.size(); ++i) {
    const auto& [f, shapes] = per_mode[order[i]];
    const Grouping grp = classify_grouping(shapes, threshold);
    os << "    {\"mode_id\": " << order[i] << ", \"f_hz\": " << fmt12(f)
       << ", \"kind\": " << jstr(to_string(grp.kind)) << ", \"group_a\": " << jlist(grp.group_a)
       << ", \"group_b\": " << jlist(grp.group_b) << "}" << (i + 1 < order.size() ? "," : "")
       << "\n";
    std::printf("mode %d (%.2f Hz): %s\n", order[i], f, to_string(grp.kind).c_str());
  }
  os << "  ]\n}\n";
  run.write("classify.json", os.str());
  if (order.empty()) std::printf("no modes listed in %s\n", csv_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ssolab: dual-framework power-system dynamics laboratory"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--framework", g.framework, "spc, qpc or both (sv only)")
      ->check(CLI::IsMember({"spc", "qpc", "both"}, CLI::ignore_case));
  app.add_option("--tau-p", g.tau_p, "droop measurement delay override (seconds; ms suffix ok)");
  app.add_option("--pade", g.pade, "Pade order for delay linearization");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps and frequency grids")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "artifact directory (default .)");

  std::string spec_path, scenario_path, csv_path, channel, window, band = "5:55";
  std::string tau_list = "0,1,2,3,5,10ms", method = "prony";
  Real fmin = 1.0, fmax = 100.0, threshold = 0.2;
  int points = 400, order = 8;

  auto* pf = app.add_subcommand("pf", "solve the power flow and report the operating point");
  pf->add_option("spec", spec_path, "system config (JSON)")->required();

  auto* modes = app.add_subcommand("modes", "eigenanalysis: modes.json + compass.csv");
  modes->add_option("spec", spec_path, "system config (JSON)")->required();

  auto* sv = app.add_subcommand("sv", "singular-value frequency response: sv_*.csv + sv.svg");
  sv->add_option("spec", spec_path, "system config (JSON)")->required();
  sv->add_option("--fmin", fmin, "grid start, Hz (default 1)");
  sv->add_option("--fmax", fmax, "grid end, Hz (default 100)");
  sv->add_option("--points", points, "grid points (default 400)");

  auto* sweep = app.add_subcommand("sweep", "delay sweep of the subsynchronous modes");
  sweep->add_option("spec", spec_path, "system config (JSON)")->required();
  sweep->add_option("--tau", tau_list, "delay list (default \"0,1,2,3,5,10ms\")");

  auto* sim = app.add_subcommand("sim", "nonlinear time-domain run: timeseries.csv + freq.svg");
  sim->add_option("spec", spec_path, "system config (JSON)")->required();
  sim->add_option("--scenario", scenario_path, "scenario JSON")->required();

  auto* prony = app.add_subcommand("prony", "ringdown identification on a timeseries CSV");
  prony->add_option("csv", csv_path, "timeseries CSV")->required();
  prony->add_option("--channel", channel, "column to analyze")->required();
  prony->add_option("--window", window, "analysis window \"t0:t1\" (default full series)");
  prony->add_option("--order", order, "model order (default 8)");
  prony->add_option("--method", method, "prony or pencil")
      ->check(CLI::IsMember({"prony", "pencil"}));
  prony->add_option("--band", band, "dominant-mode band \"lo:hi\" Hz (default 5:55)");

  auto* classify = app.add_subcommand("classify", "grouping labels from a compass.csv");
  classify->add_option("csv", csv_path, "compass CSV")->required();
  classify->add_option("--threshold", threshold, "participation magnitude cut (default 0.2)");

  for (auto* s : {pf, modes, sv, sweep, sim, prony, classify}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Run run;
  run.out_dir = g.out_dir;
  std::string line;
  for (int i = 1; i < argc; ++i) line += std::string(i > 1 ? " " : "") + argv[i];
  run.argv_line = line;

  try {
    int rc = 0;
    if (pf->parsed()) {
      run.command = "pf";
      rc = cmd_pf(spec_path, g, run);
    } else if (modes->parsed()) {
      run.command = "modes";
      rc = cmd_modes(spec_path, g, run);
    } else if (sv->parsed()) {
      run.command = "sv";
      rc = cmd_sv(spec_path, g, fmin, fmax, points, run);
    } else if (sweep->parsed()) {
      run.command = "sweep";
      rc = cmd_sweep(spec_path, g, tau_list, run);
    } else if (sim->parsed()) {
      run.command = "sim";
      rc = cmd_sim(spec_path, scenario_path, g, run);
      if (rc != 0) return rc;  // manifest already written on divergence
    } else if (prony->parsed()) {
      run.command = "prony";
      rc = cmd_prony(csv_path, channel, window, order, method, band, run);
    } else if (classify->parsed()) {
      run.command = "classify";
      rc = cmd_classify(csv_path, threshold, run);
    }
    run.finish();
    return rc;
  } catch (const PowerFlowError& e) {
    std::fprintf(stderr, "error (powerflow): %s\n", e.what());
    return 2;
  } catch (const IdentError& e) {
    std::fprintf(stderr, "error (modal-id): %s\n", e.what());
    return 2;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "error (model): %s\n", e.what());
    return 3;
  } catch (const SpecError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
