#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ssolab/simulate.hpp"

namespace ssolab {

using nlohmann::json;

namespace {

Waveform waveform_from(const std::string& s) {
  std::string lo = s;
  std::transform(lo.begin(), lo.end(), lo.begin(), ::tolower);
  if (lo == "step") return Waveform::Step;
  if (lo == "pulse") return Waveform::Pulse;
  if (lo == "sine") return Waveform::Sine;
  throw SpecError("waveform must be step, pulse or sine, got \"" + s + "\"");
}

Integrator integrator_from(const std::string& s) {
  std::string lo = s;
  std::transform(lo.begin(), lo.end(), lo.begin(), ::tolower);
  if (lo == "rk4") return Integrator::RK4;
  if (lo == "trapezoidal") return Integrator::Trapezoidal;
  throw SpecError("integrator must be rk4 or trapezoidal, got \"" + s + "\"");
}

Real num(const json& j, const std::string& key, Real fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw SpecError("field \"" + key + "\" must be a number");
  return j.at(key).get<Real>();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("scenario must be a JSON object");

  Scenario scn;
  scn.duration = num(doc, "duration", scn.duration);
  scn.dt = num(doc, "dt", scn.dt);
  scn.decimation = static_cast<int>(num(doc, "decimation", scn.decimation));
  if (doc.contains("integrator")) scn.integrator = integrator_from(doc.at("integrator"));

  if (doc.contains("disturbances")) {
    if (!doc.at("disturbances").is_array())
      throw SpecError("\"disturbances\" must be an array");
    for (const json& dj : doc.at("disturbances")) {
      Disturbance d;
      if (!dj.contains("machine"))
        throw SpecError("disturbance missing field \"machine\"");
      d.machine = dj.at("machine").get<std::string>();
      if (dj.contains("waveform")) d.waveform = waveform_from(dj.at("waveform"));
      if (!dj.contains("magnitude"))
        throw SpecError("disturbance on " + d.machine + " missing field \"magnitude\"");
      d.magnitude = num(dj, "magnitude", 0.0);
      d.t_start = num(dj, "t_start", d.t_start);
      if (d.waveform != Waveform::Step && !dj.contains("t_stop"))
        throw SpecError("disturbance on " + d.machine + " missing field \"t_stop\"");
      d.t_stop = num(dj, "t_stop", d.t_stop);
      d.freq_hz = num(dj, "freq_hz", d.freq_hz);
      scn.disturbances.push_back(d);
    }
  }

  if (doc.contains("record")) {
    if (!doc.at("record").is_array()) throw SpecError("\"record\" must be an array");
    for (const json& rj : doc.at("record")) scn.record.push_back(rj.get<std::string>());
  }
  return scn;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace ssolab
