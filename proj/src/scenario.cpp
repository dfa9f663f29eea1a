#include "mmw/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace mmw {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("trailing characters in number");
  return v;
}

long long parse_integer(const std::string& text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw std::invalid_argument("not an integer");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw std::invalid_argument("not an unsigned integer");
  return v;
}

bool parse_bool(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("not a boolean");
}

struct Key {
  std::string name;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
};

template <typename T>
Key real_key(std::string name, T ScenarioConfig::*field) {
  return {std::move(name), [field](const ScenarioConfig& c) { return format_double(c.*field); },
          [field](ScenarioConfig& c, const std::string& v) { c.*field = parse_double(v); }};
}

Key int_key(std::string name, int ScenarioConfig::*field) {
  return {std::move(name), [field](const ScenarioConfig& c) { return std::to_string(c.*field); },
          [field](ScenarioConfig& c, const std::string& v) {
            auto x = parse_integer(v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
              throw std::invalid_argument("integer out of range");
            c.*field = static_cast<int>(x);
          }};
}

Key bool_key(std::string name, bool ScenarioConfig::*field) {
  return {std::move(name), [field](const ScenarioConfig& c) { return std::string(c.*field ? "true" : "false"); },
          [field](ScenarioConfig& c, const std::string& v) { c.*field = parse_bool(v); }};
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    using C = ScenarioConfig;
    std::vector<Key> k;
    k.push_back(real_key("carrier_frequency", &C::carrier_frequency));
    k.push_back(real_key("bandwidth", &C::bandwidth));
    k.push_back(int_key("n_site_rings", &C::n_site_rings));
    k.push_back(real_key("inter_site_distance", &C::inter_site_distance));
    k.push_back(real_key("bs_height", &C::bs_height));
    k.push_back(real_key("ue_height", &C::ue_height));
    k.push_back(int_key("ues_per_sector", &C::ues_per_sector));
    k.push_back(real_key("bs_tx_power", &C::bs_tx_power));
    k.push_back(int_key("n_tx", &C::n_tx));
    k.push_back(int_key("n_rx", &C::n_rx));
    k.push_back({"transmission_mode", [](const C& c) { return to_string(c.transmission_mode); },
                 [](C& c, const std::string& v) { c.transmission_mode = parse_transmission_mode(v); }});
    k.push_back(real_key("bs_pol_slant_deg", &C::bs_pol_slant_deg));
    k.push_back({"ue_polarization", [](const C& c) { return to_string(c.ue_polarization); },
                 [](C& c, const std::string& v) { c.ue_polarization = parse_polarization(v); }});
    k.push_back(real_key("ue_pol_slant_deg", &C::ue_pol_slant_deg));
    k.push_back(real_key("electrical_downtilt_deg", &C::electrical_downtilt_deg));
    k.push_back(real_key("mechanical_downtilt_deg", &C::mechanical_downtilt_deg));
    k.push_back(real_key("mechanical_slant_deg", &C::mechanical_slant_deg));
    k.push_back(real_key("azimuth_offset_deg", &C::azimuth_offset_deg));
    k.push_back(int_key("vertical_panels", &C::vertical_panels));
    k.push_back(int_key("horizontal_panels", &C::horizontal_panels));
    k.push_back(int_key("elements_per_panel", &C::elements_per_panel));
    k.push_back(real_key("ue_velocity", &C::ue_velocity));
    k.push_back(int_key("n_tti", &C::n_tti));
    k.push_back(real_key("tti_duration", &C::tti_duration));
    k.push_back({"scheduler", [](const C& c) { return to_string(c.scheduler); },
                 [](C& c, const std::string& v) { c.scheduler = parse_scheduler(v); }});
    k.push_back(real_key("pf_time_constant_tc", &C::pf_time_constant_tc));
    k.push_back(real_key("noise_figure", &C::noise_figure));
    k.push_back(real_key("xpd_mean", &C::xpd_mean));
    k.push_back({"seed", [](const C& c) { return std::to_string(c.seed); },
                 [](C& c, const std::string& v) { c.seed = parse_unsigned(v); }});
    k.push_back(real_key("rate_efficiency", &C::rate_efficiency));
    k.push_back(real_key("se_cap", &C::se_cap));
    k.push_back(real_key("coherence_rbs", &C::coherence_rbs));
    k.push_back(real_key("rician_k_db", &C::rician_k_db));
    k.push_back(real_key("shadowing_std_los_db", &C::shadowing_std_los_db));
    k.push_back(real_key("shadowing_std_nlos_db", &C::shadowing_std_nlos_db));
    k.push_back(int_key("feedback_delay_tti", &C::feedback_delay_tti));
    k.push_back(real_key("depolarization_coherence_time", &C::depolarization_coherence_time));
    k.push_back(bool_key("position_update", &C::position_update));
    k.push_back(bool_key("kpi_all_sites", &C::kpi_all_sites));
    k.push_back(real_key("pf_initial_throughput", &C::pf_initial_throughput));
    k.push_back(real_key("max_element_gain_dbi", &C::max_element_gain_dbi));
    k.push_back(real_key("azimuth_beamwidth_deg", &C::azimuth_beamwidth_deg));
    k.push_back(real_key("elevation_beamwidth_deg", &C::elevation_beamwidth_deg));
    k.push_back(real_key("front_back_ratio_db", &C::front_back_ratio_db));
    k.push_back(real_key("sla_v_db", &C::sla_v_db));
    k.push_back(real_key("min_ue_distance", &C::min_ue_distance));
    k.push_back(real_key("interference_margin_db", &C::interference_margin_db));
    return k;
  }();
  return keys;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double slant_for(Polarization p) { return p == Polarization::LPOL ? 0.0 : 90.0; }

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(std::string("invalid scenario: ") + what);
}

}  // namespace

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& k : registry()) n.push_back(k.name);
    return n;
  }();
  return names;
}

void validate(const ScenarioConfig& c) {
  require(c.carrier_frequency > 0, "carrier_frequency > 0");
  require(c.bandwidth > 0, "bandwidth > 0");
  require(c.n_rb() >= 1, "bandwidth must hold at least one resource block (>= 200 kHz)");
  require(c.n_site_rings >= 0, "n_site_rings >= 0");
  require(c.inter_site_distance > 0, "inter_site_distance > 0");
  require(c.bs_height > 0 && c.ue_height > 0, "antenna heights > 0");
  require(c.ues_per_sector >= 1, "ues_per_sector >= 1");
  require(c.bs_tx_power > 0, "bs_tx_power > 0");
  require(c.n_tx == 1 || c.n_tx == 2 || c.n_tx == 4, "n_tx in {1, 2, 4}");
  require(c.n_rx >= 1 && c.n_rx <= kMaxAntennas, "n_rx in [1, 4]");
  require(c.ue_pol_slant_deg == slant_for(c.ue_polarization),
          "ue_pol_slant_deg must be 0 for LPOL and 90 for XPOL");
  require(c.vertical_panels >= 1 && c.horizontal_panels >= 1 && c.elements_per_panel >= 1,
          "antenna panel and element counts >= 1");
  require(c.ue_velocity >= 0 && std::isfinite(c.ue_velocity), "ue_velocity >= 0");
  require(c.n_tti >= 1, "n_tti >= 1");
  require(c.tti_duration == 1e-3, "tti_duration is fixed at 1e-3 s");
  require(c.pf_time_constant_tc >= 1, "pf_time_constant_tc >= 1");
  require(std::isfinite(c.noise_figure), "noise_figure finite");
  require(c.xpd_mean >= 0, "xpd_mean >= 0 dB");
  require(c.rate_efficiency > 0 && c.rate_efficiency <= 1, "rate_efficiency in (0, 1]");
  require(c.se_cap > 0, "se_cap > 0");
  require(c.coherence_rbs > 0, "coherence_rbs > 0");
  require(c.shadowing_std_los_db >= 0 && c.shadowing_std_nlos_db >= 0, "shadowing std >= 0");
  require(c.feedback_delay_tti >= 0, "feedback_delay_tti >= 0");
  require(c.depolarization_coherence_time >= 0, "depolarization_coherence_time >= 0");
  require(c.pf_initial_throughput > 0, "pf_initial_throughput > 0");
  require(c.azimuth_beamwidth_deg > 0 && c.azimuth_beamwidth_deg < 180, "azimuth_beamwidth_deg in (0, 180)");
  require(c.elevation_beamwidth_deg > 0 && c.elevation_beamwidth_deg < 180, "elevation_beamwidth_deg in (0, 180)");
  require(std::isfinite(c.max_element_gain_dbi) && c.front_back_ratio_db >= 0 && c.sla_v_db >= 0,
          "antenna gains finite and attenuations >= 0");
  require(c.min_ue_distance >= 10.0, "min_ue_distance >= 10 m (pathloss validity)");
  require(c.min_ue_distance < c.inter_site_distance / 2.0, "min_ue_distance < inter_site_distance / 2");
  require(c.interference_margin_db >= 0, "interference_margin_db >= 0");
}

ScenarioConfig parse_scenario(std::string_view text, const ScenarioConfig& base, std::string_view source) {
  ScenarioConfig cfg = base;
  std::set<std::string> seen;
  bool slant_given = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto body = trim(line);
    if (body.empty()) continue;

    const auto where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + body + "'");
    auto key = trim(std::string_view(body).substr(0, eq));
    if (key == "velocity") key = "ue_velocity";
    if (key == "polarization") key = "ue_polarization";
    const auto value = trim(std::string_view(body).substr(eq + 1));
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");

    const auto& keys = registry();
    auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.name == key; });
    if (it == keys.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": bad value '" + value + "' for key '" + key + "': " + e.what());
    }
    if (key == "ue_pol_slant_deg") slant_given = true;
  }
  if (!slant_given) cfg.ue_pol_slant_deg = slant_for(cfg.ue_polarization);
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), base, path.string());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& k : registry()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

ScenarioConfig scenario_preset(std::string_view name) {
  ScenarioConfig cfg;
  if (name == "paper") return cfg;
  if (name == "small") {
    cfg.n_site_rings = 1;
    cfg.ues_per_sector = 5;
    cfg.n_tti = 50;
    return cfg;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected small or paper)");
}

void set_polarization(ScenarioConfig& cfg, Polarization pol) {
  cfg.ue_polarization = pol;
  cfg.ue_pol_slant_deg = slant_for(pol);
}

std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& base, const std::vector<double>& velocities,
                                         const std::vector<Polarization>& polarizations,
                                         const std::vector<SchedulerKind>& schedulers,
                                         const std::vector<std::uint64_t>& seeds) {
  if (velocities.empty()) throw ValidationError("sweep axis 'velocities' is empty");
  if (polarizations.empty()) throw ValidationError("sweep axis 'polarizations' is empty");
  if (schedulers.empty()) throw ValidationError("sweep axis 'schedulers' is empty");
  if (seeds.empty()) throw ValidationError("sweep axis 'seeds' is empty");

  std::vector<ScenarioConfig> out;
  out.reserve(velocities.size() * polarizations.size() * schedulers.size() * seeds.size());
  for (double v : velocities)
    for (auto pol : polarizations)
      for (auto sched : schedulers)
        for (auto seed : seeds) {
          ScenarioConfig c = base;
          c.ue_velocity = v;
          set_polarization(c, pol);
          c.scheduler = sched;
          c.seed = seed;
          validate(c);
          out.push_back(c);
        }
  return out;
}

}  // namespace mmw
