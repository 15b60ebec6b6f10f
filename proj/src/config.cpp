#include <oamfwm/config.hpp>

#include <json.hpp>

#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace oamfwm {

using nlohmann::json;

ConfigError::ConfigError(std::string path, int line, int column, const std::string& message)
    : Error(ErrorCode::ConfigInvalid, "cli",
            (path.empty() ? std::string("<root>") : path) +
                (line > 0 ? " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                          : std::string()) +
                ": " + message),
      path_(std::move(path)),
      line_(line),
      column_(column) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Splits "<number><spaces><unit>"; throws InvalidArgument on malformed input.
std::pair<double, std::string> split_quantity(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p == t.data()) {
    throw Error(ErrorCode::InvalidArgument, "cli", "expected '<number> <unit>', got '" + text + "'");
  }
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "cli", "non-finite quantity '" + text + "'");
  return {v, trim(std::string(p, t.data() + t.size()))};
}

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Byte offset of every value in the document, keyed by its dotted path.
class PositionIndex {
 public:
  explicit PositionIndex(const std::string& text) : text_(text) {
    std::size_t i = 0;
    scan(i, "");
  }

  std::pair<int, int> line_column(const std::string& path) const {
    std::string p = path;
    for (;;) {
      const auto it = at_.find(p);
      if (it != at_.end()) return from_offset(it->second);
      const auto cut = p.find_last_of(".[");
      if (cut == std::string::npos) break;
      p = p.substr(0, cut);
    }
    return {1, 1};
  }

 private:
  std::pair<int, int> from_offset(std::size_t off) const {
    int line = 1, col = 1;
    for (std::size_t k = 0; k < off && k < text_.size(); ++k) {
      if (text_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }
  void ws(std::size_t& i) const {
    while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
  }
  std::string str(std::size_t& i) const {
    std::string out;
    ++i;
    while (i < text_.size() && text_[i] != '"') {
      if (text_[i] == '\\') ++i;
      if (i < text_.size()) out += text_[i++];
    }
    ++i;
    return out;
  }
  void scan(std::size_t& i, const std::string& path) {
    ws(i);
    if (i >= text_.size()) return;
    at_.emplace(path, i);
    const char c = text_[i];
    if (c == '{') {
      ++i;
      for (;;) {
        ws(i);
        if (i >= text_.size() || text_[i] == '}') break;
        if (text_[i] == ',') {
          ++i;
          continue;
        }
        const std::string key = str(i);
        ws(i);
        if (i < text_.size() && text_[i] == ':') ++i;
        scan(i, path.empty() ? key : path + "." + key);
      }
      ++i;
    } else if (c == '[') {
      ++i;
      int idx = 0;
      for (;;) {
        ws(i);
        if (i >= text_.size() || text_[i] == ']') break;
        if (text_[i] == ',') {
          ++i;
          continue;
        }
        scan(i, path + "[" + std::to_string(idx++) + "]");
      }
      ++i;
    } else if (c == '"') {
      str(i);
    } else {
      while (i < text_.size() && !std::strchr(",}] \t\r\n", text_[i])) ++i;
    }
  }

  const std::string& text_;
  std::map<std::string, std::size_t> at_;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : index_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    const auto [line, col] = index_.line_column(path);
    throw ConfigError(path, line, col, message);
  }

 private:
  PositionIndex index_;
};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Object view that rejects keys nobody asked for.
class Obj {
 public:
  Obj(const Reader& r, const json& j, std::string path) : r_(r), j_(j), path_(std::move(path)) {
    if (!j.is_object()) r_.fail(path_, "expected an object");
  }
  ~Obj() = default;

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& req(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) r_.fail(path_, "missing required field '" + key + "'");
    return j_.at(key);
  }
  const json* opt(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string at(const std::string& key) const { return join(path_, key); }
  void done() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) r_.fail(join(path_, k), "unknown field '" + k + "'");
    }
  }
  const Reader& reader() const { return r_; }

 private:
  const Reader& r_;
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double number(const Reader& r, const json& j, const std::string& path) {
  if (!j.is_number()) r.fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) r.fail(path, "expected a finite number");
  return v;
}

int integer(const Reader& r, const json& j, const std::string& path) {
  if (!j.is_number_integer()) r.fail(path, "expected an integer");
  return j.get<int>();
}

bool boolean(const Reader& r, const json& j, const std::string& path) {
  if (!j.is_boolean()) r.fail(path, "expected true or false");
  return j.get<bool>();
}

std::string string(const Reader& r, const json& j, const std::string& path) {
  if (!j.is_string()) r.fail(path, "expected a string");
  return j.get<std::string>();
}

double length(const Reader& r, const json& j, const std::string& path) {
  if (!j.is_string()) r.fail(path, "expected a length string with unit, e.g. \"20 um\"");
  try {
    return parse_length_m(j.get<std::string>());
  } catch (const Error& e) {
    r.fail(path, e.what());
  }
}

double detuning(const Reader& r, const json& j, const std::string& path) {
  if (!j.is_string()) r.fail(path, "expected a detuning string with unit, e.g. \"2 THz\"");
  try {
    return parse_detuning_rad_s(j.get<std::string>());
  } catch (const Error& e) {
    r.fail(path, e.what());
  }
}

OamLabel label(const Reader& r, const json& j, const std::string& path, Direction dir) {
  Obj o(r, j, path);
  OamLabel l;
  l.charge = integer(r, o.req("charge"), o.at("charge"));
  const std::string sam = string(r, o.req("sam"), o.at("sam"));
  if (sam == "+") {
    l.sam = Sam::Plus;
  } else if (sam == "-") {
    l.sam = Sam::Minus;
  } else {
    r.fail(o.at("sam"), "sam must be \"+\" or \"-\"");
  }
  o.done();
  l.dir = dir;
  try {
    l.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnstableMode) {
      r.fail(path, "counter-rotating |charge| = 1 is formed from the unstable TE and TM modes");
    }
    r.fail(path, e.what());
  }
  return l;
}

json label_json(const OamLabel& l) {
  return {{"charge", l.charge}, {"sam", l.sam == Sam::Plus ? "+" : "-"}};
}

std::string length_text(double m) { return shortest(m) + " m"; }
std::string detuning_text(double w) { return shortest(w) + " rad/s"; }

}  // namespace

double parse_length_m(const std::string& text) {
  const auto [v, unit] = split_quantity(text);
  if (unit == "um") return v * 1e-6;
  if (unit == "nm") return v * 1e-9;
  if (unit == "mm") return v * 1e-3;
  if (unit == "cm") return v * 1e-2;
  if (unit == "m") return v;
  throw Error(ErrorCode::InvalidArgument, "cli",
              "unknown length unit '" + unit + "' (use um, nm, mm, cm or m)");
}

double parse_detuning_rad_s(const std::string& text) {
  const auto [v, unit] = split_quantity(text);
  if (unit == "THz") return 2.0 * kPi * v * 1e12;
  if (unit == "GHz") return 2.0 * kPi * v * 1e9;
  if (unit == "rad/s") return v;
  throw Error(ErrorCode::InvalidArgument, "cli",
              "unknown detuning unit '" + unit + "' (use THz, GHz or rad/s)");
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line/column
    int line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", line, col, std::string("malformed JSON: ") + e.what());
  }
  const Reader r(text);
  Obj root(r, doc, "");
  RunConfig c;

  {
    Obj f(r, root.req("fiber"), "fiber");
    c.fiber.n_co = number(r, f.req("n_co"), f.at("n_co"));
    c.fiber.n_cl = number(r, f.req("n_cl"), f.at("n_cl"));
    c.fiber.a_um = length(r, f.req("core_radius"), f.at("core_radius")) * 1e6;
    f.done();
    if (!(c.fiber.a_um > 0.0)) r.fail("fiber.core_radius", "core_radius must be positive");
    if (!(c.fiber.n_cl > 0.0)) r.fail("fiber.n_cl", "n_cl must be positive");
    if (!(c.fiber.n_co > c.fiber.n_cl)) r.fail("fiber.n_co", "n_co must exceed n_cl");
  }
  {
    Obj p(r, root.req("pump"), "pump");
    c.pump.lambda1_um = length(r, p.req("lambda1"), p.at("lambda1")) * 1e6;
    c.pump.lambda2_um = length(r, p.req("lambda2"), p.at("lambda2")) * 1e6;
    c.pump.L_m = length(r, p.req("length"), p.at("length"));
    p.done();
    if (!(c.pump.lambda1_um > 0.0)) r.fail("pump.lambda1", "lambda1 must be positive");
    if (!(c.pump.lambda2_um > 0.0)) r.fail("pump.lambda2", "lambda2 must be positive");
    if (!(c.pump.L_m > 0.0)) r.fail("pump.length", "length must be positive");
  }
  {
    const json& g = root.req("grid");
    if (g.is_string()) {
      if (g.get<std::string>() != "auto") r.fail("grid", "grid must be \"auto\" or an object");
      c.grid.automatic = true;
    } else {
      Obj o(r, g, "grid");
      c.grid.automatic = false;
      c.grid.grid.lo = detuning(r, o.req("lo"), o.at("lo"));
      c.grid.grid.hi = detuning(r, o.req("hi"), o.at("hi"));
      c.grid.grid.points = integer(r, o.req("points"), o.at("points"));
      o.done();
      if (c.grid.grid.points < 2) r.fail("grid.points", "points must be >= 2");
      if (!(c.grid.grid.lo < c.grid.grid.hi)) r.fail("grid.hi", "hi must exceed lo");
    }
  }
  if (const json* gs = root.opt("gratings")) {
    if (!gs->is_array()) r.fail("gratings", "expected an array");
    if (gs->size() > 2) r.fail("gratings", "at most two gratings (one per photon)");
    bool have[2] = {false, false};
    for (std::size_t k = 0; k < gs->size(); ++k) {
      const std::string path = "gratings[" + std::to_string(k) + "]";
      Obj o(r, (*gs)[k], path);
      GratingConfig g;
      const std::string photon = string(r, o.req("photon"), o.at("photon"));
      if (photon == "signal") {
        g.photon = Photon::Signal;
      } else if (photon == "idler") {
        g.photon = Photon::Idler;
      } else {
        r.fail(o.at("photon"), "photon must be \"signal\" or \"idler\"");
      }
      const int slot = g.photon == Photon::Signal ? 0 : 1;
      if (have[slot]) r.fail(o.at("photon"), "only one grating per photon direction");
      have[slot] = true;
      const Direction dir = g.photon == Photon::Signal ? Direction::Forward : Direction::Backward;
      g.from = label(r, o.req("from"), o.at("from"), dir);
      g.to = label(r, o.req("to"), o.at("to"), dir);
      g.delta_eps0 = number(r, o.req("delta_eps0"), o.at("delta_eps0"));
      if (!(g.delta_eps0 > 0.0)) r.fail(o.at("delta_eps0"), "delta_eps0 must be positive");
      const json& per = o.req("period");
      if (per.is_string() && per.get<std::string>() == "resonant") {
        g.period_m.reset();
      } else {
        g.period_m = length(r, per, o.at("period"));
        if (!(*g.period_m > 0.0)) r.fail(o.at("period"), "period must be positive");
      }
      g.resonance_wavelength_m =
          length(r, o.req("resonance_wavelength"), o.at("resonance_wavelength"));
      if (!(g.resonance_wavelength_m > 0.0)) {
        r.fail(o.at("resonance_wavelength"), "resonance_wavelength must be positive");
      }
      if (g.from == g.to) r.fail(o.at("to"), "from and to must differ");
      o.done();
      c.gratings.push_back(g);
    }
  }
  if (const json* cs = root.opt("channels")) {
    if (!cs->is_array()) r.fail("channels", "expected an array");
    for (std::size_t k = 0; k < cs->size(); ++k) {
      const std::string path = "channels[" + std::to_string(k) + "]";
      Obj o(r, (*cs)[k], path);
      JsaChannel ch;
      ch.signal = label(r, o.req("signal"), o.at("signal"), Direction::Forward);
      ch.idler = label(r, o.req("idler"), o.at("idler"), Direction::Backward);
      o.done();
      c.channels.push_back(ch);
    }
  }
  if (const json* t = root.opt("tolerances")) {
    Obj o(r, *t, "tolerances");
    if (auto* v = o.opt("relative")) c.tolerances.relative_tolerance = number(r, *v, o.at("relative"));
    if (auto* v = o.opt("absolute")) c.tolerances.absolute_tolerance = number(r, *v, o.at("absolute"));
    if (auto* v = o.opt("max_subdivisions")) {
      c.tolerances.max_subdivisions = integer(r, *v, o.at("max_subdivisions"));
    }
    o.done();
    try {
      c.tolerances.validate();
    } catch (const Error& e) {
      r.fail("tolerances", e.what());
    }
  }
  if (const json* t = root.opt("jsa")) {
    Obj o(r, *t, "jsa");
    if (auto* v = o.opt("dominant_only")) c.jsa.dominant_only = boolean(r, *v, o.at("dominant_only"));
    if (auto* v = o.opt("dispersion_model")) {
      const std::string s = string(r, *v, o.at("dispersion_model"));
      if (s == "single_count") {
        c.jsa.model = DispersionModel::SingleCount;
      } else if (s == "literal") {
        c.jsa.model = DispersionModel::Literal;
      } else {
        r.fail(o.at("dispersion_model"), "dispersion_model must be single_count or literal");
      }
    }
    if (auto* v = o.opt("z_integration")) {
      const std::string s = string(r, *v, o.at("z_integration"));
      if (s == "adaptive") {
        c.jsa.z_integration = ZIntegration::Adaptive;
      } else if (s == "exponential") {
        c.jsa.z_integration = ZIntegration::Exponential;
      } else {
        r.fail(o.at("z_integration"), "z_integration must be adaptive or exponential");
      }
    }
    if (auto* v = o.opt("chebyshev_nodes")) {
      c.jsa.chebyshev_nodes = integer(r, *v, o.at("chebyshev_nodes"));
      if (c.jsa.chebyshev_nodes == 1 || c.jsa.chebyshev_nodes < 0) {
        r.fail(o.at("chebyshev_nodes"), "chebyshev_nodes must be 0 or >= 2");
      }
    }
    if (auto* v = o.opt("tail_fraction")) {
      c.jsa.tail_fraction = number(r, *v, o.at("tail_fraction"));
      if (!(c.jsa.tail_fraction > 0.0 && c.jsa.tail_fraction < 1.0)) {
        r.fail(o.at("tail_fraction"), "tail_fraction must lie in (0, 1)");
      }
    }
    o.done();
  }
  if (const json* t = root.opt("tables")) {
    Obj o(r, *t, "tables");
    c.max_m = integer(r, o.req("max_m"), o.at("max_m"));
    o.done();
    if (c.max_m < 1 || c.max_m > 9) r.fail("tables.max_m", "max_m must lie in 1..9");
  }
  if (const json* t = root.opt("fidelity")) {
    Obj o(r, *t, "fidelity");
    c.fidelity_detuning = detuning(r, o.req("filter_detuning"), o.at("filter_detuning"));
    o.done();
  }
  if (const json* t = root.opt("output")) {
    Obj o(r, *t, "output");
    if (auto* v = o.opt("directory")) c.out_dir = string(r, *v, o.at("directory"));
    if (auto* v = o.opt("format")) {
      c.format = string(r, *v, o.at("format"));
      if (c.format != "csv" && c.format != "json") r.fail(o.at("format"), "format must be csv or json");
    }
    o.done();
  }
  root.done();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, 0, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& c) {
  json j;
  j["fiber"] = {{"n_co", c.fiber.n_co},
                {"n_cl", c.fiber.n_cl},
                {"core_radius", length_text(c.fiber.a_um * 1e-6)}};
  j["pump"] = {{"lambda1", length_text(c.pump.lambda1_um * 1e-6)},
               {"lambda2", length_text(c.pump.lambda2_um * 1e-6)},
               {"length", length_text(c.pump.L_m)}};
  if (c.grid.automatic) {
    j["grid"] = "auto";
  } else {
    j["grid"] = {{"lo", detuning_text(c.grid.grid.lo)},
                 {"hi", detuning_text(c.grid.grid.hi)},
                 {"points", c.grid.grid.points}};
  }
  j["gratings"] = json::array();
  for (const auto& g : c.gratings) {
    json o = {{"photon", g.photon == Photon::Signal ? "signal" : "idler"},
              {"from", label_json(g.from)},
              {"to", label_json(g.to)},
              {"delta_eps0", g.delta_eps0},
              {"resonance_wavelength", length_text(g.resonance_wavelength_m)}};
    o["period"] = g.period_m ? json(length_text(*g.period_m)) : json("resonant");
    j["gratings"].push_back(o);
  }
  j["channels"] = json::array();
  for (const auto& ch : c.channels) {
    j["channels"].push_back({{"signal", label_json(ch.signal)}, {"idler", label_json(ch.idler)}});
  }
  j["tolerances"] = {{"relative", c.tolerances.relative_tolerance},
                     {"absolute", c.tolerances.absolute_tolerance},
                     {"max_subdivisions", c.tolerances.max_subdivisions}};
  j["jsa"] = {{"dominant_only", c.jsa.dominant_only},
              {"dispersion_model", to_string(c.jsa.model)},
              {"z_integration", to_string(c.jsa.z_integration)},
              {"chebyshev_nodes", c.jsa.chebyshev_nodes},
              {"tail_fraction", c.jsa.tail_fraction}};
  j["tables"] = {{"max_m", c.max_m}};
  j["fidelity"] = {{"filter_detuning", detuning_text(c.fidelity_detuning)}};
  j["output"] = {{"directory", c.out_dir}, {"format", c.format}};
  return j.dump(2) + "\n";
}

GratingSpec build_grating(DispersionCache& cache, const GratingConfig& g) {
  const double omega_t = 2.0 * kPi * kSpeedOfLight / g.resonance_wavelength_m;
  GratingSpec s = resonant_grating(cache, g.from, g.to, omega_t, g.delta_eps0, g.photon);
  if (g.period_m) {
    s.period_m = *g.period_m;
    s.validate();
  }
  return s;
}

std::optional<GratingPair> build_gratings(DispersionCache& cache, const RunConfig& c) {
  std::optional<GratingSpec> sig, idl;
  for (const auto& g : c.gratings) {
    (g.photon == Photon::Signal ? sig : idl) = build_grating(cache, g);
  }
  if (!sig && !idl) return std::nullopt;
  if (!sig || !idl) {
    throw ConfigError("gratings", 0, 0, "grating-coupled JSAs need one signal and one idler grating");
  }
  return GratingPair{*sig, *idl};
}

JsaOptions jsa_options(const RunConfig& c, int workers) {
  JsaOptions o;
  o.dominant_only = c.jsa.dominant_only;
  o.model = c.jsa.model;
  o.z_integration = c.jsa.z_integration;
  o.quad = c.tolerances;
  o.chebyshev_nodes = c.jsa.chebyshev_nodes;
  o.workers = workers;
  return o;
}

}  // namespace oamfwm
