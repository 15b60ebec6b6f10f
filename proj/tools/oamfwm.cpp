#include <oamfwm/config.hpp>
#include <oamfwm/parallel.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <variant>

#ifndef OAMFWM_VERSION
#define OAMFWM_VERSION "dev"
#endif

using namespace oamfwm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

class Session {
 public:
  Session(RunConfig cfg, std::string command, int workers)
      : cfg_(std::move(cfg)), command_(std::move(command)), workers_(workers), cache_(cfg_.fiber) {
    fs::create_directories(cfg_.out_dir);
  }

  DispersionCache& cache() { return cache_; }
  const RunConfig& cfg() const { return cfg_; }
  int workers() const { return workers_; }

  // Writes <stem>.csv (or .json) plus <stem>.meta.json.
  void emit(const std::string& stem, const Table& t, json extra = json::object()) {
    const std::string ext = cfg_.format == "json" ? ".json" : ".csv";
    const fs::path data = fs::path(cfg_.out_dir) / (stem + ext);
    {
      std::ofstream out(data);
      if (cfg_.format == "csv") {
        for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
        out << "\n";
        for (const auto& row : t.rows) {
          for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << cell_text(row[k]);
          out << "\n";
        }
      } else {
        json rows = json::array();
        for (const auto& row : t.rows) {
          json r = json::array();
          for (const auto& c : row) r.push_back(cell_json(c));
          rows.push_back(r);
        }
        out << json{{"columns", t.columns}, {"rows", rows}}.dump(1) << "\n";
      }
      if (!out) throw Error(ErrorCode::InvalidArgument, "cli", "cannot write " + data.string());
    }
    json meta = {{"command", command_},
                 {"version", OAMFWM_VERSION},
                 {"data_file", data.filename().string()},
                 {"config", json::parse(canonical_config(cfg_))},
                 {"tolerances",
                  {{"relative", cfg_.tolerances.relative_tolerance},
                   {"absolute", cfg_.tolerances.absolute_tolerance},
                   {"max_subdivisions", cfg_.tolerances.max_subdivisions}}},
                 {"units",
                  {{"detuning", "rad/s, Delta omega = omega_s - omega_1 = omega_2 - omega_i"},
                   {"overlap", "a^-2 (core radius), Poynting-normalized modes"},
                   {"kappa", "1/m"}}}};
    for (auto& [k, v] : extra.items()) meta[k] = v;
    std::ofstream(fs::path(cfg_.out_dir) / (stem + ".meta.json")) << meta.dump(2) << "\n";
    std::cout << data.string() << "\n";
  }

  std::optional<GratingPair> gratings() { return build_gratings(cache_, cfg_); }

  DetuningGrid grid_for(const JsaChannel& ch, const std::optional<GratingPair>& g) {
    if (!cfg_.grid.automatic) return cfg_.grid.grid;
    const double margin = 1.0 / (kPi * std::sqrt(cfg_.jsa.tail_fraction));
    return suggested_grid(cache_, ch, cfg_.pump, g, jsa_options(cfg_, workers_), margin);
  }

  json grid_json(const DetuningGrid& g) const {
    return {{"lo_rad_s", g.lo}, {"hi_rad_s", g.hi}, {"points", g.points},
            {"automatic", cfg_.grid.automatic}};
  }

 private:
  RunConfig cfg_;
  std::string command_;
  int workers_;
  DispersionCache cache_;
};

std::string channel_stem(const JsaChannel& c) {
  auto part = [](const OamLabel& l) {
    return std::string(l.charge >= 0 ? "p" : "m") + std::to_string(std::abs(l.charge)) +
           (l.sam == Sam::Plus ? "P" : "M");
  };
  return part(c.signal) + "_" + part(c.idler);
}

const std::vector<JsaChannel>& need_channels(const RunConfig& c) {
  if (c.channels.empty()) throw ConfigError("channels", 0, 0, "this command needs at least one channel");
  return c.channels;
}

GratingPair need_gratings(Session& s) {
  auto g = s.gratings();
  if (!g) throw ConfigError("gratings", 0, 0, "this command needs a signal and an idler grating");
  return *g;
}

void cmd_modes(Session& s) {
  Table t{{"wavelength_um", "family", "m", "omega", "U", "W", "V", "n_eff", "k_per_m", "u_per_m",
           "w_per_m", "s", "v_g_m_per_s"},
          {}};
  const auto& f = s.cfg().fiber;
  for (double lam : {s.cfg().pump.lambda1_um, s.cfg().pump.lambda2_um}) {
    const double w = omega_from_wavelength_um(lam);
    for (int m = 0;; ++m) {
      bool any = false;
      const Family fams[2] = {m == 0 ? Family::TE : Family::EH, m == 0 ? Family::TM : Family::HE};
      for (Family fam : fams) {
        if (branch_roots(f, fam, m, w).empty()) continue;
        any = true;
        const auto p = s.cache().get({fam, m, 1}, w);
        t.rows.push_back({lam, std::string(to_string(fam)), (long long)m, p.omega, p.U, p.W, p.V,
                          p.n_eff, p.k, p.u, p.w, p.s, p.v_g});
      }
      if (!any && m > 0) break;
    }
  }
  s.emit("modes", t, {{"radial_order", 1}});

  // Intensity and phase maps of the channel modes (signal at lambda1, idler at lambda2).
  const int nr = 81, nphi = 72;
  for (const auto& ch : s.cfg().channels) {
    for (const auto& [label, w] : {std::pair{ch.signal, s.cfg().pump.omega1()},
                                   std::pair{ch.idler, s.cfg().pump.omega2()}}) {
      const auto prof = oam_profile(s.cache(), label, w, s.cfg().tolerances);
      Table m{{"r_um", "phi", "intensity", "phase_r", "phase_phi", "phase_z"}, {}};
      const double rmax = 2.0 * prof.a_um();
      for (int i = 0; i < nr; ++i) {
        const double r = rmax * i / (nr - 1);
        for (int j = 0; j < nphi; ++j) {
          const double phi = 2.0 * kPi * j / nphi;
          const Vec3 e = prof.at(r, phi);
          m.rows.push_back({r, phi, std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2]), std::arg(e[0]),
                            std::arg(e[1]), std::arg(e[2])});
        }
      }
      std::string stem = label.name();
      for (char& c : stem) c = c == '+' ? 'p' : c == '-' ? 'm' : c == '^' ? '_' : c;
      s.emit("mode_map_" + stem, m,
             {{"mode", label.name()}, {"wavelength_um", wavelength_um_from_omega(w)},
              {"phase_charge", prof.azimuthal_phase_charge()}});
    }
  }
}

void cmd_overlap_tables(Session& s) {
  const auto& c = s.cfg();
  const double w1 = c.pump.omega1(), w2 = c.pump.omega2();
  const TableFrequencies fr{w1, w2, w1, w2};
  const char* names[8] = {"II", "III", "IV", "V", "VI", "VII", "VIII", "zero"};
  const auto fams = all_table_families();
  // Radial integrals stop at the smallest cut-off of the four modes in a cell.
  json truncation = json::object();
  for (int m = 1; m <= c.max_m; ++m) {
    truncation["signal_m" + std::to_string(m)] =
        oam_profile(s.cache(), {m, Sam::Plus}, w1, c.tolerances).rho_cut();
    truncation["idler_m" + std::to_string(m)] =
        oam_profile(s.cache(), {-m, Sam::Minus}, w2, c.tolerances).rho_cut();
  }
  for (std::size_t k = 0; k < fams.size(); ++k) {
    const auto tab = overlap_table(s.cache(), fams[k], c.max_m, fr, c.tolerances, s.workers());
    Table t{{"m_i", "m_s", "re", "im"}, {}};
    for (int mi = 1; mi <= c.max_m; ++mi)
      for (int ms = 1; ms <= c.max_m; ++ms)
        t.rows.push_back({(long long)mi, (long long)ms, tab.at(mi, ms).real(), tab.at(mi, ms).imag()});
    s.emit(std::string("overlap_table_") + names[k], t,
           {{"family", fams[k].name()}, {"truncation_radius_a", truncation},
            {"note", "signal at lambda1, idler at lambda2; rows m_i, columns m_s"}});
  }
}

void cmd_coupling_map(Session& s) {
  const auto& c = s.cfg();
  if (c.gratings.empty()) throw ConfigError("gratings", 0, 0, "coupling-map needs at least one grating");
  auto pair = s.gratings();
  std::optional<DetuningGrid> grid;
  if (!c.grid.automatic) {
    grid = c.grid.grid;
  } else if (pair) {
    grid = s.grid_for({pair->signal.to, pair->idler.to}, pair);
  } else {
    throw ConfigError("grid", 0, 0, "coupling-map with a single grating needs an explicit grid");
  }
  for (const auto& gc : c.gratings) {
    const GratingSpec g = build_grating(s.cache(), gc);
    const bool sig = gc.photon == Photon::Signal;
    Table t{{"detuning", "omega", "re_kappa", "im_kappa", "delta", "d", "gamma", "kappa_L"}, {}};
    t.rows.resize(grid->points);
    const double w1 = c.pump.omega1(), w2 = c.pump.omega2();
    parallel_for(grid->points, s.workers(), [&](std::size_t j) {
      const double dw = grid->at(static_cast<int>(j));
      const double w = sig ? w1 + dw : w2 - dw;
      const auto p = detunings(s.cache(), g, g.from, g.to, w, c.tolerances);
      t.rows[j] = {dw, w, p.kappa.real(), p.kappa.imag(), p.delta, p.d, p.gamma,
                   std::abs(p.kappa) * c.pump.L_m};
    });
    s.emit(std::string("coupling_map_") + (sig ? "signal" : "idler"), t,
           {{"grating", {{"charge", g.charge}, {"period_m", g.period_m}, {"K_per_m", g.K()},
                         {"omega_t", g.omega_t}, {"from", g.from.name()}, {"to", g.to.name()}}},
            {"grid", s.grid_json(*grid)}});

    // |kappa| against the grating charge for the same input mode at omega_t
    Table v{{"m_g", "to", "spin", "abs_kappa_per_m", "re_kappa", "im_kappa"}, {}};
    for (int mg = -12; mg <= 12; ++mg) {
      for (bool flip : {false, true}) {
        OamLabel to = g.from;
        if (flip) {
          to.sam = g.from.sam == Sam::Plus ? Sam::Minus : Sam::Plus;
          to.charge = g.from.charge + mg + (g.from.sam == Sam::Plus ? 2 : -2);
        } else {
          to.charge = g.from.charge + mg;
        }
        if (to == g.from) continue;
        GratingSpec gm = g;
        gm.charge = mg;
        cplx k;
        try {
          k = coupling_constant(s.cache(), gm, g.from, to, g.omega_t, c.tolerances);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::NotGuided || e.code() == ErrorCode::UnstableMode) continue;
          throw;
        }
        v.rows.push_back({(long long)mg, to.name(), std::string(flip ? "flip" : "same"), std::abs(k),
                          k.real(), k.imag()});
      }
    }
    s.emit(std::string("coupling_vs_charge_") + (sig ? "signal" : "idler"), v,
           {{"from", g.from.name()}, {"omega_t", g.omega_t}, {"delta_eps0", g.delta_eps0}});
  }
}

void cmd_envelopes(Session& s) {
  const auto& c = s.cfg();
  if (c.gratings.empty()) throw ConfigError("gratings", 0, 0, "envelopes needs at least one grating");
  const int nz = 401;
  for (const auto& gc : c.gratings) {
    const GratingSpec g = build_grating(s.cache(), gc);
    const bool sig = gc.photon == Photon::Signal;
    const auto p = detunings(s.cache(), g, g.from, g.to, g.omega_t, c.tolerances);
    const auto params = EnvelopeParams::make(p.kappa, p.delta, p.d, p.v_from, p.v_to, c.pump.L_m,
                                             sig ? Direction::Forward : Direction::Backward);
    const EnvelopeFamily fams[2] = {sig ? EnvelopeFamily::SignalOutM : EnvelopeFamily::IdlerOutM,
                                    sig ? EnvelopeFamily::SignalOutMp : EnvelopeFamily::IdlerOutMp};
    Table t{{"z"}, {}};
    for (auto f : fams) {
      const std::string n = to_string(f);
      for (const char* col : {"re_a_m", "im_a_m", "re_a_mp", "im_a_mp"}) t.columns.push_back(n + "." + col);
    }
    for (int k = 0; k < nz; ++k) {
      const double z = k == nz - 1 ? c.pump.L_m : c.pump.L_m * k / (nz - 1);
      std::vector<Cell> row{z};
      for (auto f : fams) {
        const auto a = envelopes(params, f)(z);
        row.insert(row.end(), {a.first.real(), a.first.imag(), a.second.real(), a.second.imag()});
      }
      t.rows.push_back(row);
    }
    s.emit(std::string("envelopes_") + (sig ? "signal" : "idler"), t,
           {{"kappa", {p.kappa.real(), p.kappa.imag()}}, {"d", p.d}, {"gamma", p.gamma},
            {"delta", p.delta}, {"evaluated_at", "resonance frequency of the grating"}});
  }
}

void cmd_jsi(Session& s) {
  const auto& c = s.cfg();
  const auto pair = s.gratings();
  const JsaOptions opt = jsa_options(c, s.workers());
  for (const auto& ch : need_channels(c)) {
    const DetuningGrid grid = s.grid_for(ch, pair);
    const JsaGrid g = pair ? jsa_full(s.cache(), ch, c.pump, *pair, grid, opt)
                           : jsa_no_grating(s.cache(), ch, c.pump, grid, opt);
    const double self_max = g.max_jsi();
    // no-grating reference on the same grid, when the channel allows it
    std::optional<double> ref;
    if (pair) {
      try {
        ref = jsa_no_grating(s.cache(), ch, c.pump, grid, opt).max_jsi();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ForbiddenChannel) throw;
      }
    }
    Table t{{"detuning", "omega_s", "omega_i", "re_phi", "im_phi", "jsi", "jsi_over_self_max"}, {}};
    if (ref) t.columns.push_back("jsi_over_nograting_max");
    const char* terms[4] = {"ff", "ft", "tf", "tt"};
    for (const char* n : terms) {
      t.columns.push_back(std::string("re_term_") + n);
      t.columns.push_back(std::string("im_term_") + n);
    }
    for (std::size_t j = 0; j < g.detuning.size(); ++j) {
      const double jsi = std::norm(g.amplitude[j]);
      std::vector<Cell> row{g.detuning[j], g.omega_s[j], g.omega_i[j], g.amplitude[j].real(),
                            g.amplitude[j].imag(), jsi, self_max > 0 ? jsi / self_max : 0.0};
      if (ref) row.push_back(*ref > 0 ? jsi / *ref : 0.0);
      for (const auto& tm : g.terms[j]) {
        row.push_back(tm.real());
        row.push_back(tm.imag());
      }
      t.rows.push_back(row);
    }
    json extra = {{"channel", ch.name()},
                  {"grid", s.grid_json(grid)},
                  {"normalization_reference",
                   {{"self_max_jsi", self_max}, {"library", g.normalization_reference}}},
                  {"gratings", pair.has_value()},
                  {"dispersion_model", to_string(opt.model)},
                  {"z_integration", to_string(opt.z_integration)},
                  {"dominant_only", opt.dominant_only},
                  {"terms", "(y_s, y_i) source pairs: from/to of the signal and idler gratings"}};
    if (ref) extra["normalization_reference"]["nograting_max_jsi"] = *ref;
    s.emit("jsi_" + channel_stem(ch), t, extra);
  }
}

void cmd_pair_ratio(Session& s) {
  const auto& c = s.cfg();
  const GratingPair pair = need_gratings(s);
  const JsaOptions opt = jsa_options(c, s.workers());
  Table t{{"channel", "ratio", "numerator", "denominator", "points", "widenings", "lo", "hi"}, {}};
  json grids = json::array();
  for (const auto& ch : need_channels(c)) {
    const DetuningGrid grid = s.grid_for(ch, pair);
    const auto r = pair_ratio(s.cache(), ch, c.pump, pair, grid, opt, c.jsa.tail_fraction);
    t.rows.push_back({ch.name(), r.ratio, r.numerator, r.denominator, (long long)r.grid.points,
                      (long long)r.widenings, r.grid.lo, r.grid.hi});
    grids.push_back(s.grid_json(r.grid));
  }
  s.emit("pair_ratio", t,
         {{"grids", grids},
          {"definition", "Int |Phi_grating|^2 / Int |Phi_0|^2 over Delta omega, four source terms"},
          {"tail_fraction", c.jsa.tail_fraction}});
}

void cmd_fidelity(Session& s) {
  const auto& c = s.cfg();
  Table t{{"m_i", "m_s", "fidelity", "re_A", "im_A", "re_B", "im_B"}, {}};
  for (int mi = 1; mi <= c.max_m; ++mi) {
    for (int ms = 1; ms <= c.max_m; ++ms) {
      const auto r = bell_fidelity(s.cache(), c.pump, ms, mi, c.fidelity_detuning, c.tolerances);
      t.rows.push_back({(long long)mi, (long long)ms, r.fidelity, r.A.real(), r.A.imag(),
                        r.B.real(), r.B.imag()});
    }
  }
  s.emit("fidelity", t,
         {{"A", "I(O+ms^+, O-mi^-)"}, {"B", "I(O+ms^-, O-mi^+)"},
          {"filter_detuning_rad_s", c.fidelity_detuning}});
}

void cmd_peaks(Session& s) {
  const auto& c = s.cfg();
  const GratingPair pair = need_gratings(s);
  JsaOptions opt = jsa_options(c, s.workers());
  Table t{{"channel", "signs", "detuning", "status"}, {}};
  for (const auto& ch : need_channels(c)) {
    const DetuningGrid grid = s.grid_for(ch, pair);
    const auto r = peak_positions(s.cache(), ch, c.pump, pair, grid, opt);
    const char* names[4] = {"++", "+-", "-+", "--"};
    for (int k = 0; k < 4; ++k) {
      t.rows.push_back({ch.name(), std::string(names[k]),
                        r.roots[k] ? *r.roots[k] : std::nan(""),
                        std::string(r.roots[k] ? "ok" : "NoRootInWindow")});
    }
    t.rows.push_back({ch.name(), std::string("centre"), r.centre ? *r.centre : std::nan(""),
                      std::string(r.centre ? "ok" : "NoRootInWindow")});
  }
  s.emit("peaks", t,
         {{"equation", "dk_eff + s1 gamma_s + s2 gamma_i = 0 for the dominant source term"},
          {"dispersion_model", to_string(opt.model)}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grating-assisted OAM photon-pair generation in step-index fibers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir, format;
  int workers = default_workers();
  long long seed = 0;
  app.add_option("--config", config_path, "config file (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "reserved; nothing here is random");

  const std::vector<std::pair<std::string, void (*)(Session&)>> commands = {
      {"modes", cmd_modes},
      {"overlap-tables", cmd_overlap_tables},
      {"coupling-map", cmd_coupling_map},
      {"envelopes", cmd_envelopes},
      {"jsi", cmd_jsi},
      {"pair-ratio", cmd_pair_ratio},
      {"fidelity", cmd_fidelity},
      {"peaks", cmd_peaks}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, "run " + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) {
        Session s(cfg, name, workers);
        fn(s);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigInvalid ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
