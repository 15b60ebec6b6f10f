#include <doctest.h>

#include <oamfwm/config.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace oamfwm;

TEST_SUITE_BEGIN("cli");

namespace {

const std::string kMinimal = R"({
  "fiber": {"n_co": 1.45, "n_cl": 1.44, "core_radius": "20 um"},
  "pump": {"lambda1": "1.5 um", "lambda2": "0.5 um", "length": "2 cm"},
  "grid": "auto"
})";

std::string with(const std::string& extra) {
  std::string s = kMinimal;
  s.insert(s.rfind('}'), ",\n  " + extra + "\n");
  return s;
}

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected ConfigError");
  return ConfigError("", 0, 0, "");
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(OAMFWM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("unit parsing") {
  CHECK(parse_length_m("20 um") == doctest::Approx(20e-6));
  CHECK(parse_length_m("0.5um") == doctest::Approx(0.5e-6));
  CHECK(parse_length_m("500 nm") == doctest::Approx(500e-9));
  CHECK(parse_length_m("2 cm") == doctest::Approx(0.02));
  CHECK(parse_length_m("1 m") == 1.0);
  CHECK(parse_detuning_rad_s("1 THz") == doctest::Approx(2.0 * kPi * 1e12));
  CHECK(parse_detuning_rad_s("3e11 rad/s") == 3e11);
  CHECK(parse_detuning_rad_s("-2 GHz") == doctest::Approx(-4.0 * kPi * 1e9));
  CHECK_THROWS_AS(parse_length_m("20"), Error);
  CHECK_THROWS_AS(parse_length_m("20 furlongs"), Error);
  CHECK_THROWS_AS(parse_detuning_rad_s("1 THz extra"), Error);
}

TEST_CASE("minimal config fills defaults") {
  const auto c = parse_config(kMinimal);
  CHECK(c.fiber.a_um == doctest::Approx(20.0));
  CHECK(c.pump.L_m == doctest::Approx(0.02));
  CHECK(c.grid.automatic);
  CHECK(c.gratings.empty());
  CHECK(c.max_m == 4);
}

TEST_CASE("canonical form round-trips") {
  for (const char* name : {"paper.json", "grating_m3.json"}) {
    const auto c = load_config(std::string(OAMFWM_CONFIG_DIR) + "/" + name);
    const std::string once = canonical_config(c);
    const std::string twice = canonical_config(parse_config(once));
    CHECK(once == twice);
  }
}

TEST_CASE("errors carry the path and the source position") {
  auto e = config_error(R"({
  "fiber": {"n_co": 1.45, "n_cl": 1.44, "core_radius": "-5 um"},
  "pump": {"lambda1": "1.5 um", "lambda2": "0.5 um", "length": "2 cm"},
  "grid": "auto"
})");
  CHECK(e.code() == ErrorCode::ConfigInvalid);
  CHECK(e.path() == "fiber.core_radius");
  CHECK(e.line() == 2);
  CHECK(e.column() > 30);

  e = config_error(with(R"("colour": "blue")"));
  CHECK(e.path() == "colour");
  CHECK(std::string(e.what()).find("unknown field") != std::string::npos);

  e = config_error("{\n  \"fiber\": {\"n_co\": 1.45,\n}");
  CHECK(e.line() >= 2);
  CHECK(std::string(e.what()).find("malformed JSON") != std::string::npos);

  e = config_error(R"({"fiber": {"n_co": 1.45, "n_cl": 1.44, "core_radius": "20 um"}, "grid": "auto"})");
  CHECK(std::string(e.what()).find("pump") != std::string::npos);

  e = config_error(with(R"("pump2": 1)"));
  CHECK(e.path() == "pump2");
}

TEST_CASE("units are mandatory") {
  const auto e = config_error(R"({
  "fiber": {"n_co": 1.45, "n_cl": 1.44, "core_radius": 20},
  "pump": {"lambda1": "1.5 um", "lambda2": "0.5 um", "length": "2 cm"},
  "grid": "auto"
})");
  CHECK(e.path() == "fiber.core_radius");
}

TEST_CASE("counter-rotating |1| channels are rejected with the reason") {
  const auto e = config_error(with(
      R"("channels": [{"signal": {"charge": -1, "sam": "+"}, "idler": {"charge": 1, "sam": "-"}}])"));
  const std::string msg = e.what();
  CHECK(msg.find("TE") != std::string::npos);
  CHECK(msg.find("TM") != std::string::npos);
  CHECK(e.path().rfind("channels[0]", 0) == 0);
}

TEST_CASE("grating section constraints") {
  const std::string g =
      R"({"photon": "signal", "from": {"charge": 1, "sam": "+"}, "to": {"charge": 3, "sam": "+"},
          "delta_eps0": 0.029, "period": "resonant", "resonance_wavelength": "1.5 um"})";
  auto e = config_error(with("\"gratings\": [" + g + ", " + g + "]"));
  CHECK(std::string(e.what()).find("one grating per photon") != std::string::npos);
  const auto c = parse_config(with("\"gratings\": [" + g + "]"));
  CHECK(c.gratings.size() == 1);
  DispersionCache cache(c.fiber);
  CHECK_THROWS_AS(build_gratings(cache, c), ConfigError);
  const auto g1 = build_grating(cache, c.gratings[0]);
  CHECK(g1.charge == 2);
}

TEST_CASE("command line: exit codes and outputs") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "oamfwm_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg = std::string(OAMFWM_CONFIG_DIR) + "/paper.json";

  CHECK(run("--config " + cfg + " --out " + dir.string() + " fidelity") == 0);
  CHECK(fs::exists(dir / "fidelity.csv"));
  CHECK(fs::exists(dir / "fidelity.meta.json"));
  const std::string meta = read(dir / "fidelity.meta.json");
  CHECK(meta.find("\"command\"") != std::string::npos);
  CHECK(meta.find("\"config\"") != std::string::npos);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"fiber\": {\"n_co\": 1.45}}";
  CHECK(run("--config " + bad.string() + " modes") == 2);
  CHECK(run("--config " + cfg + " --workers 0 modes") == 2);
  CHECK(run("--config " + cfg + " no-such-command") == 2);

  // parses fine; fails angular momentum conservation at compute time
  const fs::path forbidden = dir / "forbidden.json";
  std::ofstream(forbidden) << with(
      R"("channels": [{"signal": {"charge": 1, "sam": "+"}, "idler": {"charge": -2, "sam": "-"}}])");
  CHECK(run("--config " + forbidden.string() + " --out " + dir.string() + " jsi") == 3);
  fs::remove_all(dir);
}

TEST_SUITE_END();
