#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mfc/config.hpp"

using namespace mfc;
namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("MFC_CLI");
  return p ? p : "mfc";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mfc_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "run.ini";
  std::ofstream(path) << text;
  return path;
}

int run_cli(const std::string& args) {
  const int status = std::system((cli() + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

bool mentions(const ParseResult& r, const std::string& text) {
  for (const auto& e : r.errors)
    if (e.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const auto r = parse_config_text("scenario = simulate\n");
  REQUIRE(r.ok());
  const auto& c = r.config;
  CHECK(c.scenario == Scenario::simulate);
  CHECK(c.seed == 1);
  CHECK(c.d == 1);
  CHECK(c.sigma == 0.0);
  CHECK(c.N == 16);
  CHECK(c.T == 1.0);
  CHECK(c.n_steps == 50);
  CHECK(c.k11.name == "zero");
  CHECK(c.N_list == std::vector<std::size_t>{8, 16, 32});
  CHECK(c.resolved.at("model.sigma") == "0");
}

TEST_CASE("full config round trip") {
  const auto r = parse_config_text(R"(
# leader steering
scenario = coupled
seed = 42

[model]
d = 2
sigma = 0.25
N = 32
m = 1
k11 = bounded_alignment 1.5
k12 = bounded_attraction, 2
initial = gaussian
initial_mean = 0 0 1 0
initial_var = 1
leaders = 3 -1

[grid]
T = 2
n_steps = 40

[control]
features = standard
bins = 2

[cost]
lagrangian = mean_tracking 1 1
psi = quadratic 0.1
)");
  REQUIRE(r.ok());
  const auto& c = r.config;
  CHECK(c.seed == 42);
  CHECK(c.k11.params == std::vector<double>{1.5});
  CHECK(c.k12.params == std::vector<double>{2.0});
  CHECK(c.model().Y0.y == std::vector<double>{3.0, -1.0});
  CHECK(c.model().kernels.k11.bound == doctest::Approx(1.5 * std::sqrt(2.0)));
  CHECK(c.control().bins() == 2);
  CHECK(c.sim().dt() == doctest::Approx(0.05));
  CHECK(c.cost().name == "mean_tracking+quadratic");
}

TEST_CASE("config errors") {
  const auto neg = parse_config_text("scenario = simulate\n[model]\nsigma = -1\n");
  REQUIRE(neg.errors.size() == 1);
  CHECK(neg.errors[0].find("sigma must be >= 0") != std::string::npos);
  CHECK(neg.errors[0].find("line 3") != std::string::npos);

  const auto two = parse_config_text("scenario = simulate\n[model]\nsigma = -1\n[grid]\nn_steps = 0\n");
  CHECK(two.errors.size() == 2);
  CHECK(mentions(two, "sigma"));
  CHECK(mentions(two, "n_steps must be >= 1"));

  CHECK(mentions(parse_config_text("[model]\nsigam = 1\n"), "did you mean 'sigma'"));
  CHECK(mentions(parse_config_text("[modle]\nsigma = 1\n"), "did you mean [model]"));
  CHECK(mentions(parse_config_text("scenario = simulat\n"), "did you mean 'simulate'"));
  CHECK(mentions(parse_config_text("[model]\nk11 = alignmnet\n"), "did you mean 'alignment'"));
  CHECK(mentions(parse_config_text("[model]\nN = 3\nN = 4\n"), "duplicate key"));
  CHECK(mentions(parse_config_text("[grid]\nT = abc\n"), "finite number"));
  CHECK(mentions(parse_config_text("[model]\nm = 2\nleaders = 1 2 3\n"), "leaders"));
  CHECK_FALSE(parse_config("/nonexistent/run.ini").ok());
}

TEST_CASE("the parser is total") {
  std::mt19937_64 gen(7);
  const std::string alphabet = "[]=#;, \n\tabcdeklmnpstxNT0123456789.-+e";
  const auto pieces = std::vector<std::string>{"[model]\n", "[grid]\n", "sigma = ", "k11 = ",
                                               "N_list = ", "h = ", "inf", "nan", "1e999"};
  for (int i = 0; i < 400; ++i) {
    std::string text;
    const std::size_t len = gen() % 200;
    for (std::size_t j = 0; j < len; ++j) {
      if (gen() % 8 == 0) text += pieces[gen() % pieces.size()];
      else text += alphabet[gen() % alphabet.size()];
    }
    CHECK_NOTHROW(parse_config_text(text));
  }
}

TEST_CASE("cli simulate writes the expected rows") {
  const auto dir = scratch("simulate");
  const auto cfg = write_config(dir, "scenario = simulate\n[model]\nN = 4\nsigma = 0.1\n"
                                     "initial = gaussian\n[grid]\nn_steps = 7\n[io]\noutput_dir = " +
                                         (dir / "out").string() + "\n");
  CHECK(run_cli("run " + cfg.string()) == 0);
  CHECK(data_rows(dir / "out" / "flow.csv") == 4 * 8);
  const auto manifest = slurp(dir / "out" / "manifest.json");
  CHECK(manifest.find("\"scenario\": \"simulate\"") != std::string::npos);
  CHECK(manifest.find("\"exit_code\": 0") != std::string::npos);

  // Byte-identical outputs at another thread count and output directory.
  CHECK(run_cli("run " + cfg.string() + " --threads 3 --output-dir " + (dir / "again").string()) == 0);
  CHECK(slurp(dir / "out" / "flow.csv") == slurp(dir / "again" / "flow.csv"));
  auto strip_time = [](std::string s) {
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line))
      if (line.find("wall_time_seconds") == std::string::npos) out += line + "\n";
    return out;
  };
  std::string a = strip_time(manifest), b = strip_time(slurp(dir / "again" / "manifest.json"));
  CHECK(a == b);
}

TEST_CASE("cli meanfield without iterations reports non-convergence") {
  const auto dir = scratch("meanfield");
  const auto cfg = write_config(dir, "scenario = meanfield\n[model]\nN = 8\nk11 = bounded_alignment\n"
                                     "initial = gaussian\n[experiment]\nmax_iter = 0\n");
  CHECK(run_cli("run " + cfg.string() + " --output-dir " + (dir / "out").string()) == 3);
  CHECK(fs::exists(dir / "out" / "picard.json"));
  CHECK(slurp(dir / "out" / "manifest.json").find("\"exit_code\": 3") != std::string::npos);
}

TEST_CASE("cli chaos writes one row per N") {
  const auto dir = scratch("chaos");
  const auto cfg = write_config(dir, "scenario = chaos\n[model]\nk11 = bounded_alignment\nsigma = 0.1\n"
                                     "initial = gaussian\n[grid]\nn_steps = 5\n"
                                     "[experiment]\nN_list = 4 8 16\nN_ref = 64\nseeds = 1 2\n");
  setenv("MFC_OUTPUT_DIR", (dir / "out").c_str(), 1);
  CHECK(run_cli("run " + cfg.string()) == 0);
  unsetenv("MFC_OUTPUT_DIR");
  CHECK(data_rows(dir / "out" / "chaos.csv") == 3);
  CHECK(fs::exists(dir / "out" / "chaos.dat"));
}

TEST_CASE("cli validation failures") {
  const auto dir = scratch("validate");
  const auto bad = write_config(dir, "scenario = simulate\n[model]\nsigma = -1\n");
  CHECK(run_cli("validate " + bad.string()) == 2);
  CHECK(run_cli("run " + bad.string()) == 2);
  const auto good = write_config(dir, "scenario = validate\n[model]\nk11 = bounded_alignment\n"
                                      "[experiment]\nvalidation_samples = 100\n");
  CHECK(run_cli("validate " + good.string()) == 0);
  CHECK(run_cli("run " + good.string() + " --output-dir " + (dir / "ok").string()) == 0);
  CHECK(data_rows(dir / "ok" / "validation.csv") >= 3);
  const auto unbounded = write_config(dir, "scenario = validate\n[model]\nk11 = alignment\n"
                                           "[experiment]\nvalidation_samples = 200\n");
  CHECK(run_cli("run " + unbounded.string() + " --output-dir " + (dir / "bad").string()) == 2);
  CHECK(run_cli("run /nonexistent/run.ini") == 2);
  // An output path that cannot be created.
  const auto blocked = write_config(dir, "scenario = simulate\n[model]\nN = 2\n");
  std::ofstream(dir / "file") << "x";
  CHECK(run_cli("run " + blocked.string() + " --output-dir " + (dir / "file" / "sub").string()) == 4);
}
