// End-to-end checks of the command-line tool. argv[1] is the binary path.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

static int failures = 0;
static std::string bin;
static std::string dir;

#define REQUIRE_CLI(cond)                                                  \
  do {                                                                     \
    if (!(cond)) {                                                         \
      std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond);          \
      ++failures;                                                          \
    }                                                                      \
  } while (0)

static int run(const std::string& args, const std::string& stdout_to = "",
               const std::string& stderr_to = "") {
  std::string cmd = "'" + bin + "' " + args;
  if (!stdout_to.empty()) cmd += " > " + stdout_to;
  if (!stderr_to.empty()) cmd += " 2> " + stderr_to;
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

static std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Comment lines minus the volatile timestamp, plus all data lines.
static std::string stable_part(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("timestamp") == std::string::npos) out += line + "\n";
  return out;
}

static void test_synth_determinism() {
  std::string a = dir + "/a.csv", b = dir + "/b.csv";
  std::string args =
      "--seed 7 --out %s synth --gamma-e-hz 100 --gamma-o-hz 1000 --m 100 --points 51";
  char buf[512];
  std::snprintf(buf, sizeof buf, args.c_str(), a.c_str());
  REQUIRE_CLI(run(buf) == 0);
  std::snprintf(buf, sizeof buf, args.c_str(), b.c_str());
  REQUIRE_CLI(run(buf) == 0);
  REQUIRE_CLI(stable_part(slurp(a)) == stable_part(slurp(b)));
  REQUIRE_CLI(!stable_part(slurp(a)).empty());

  // different seed changes the data
  std::string c = dir + "/c.csv";
  std::snprintf(buf, sizeof buf,
                "--seed 8 --out %s synth --gamma-e-hz 100 --gamma-o-hz 1000 --m 100 "
                "--points 51",
                c.c_str());
  REQUIRE_CLI(run(buf) == 0);
  REQUIRE_CLI(stable_part(slurp(a)) != stable_part(slurp(c)));
}

static void test_formats() {
  std::string csv = dir + "/p.csv", jl = dir + "/p.jsonl";
  REQUIRE_CLI(run("--out " + csv + " predict --gamma-e-hz 135 --gamma-o-hz 85",
                  "/dev/null") == 0);
  REQUIRE_CLI(run("--format json-lines --out " + jl +
                      " predict --gamma-e-hz 135 --gamma-o-hz 85",
                  "/dev/null") == 0);
  std::string ctext = slurp(csv), jtext = slurp(jl);
  REQUIRE_CLI(ctext.find("gamma_e_hz") != std::string::npos);
  REQUIRE_CLI(ctext.find("# command: predict") != std::string::npos);
  // json-lines: one manifest object then one row object
  REQUIRE_CLI(jtext.find("\"command\":\"predict\"") != std::string::npos);
  REQUIRE_CLI(jtext.find("\"gamma_e_hz\":135.0") != std::string::npos);
  REQUIRE_CLI(run("--format nonsense predict --gamma-e-hz 1 --gamma-o-hz 1",
                  "/dev/null", "/dev/null") != 0);
}

static void test_sweep_single_point_matches_predict() {
  std::string sw = dir + "/sw.csv", pr = dir + "/pr.csv";
  REQUIRE_CLI(run("--out " + sw +
                      " sweep --var gamma_e --min-hz 135 --max-hz 135 --points 1 "
                      "--fixed-hz 85",
                  "/dev/null") == 0);
  REQUIRE_CLI(run("--out " + pr + " predict --gamma-e-hz 135 --gamma-o-hz 85",
                  "/dev/null") == 0);
  // last (data) line of both files must agree exactly
  auto last_line = [](const std::string& text) {
    size_t end = text.find_last_not_of('\n');
    size_t start = text.rfind('\n', end);
    return text.substr(start + 1, end - start);
  };
  REQUIRE_CLI(last_line(slurp(sw)) == last_line(slurp(pr)));
}

static void test_fit_pipeline_and_sigma_warning() {
  std::string spec = dir + "/spec.csv";
  REQUIRE_CLI(run("--seed 3 --out " + spec +
                      " synth --gamma-e-hz 100 --gamma-o-hz 1000 --m 10000 --points 201",
                  "/dev/null") == 0);
  std::string rep = dir + "/fit.json", err = dir + "/fit.err";
  REQUIRE_CLI(run("--out " + rep + " fit-spectrum --in " + spec, "/dev/null", err) == 0);
  // synth output has no sigma column: the fit must warn and fall back
  REQUIRE_CLI(slurp(err).find("warning: no sigma column") != std::string::npos);
  std::string doc = slurp(rep);
  REQUIRE_CLI(doc.find("\"converged\": true") != std::string::npos);
  REQUIRE_CLI(doc.find("width_hz") != std::string::npos);
}

static void test_error_exit_codes() {
  REQUIRE_CLI(run("predict --gamma-e-hz 135", "/dev/null", "/dev/null") != 0);
  REQUIRE_CLI(run("fit-spectrum --in " + dir + "/does_not_exist.csv", "/dev/null",
                  "/dev/null") == 1);
  REQUIRE_CLI(run("--preset fig9 predict --gamma-e-hz 1 --gamma-o-hz 1", "/dev/null",
                  "/dev/null") != 0);
  REQUIRE_CLI(run("sweep --var gamma_e --min-hz 10 --max-hz 5 --points 3 --fixed-hz 1",
                  "/dev/null", "/dev/null") == 1);
}

static void test_tmm_analyze() {
  std::string out = dir + "/tmm.csv";
  REQUIRE_CLI(run("--out " + out + " tmm --analyze-nm 1084.4", "/dev/null") == 0);
  std::string text = slurp(out);
  REQUIRE_CLI(text.find("Go_hz_per_fm") != std::string::npos);
}

static void test_effcal() {
  std::string log = dir + "/eff.txt";
  REQUIRE_CLI(run("--preset fig3 effcal --s-oe 1.0 --s-eo 1.0 --s-ee-off 1.0 "
                  "--s-oo-off 1.0 --gain-product 1.5",
                  log) == 0);
  REQUIRE_CLI(slurp(log).find("eta_t") != std::string::npos);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: test_cli <path-to-xduce>\n");
    return 2;
  }
  bin = argv[1];
  char tmpl[] = "/tmp/xduce_cli_XXXXXX";
  if (!mkdtemp(tmpl)) {
    std::printf("FAIL: cannot create temp dir\n");
    return 2;
  }
  dir = tmpl;

  test_synth_determinism();
  test_formats();
  test_sweep_single_point_matches_predict();
  test_fit_pipeline_and_sigma_warning();
  test_error_exit_codes();
  test_tmm_analyze();
  test_effcal();

  if (std::system(("rm -rf " + dir).c_str()) != 0)
    std::printf("note: could not remove %s\n", dir.c_str());
  if (failures == 0) std::printf("all cli checks passed\n");
  return failures == 0 ? 0 : 1;
}
