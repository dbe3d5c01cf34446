#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "curex-cli-tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_cli(const std::string& arguments, const std::string& env = {}) {
  std::string command = env.empty() ? std::string() : env + " ";
  command += std::string(CUREX_CLI_PATH) + " " + arguments + " >/dev/null 2>/dev/null";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

const std::string kFixture =
    "time,status\n"
    "0.5,1\n1,1\n1.5,1\n2,0\n3,1\n4,1\n5,0\n6,1\n7,0\n8,1\n"
    "8.5,1\n9,0\n9.5,1\n10,0\n10.5,1\n11,0\n11.5,1\n12,0\n12.5,0\n13,0\n";

}  // namespace

TEST_CASE("running without a subcommand fails with the input error code") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("analyze --help") == 0);
  CHECK(run_cli("simulate --help") == 0);
  CHECK(run_cli("transform --help") == 0);
}

TEST_CASE("analyze writes a JSON report") {
  const fs::path input = write_file("cli_analyze.csv", kFixture);
  const fs::path output = scratch_dir() / "report.json";
  fs::remove(output);
  CHECK(run_cli("analyze --input " + input.string() + " --nb 20 --seed 2 --out " +
                output.string()) == 0);
  REQUIRE(fs::exists(output));
  const std::string report = read_file(output);
  CHECK(report.find("\"schema_version\": 1") != std::string::npos);
  CHECK(report.find("\"label\": \"All\"") != std::string::npos);
  CHECK(report.find("\"seed\": 2") != std::string::npos);
}

TEST_CASE("analyze input failures map to exit code 2") {
  CHECK(run_cli("analyze --input " + (scratch_dir() / "missing.csv").string() +
                " --out " + (scratch_dir() / "r.json").string()) == 2);
  const fs::path bad = write_file("cli_bad.csv", "time,status\n1,9\n");
  CHECK(run_cli("analyze --input " + bad.string() + " --out " +
                (scratch_dir() / "r.json").string()) == 2);
  const fs::path input = write_file("cli_level.csv", kFixture);
  CHECK(run_cli("analyze --input " + input.string() + " --level 2 --out " +
                (scratch_dir() / "r.json").string()) == 2);
  CHECK(run_cli("analyze --input " + input.string()) == 2);  // --out required
}

TEST_CASE("seed resolution prefers the flag over the environment") {
  const fs::path input = write_file("cli_seed.csv", kFixture);
  const fs::path by_flag = scratch_dir() / "by_flag.json";
  const fs::path by_env = scratch_dir() / "by_env.json";
  const fs::path flag_wins = scratch_dir() / "flag_wins.json";
  CHECK(run_cli("analyze --input " + input.string() + " --nb 20 --seed 5 --out " +
                by_flag.string()) == 0);
  CHECK(run_cli("analyze --input " + input.string() + " --nb 20 --out " +
                    by_env.string(),
                "CUREX_SEED=5") == 0);
  CHECK(run_cli("analyze --input " + input.string() + " --nb 20 --seed 5 --out " +
                    flag_wins.string(),
                "CUREX_SEED=99") == 0);
  CHECK(read_file(by_flag) == read_file(by_env));
  CHECK(read_file(by_flag) == read_file(flag_wins));
  CHECK(run_cli("analyze --input " + input.string() + " --out " +
                    (scratch_dir() / "r.json").string(),
                "CUREX_SEED=banana") == 2);
}

TEST_CASE("transform rewrites times or reports bad input") {
  const fs::path input = write_file("cli_transform.csv",
                                    "time,status\n0.5,1\n0.75,0\n");
  const fs::path output = scratch_dir() / "transformed.csv";
  CHECK(run_cli("transform --input " + input.string() + " --tau0 1 --out " +
                output.string()) == 0);
  CHECK(read_file(output) == "time,status\n2,1\n4,0\n");
  CHECK(run_cli("transform --input " + input.string() + " --tau0 0.6 --out " +
                output.string()) == 2);
}

TEST_CASE("simulate runs a small grid from config and flag overrides") {
  const fs::path config = write_file("cli_sim.conf",
                                     "model = gpd(1)\n"
                                     "n = 30\nN = 1\nN_b = 2\n"
                                     "grid_ratios = 0.5, 1.0\n"
                                     "seed = 4\n");
  const fs::path out_dir = scratch_dir() / "cli_simout";
  fs::remove_all(out_dir);
  CHECK(run_cli("simulate --config " + config.string() + " --quiet --out-dir " +
                out_dir.string()) == 0);
  CHECK(fs::exists(out_dir / "curve_gpd_gamma1_p0.5.csv"));
  CHECK(fs::exists(out_dir / "manifest.json"));

  const fs::path flags_dir = scratch_dir() / "cli_simout_flags";
  fs::remove_all(flags_dir);
  CHECK(run_cli("simulate --model 'gpd(1)' --n 30 --N 1 --nb 2 "
                "--ratios 0.5,1.0 --seed 4 --quiet --out-dir " +
                flags_dir.string()) == 0);
  CHECK(read_file(flags_dir / "curve_gpd_gamma1_p0.5.csv") ==
        read_file(out_dir / "curve_gpd_gamma1_p0.5.csv"));

  const fs::path no_model = write_file("cli_nomodel.conf", "n = 30\n");
  CHECK(run_cli("simulate --config " + no_model.string() + " --quiet --out-dir " +
                out_dir.string()) == 2);
  CHECK(run_cli("simulate --config " + (scratch_dir() / "absent.conf").string() +
                " --quiet --out-dir " + out_dir.string()) == 2);
}
