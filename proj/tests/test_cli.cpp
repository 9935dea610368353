// End-to-end checks of the relbc binary: flag handling, exit codes, output
// formats. The binary path arrives as the first program argument.
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

std::string g_binary;

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_command(const std::string& args) {
  std::string command = g_binary + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  std::array<char, 4096> buffer;
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace

TEST_CASE("run: json report on an honest batch exits 0") {
  CommandResult r = run_command(
      "run --variant symmetric --l 16 --adversary honest --trials 2000 --seed 7 --output json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"consistent\": true") != std::string::npos);
  CHECK(r.output.find("\"revealed0\"") != std::string::npos);
  CHECK(r.output.find("\"expected_paper\"") != std::string::npos);
}

TEST_CASE("run: invalid config is a usage error (exit 1)") {
  CHECK(run_command("run --l 0").exit_code == 1);
  CHECK(run_command("run --delta 1").exit_code == 1);
  CHECK(run_command("run --adversary nonesuch").exit_code == 1);
  CHECK(run_command("nonesuch-subcommand").exit_code == 1);
}

TEST_CASE("run: transcript shows the midpoint interception at t=d/2c") {
  CommandResult r = run_command("run --variant symmetric --l 8 --adversary bob-b3:mid --emit-transcript");
  CHECK(r.exit_code == 0);
  // default geometry: d=3e8, c=299792458 -> d/2c = 0.500346142797...
  CHECK(r.output.find("0.500346142797 | B3 | cross<B1") != std::string::npos);
  CHECK(r.output.find("0.500346142797 | B3 | cross<B2") != std::string::npos);
  CHECK(r.output.find("| B3 | intercept=b=") != std::string::npos);
}

TEST_CASE("run: csv output carries the same counts as json") {
  CommandResult csv = run_command("run --l 8 --trials 500 --seed 9 --output csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.output.find("variant,l,d,c,") != std::string::npos);
  CHECK(csv.output.find("symmetric,8,300000000,299792458,") != std::string::npos);

  CommandResult json = run_command("run --l 8 --trials 500 --seed 9 --output json");
  CHECK(json.exit_code == 0);
  // both formats report the same ambiguous count
  auto pos = json.output.find("\"ambiguous\": ");
  REQUIRE(pos != std::string::npos);
  long ambiguous = std::strtol(json.output.c_str() + pos + 13, nullptr, 10);
  CHECK(csv.output.find("," + std::to_string(ambiguous) + ",") != std::string::npos);
}

TEST_CASE("run: identical seeds give byte-identical reports") {
  const std::string args = "run --l 12 --trials 300 --seed 5 --output json --emit-transcript";
  CommandResult a = run_command(args);
  CommandResult b = run_command(args);
  CommandResult c = run_command(args + " --jobs 3");
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output == c.output);
}

TEST_CASE("run: config file with flag overrides") {
  const char* path = "/tmp/relbc_test_scenario.cfg";
  {
    std::ofstream out(path);
    out << "# sweep base\nvariant=symmetric\nl=8\ntrials=400\nseed=11\nadversary=alice-diff-bit:0,1\n";
  }
  CommandResult from_file = run_command(std::string("run --config ") + path + " --output json");
  CHECK(from_file.exit_code == 0);
  CHECK(from_file.output.find("\"adversary\": \"alice-diff-bit:0,1\"") != std::string::npos);
  CHECK(from_file.output.find("\"cheat_detected\": 400") != std::string::npos);

  CommandResult overridden =
      run_command(std::string("run --config ") + path + " --adversary honest --output json");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.output.find("\"adversary\": \"honest\"") != std::string::npos);
  std::remove(path);
}

TEST_CASE("run: RELBC_SEED is the fallback seed") {
  CommandResult r = run_command("run --l 8 --trials 10 --output json");
  CHECK(r.output.find("\"seed\": 1") != std::string::npos);

  setenv("RELBC_SEED", "777", 1);
  CommandResult env_seed = run_command("run --l 8 --trials 10 --output json");
  CHECK(env_seed.output.find("\"seed\": 777") != std::string::npos);

  CommandResult flag_wins = run_command("run --l 8 --trials 10 --seed 3 --output json");
  CHECK(flag_wins.output.find("\"seed\": 3") != std::string::npos);
  unsetenv("RELBC_SEED");
}

TEST_CASE("verify: degenerate and default suites pass; fault injection fails") {
  CommandResult degenerate = run_command("verify --max-l 1 --trials 2000");
  CHECK(degenerate.exit_code == 0);
  CHECK(degenerate.output.find("FAIL") == std::string::npos);

  CommandResult quick = run_command("verify --max-l 2 --trials 4000");
  CHECK(quick.exit_code == 0);

  CommandResult injected = run_command("verify --max-l 2 --trials 4000 --inject-fault flip-ambiguous");
  CHECK(injected.exit_code == 2);
  CHECK(injected.output.find("FAIL") != std::string::npos);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli [doctest flags] <path-to-relbc-binary>\n");
    return 1;
  }
  g_binary = argv[argc - 1];
  doctest::Context context;
  context.applyCommandLine(argc - 1, argv);
  return context.run();
}
