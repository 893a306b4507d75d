#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wiretap/channel.hpp"
#include "wiretap/cli.hpp"

using namespace wiretap;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wiretap_cli_test_" + std::to_string(counter++) + "_" +
             std::to_string(::getpid()) + ".json");
    std::ofstream f(path_);
    f << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

WiretapChannel scalar_channel(double h_m, double h_e, double p = 1.0) {
  WiretapChannel ch;
  ch.H_M = Matrix::from_real({{h_m}});
  ch.H_E = Matrix::from_real({{h_e}});
  ch.P = p;
  return ch;
}

WiretapChannel indefinite_diag() {
  WiretapChannel ch;
  const double r2 = std::sqrt(2.0);
  ch.H_M = Matrix::from_real({{r2, 0}, {0, 1.0 / r2}});
  ch.H_E = Matrix::identity(2);
  ch.P = 1.0;
  return ch;
}

}  // namespace

TEST_CASE("capacity on the scalar degraded-main instance") {
  const TempFile file(serialize_channel(scalar_channel(std::sqrt(2.0), 1.0)));
  const CliResult res = run_cli({"capacity", "--input", file.path()});
  CHECK(res.code == 0);
  CHECK(res.out.find("C_S = 0.405465 nat (0.584963 bit)") != std::string::npos);
  CHECK(res.out.find("rank = 1") != std::string::npos);
}

TEST_CASE("capacity reports zero for a degraded-eavesdropper instance") {
  const TempFile file(serialize_channel(scalar_channel(1.0, std::sqrt(2.0))));
  const CliResult res = run_cli({"capacity", "--input", file.path()});
  CHECK(res.code == 0);
  CHECK(res.out.find("C_S = 0.000000 nat") != std::string::npos);
}

TEST_CASE("exit codes are a total function of the outcome") {
  const TempFile malformed("{ not json");
  CHECK(run_cli({"capacity", "--input", malformed.path()}).code == 2);

  const TempFile missing_p(R"({"n":1,"n_M":1,"n_E":1,"H_M":[[[1,0]]],"H_E":[[[1,0]]]})");
  CHECK(run_cli({"capacity", "--input", missing_p.path()}).code == 2);

  const TempFile zero_power(serialize_channel(scalar_channel(1.0, 1.0, 1.0)));
  // Rewrite P to 0 through JSON to keep the file otherwise valid.
  {
    std::ifstream in(zero_power.path());
    nlohmann::json j;
    in >> j;
    j["P"] = 0.0;
    std::ofstream out(zero_power.path());
    out << j.dump();
  }
  CHECK(run_cli({"capacity", "--input", zero_power.path()}).code == 3);

  WiretapChannel deficient;
  deficient.H_M = Matrix::from_real({{1.0, 0.0}});
  deficient.H_E = Matrix::from_real({{1.0, 0.0}, {0.0, 1.0}});
  deficient.P = 1.0;
  const TempFile rank_deficient(serialize_channel(deficient));
  CHECK(run_cli({"capacity", "--input", rank_deficient.path()}).code == 3);

  CHECK(run_cli({"capacity"}).code == 2);        // missing required --input
  CHECK(run_cli({"no-such-command"}).code == 2); // unknown subcommand
}

TEST_CASE("classify prints the class and the Gram gap spectrum") {
  const double r2 = std::sqrt(2.0);
  WiretapChannel main_ch;
  main_ch.H_M = Matrix::identity(2) * r2;
  main_ch.H_E = Matrix::identity(2);
  main_ch.P = 1.0;
  const TempFile f1(serialize_channel(main_ch));
  const CliResult r1 = run_cli({"classify", "--input", f1.path()});
  CHECK(r1.code == 0);
  CHECK(r1.out.find("DEGRADED_MAIN") != std::string::npos);

  WiretapChannel eve_ch;
  eve_ch.H_M = Matrix::identity(2);
  eve_ch.H_E = Matrix::identity(2) * r2;
  eve_ch.P = 1.0;
  const TempFile f2(serialize_channel(eve_ch));
  CHECK(run_cli({"classify", "--input", f2.path()}).out.find("DEGRADED_EVE") !=
        std::string::npos);

  const TempFile f3(serialize_channel(indefinite_diag()));
  CHECK(run_cli({"classify", "--input", f3.path()}).out.find("INDEFINITE") !=
        std::string::npos);
}

TEST_CASE("saddle certifies the desk instances and flags BOUNDARY") {
  const TempFile indef(serialize_channel(indefinite_diag()));
  const CliResult certified = run_cli({"saddle", "--input", indef.path()});
  CHECK(certified.code == 0);
  CHECK(certified.out.find("certified     = yes") != std::string::npos);

  const TempFile scalar(serialize_channel(scalar_channel(std::sqrt(2.0), 1.0)));
  CHECK(run_cli({"saddle", "--input", scalar.path()}).code == 0);

  WiretapChannel boundary;
  boundary.H_M = Matrix::identity(2);
  boundary.H_E = Matrix::identity(2);
  boundary.P = 1.0;
  const TempFile bfile(serialize_channel(boundary));
  const CliResult br = run_cli({"saddle", "--input", bfile.path()});
  CHECK(br.code == 4);
  CHECK(br.out.find("BOUNDARY") != std::string::npos);
  CHECK(br.out.find("notice") != std::string::npos);
}

TEST_CASE("verify passes by default and fails under the self-test flag") {
  const CliResult ok = run_cli({"verify", "--seed", "7", "--dims", "2"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("[PASS] tilde-I form agreement") != std::string::npos);
  CHECK(ok.out.find("suites passed") != std::string::npos);

  const CliResult broken =
      run_cli({"verify", "--seed", "7", "--dims", "2", "--inject-broken-tolerance"});
  CHECK(broken.code == 5);
  CHECK(broken.out.find("[FAIL]") != std::string::npos);
  CHECK(broken.err.find("first failing instance") != std::string::npos);
  // The dumped instance is valid JSON carrying the channel schema.
  const auto start = broken.err.find('{');
  REQUIRE(start != std::string::npos);
  const nlohmann::json dumped = nlohmann::json::parse(broken.err.substr(start));
  CHECK(dumped.contains("H_M"));
}

TEST_CASE("sweep matches the scalar closed form and stays monotone") {
  const TempFile file(serialize_channel(scalar_channel(std::sqrt(2.0), 1.0)));
  const CliResult res = run_cli({"sweep", "--input", file.path(), "--pmin", "0.5",
                                 "--pmax", "2", "--steps", "3"});
  CHECK(res.code == 0);
  std::istringstream lines(res.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "P,C_S_nats,rank,trace,converged");
  const double expected[] = {std::log(2.0 / 1.5), std::log(3.0 / 2.0), std::log(5.0 / 3.0)};
  double prev = -1.0;
  for (int i = 0; i < 3; ++i) {
    std::string line;
    REQUIRE(std::getline(lines, line));
    double p = 0, c = 0, trace = 0;
    int rank = 0, conv = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%d,%lf,%d", &p, &c, &rank, &trace, &conv) == 5);
    CHECK(std::abs(c - expected[i]) <= 1e-6);
    CHECK(c >= prev);
    CHECK(conv == 1);
    prev = c;
  }
}

TEST_CASE("machine-readable output is byte identical across runs") {
  const TempFile file(serialize_channel(indefinite_diag()));
  const CliResult a =
      run_cli({"capacity", "--input", file.path(), "--seed", "5", "--format", "json"});
  const CliResult b =
      run_cli({"capacity", "--input", file.path(), "--seed", "5", "--format", "json"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const CliResult s1 = run_cli({"sweep", "--input", file.path(), "--seed", "5", "--pmin",
                                "0.5", "--pmax", "4", "--steps", "5"});
  const CliResult s2 = run_cli({"sweep", "--input", file.path(), "--seed", "5", "--pmin",
                                "0.5", "--pmax", "4", "--steps", "5"});
  CHECK(s1.out == s2.out);

  // JSON output round-trips through the parser.
  const nlohmann::json parsed = nlohmann::json::parse(a.out);
  CHECK(parsed.contains("C_S_nats"));
  CHECK(parsed.contains("K_star"));

  const CliResult saddle_json =
      run_cli({"saddle", "--input", file.path(), "--format", "json"});
  const nlohmann::json sj = nlohmann::json::parse(saddle_json.out);
  CHECK(sj.at("certified").get<bool>());
}
