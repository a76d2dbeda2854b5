#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "io.hpp"
#include "kleinian/fixtures.hpp"

using namespace kleinian;
namespace fs = std::filesystem;

namespace {

const std::string kCyclic = std::string(KLEINIAN_SOURCE_DIR) + "/fixtures/cyclic.json";
const std::string kRank2 = std::string(KLEINIAN_SOURCE_DIR) + "/fixtures/rank2.json";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "kleinian_cli_tests" / name;
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("complex parsing") {
  using io::parse_complex;
  CHECK(parse_complex("1.5") == cplx(1.5, 0));
  CHECK(parse_complex("2i") == cplx(0, 2));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("0.5-0.25i") == cplx(0.5, -0.25));
  CHECK(parse_complex("1e-3+2e+1i") == cplx(1e-3, 20));
  CHECK(parse_complex(" -2 , 3 ") == cplx(-2, 3));
  CHECK_THROWS_AS(parse_complex("abc"), Error);
  CHECK_THROWS_AS(parse_complex("1+2j"), Error);
  CHECK_THROWS_AS(parse_complex(""), Error);
  const cplx z(-0.1, 1.0 / 3.0);
  CHECK(parse_complex(io::format_complex(z)) == z);
}

TEST_CASE("csv and number formatting") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(io::CsvWriter::quote("plain") == "plain");
  CHECK(io::CsvWriter::quote("a,b") == "\"a,b\"");
  CHECK(io::CsvWriter::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  std::ostringstream os;
  io::CsvWriter w(os);
  w.row({"x", "y,z"});
  CHECK(os.str() == "x,\"y,z\"\r\n");
}

TEST_CASE("group files round trip and reject bad shapes") {
  const SchottkyGroup g = pants_group(5.0, 1.0);
  const io::json j = io::group_to_json(g, "p", -0.3);
  const io::GroupFile f = io::parse_group(j);
  REQUIRE(f.group.rank() == 2);
  CHECK(f.delta_hat.value() == -0.3);
  for (int k = 0; k < 2; ++k) CHECK((f.group.generators[k].matrix() - g.generators[k].matrix()).norm() == 0.0);

  auto broken = [&](auto mutate) {
    io::json b = j;
    mutate(b);
    return b;
  };
  CHECK_THROWS_AS(io::parse_group(io::json::array()), Error);
  CHECK_THROWS_AS(io::parse_group(broken([](io::json& b) { b.erase("disks"); })), Error);
  CHECK_THROWS_AS(io::parse_group(broken([](io::json& b) { b["n"] = "two"; })), Error);
  CHECK_THROWS_AS(io::parse_group(broken([](io::json& b) { b["generators"][0].erase(0); })), Error);
  CHECK_THROWS_AS(io::parse_group(broken([](io::json& b) { b["disks"][0]["radius"] = "big"; })), Error);
  // overlapping disks fail Schottky validation
  CHECK_THROWS_AS(io::parse_group(broken([](io::json& b) { b["disks"][0]["radius"] = 3.0; })), Error);
  // a non-Lorentz matrix
  try {
    io::parse_group(broken([](io::json& b) { b["generators"][0][0][0] = 7.0; }));
    FAIL("accepted a non-Lorentz generator");
  } catch (const Error& e) {
    CHECK(e.kind() != ErrorKind::numerical);
  }
}

TEST_CASE("shipped fixtures load") {
  const io::GroupFile c = io::load_group(kCyclic);
  CHECK(c.group.rank() == 1);
  CHECK(c.delta_hat.value() == -0.5);
  const io::GroupFile p = io::load_group(kRank2);
  CHECK(p.group.rank() == 2);
  CHECK(p.delta_hat.value() < 0.0);
}

TEST_CASE("exit codes and machine-readable errors") {
  const std::string out = scratch("err").string();
  Outcome r = invoke({"--group", kCyclic, "--out", out, "validate"});
  CHECK(r.code == 0);
  CHECK(r.err.empty());

  r = invoke({"--group", "/nonexistent/g.json", "--out", out, "validate"});
  CHECK(r.code == 2);
  CHECK(io::json::parse(r.err)["error"] == "config");

  r = invoke({"--out", out, "--unknown-flag", "validate"});
  CHECK(r.code == 2);
  CHECK(io::json::parse(r.err)["exit_code"] == 2);

  r = invoke({"--group", kCyclic, "--out", out, "zeta", "--from", "-0.6", "--to", "2"});
  CHECK(r.code == 3);
  const io::json e = io::json::parse(r.err);
  CHECK(e["message"].get<std::string>().find("convergence margin") != std::string::npos);
  const io::json m = io::json::parse(slurp(out + ".manifest.json"));
  CHECK(m["status"] == "error");
  CHECK(m["exit_code"] == 3);

  r = invoke({"--group", kCyclic, "--out", out, "orders"});
  CHECK(r.code == 2);
}

TEST_CASE("manifest echoes config, version and delta source") {
  const std::string out = scratch("manifest").string();
  const Outcome r = invoke({"--group", kCyclic, "--out", out, "--max-word-length", "5", "zeta", "--points", "3"});
  REQUIRE(r.code == 0);
  const io::json m = io::json::parse(slurp(out + ".manifest.json"));
  CHECK(m["version"] == KLEINIAN_VERSION);
  CHECK(m["command"] == "zeta");
  CHECK(m["config"]["max_word_length"] == 5);
  CHECK(m["config"]["points"] == 3);
  CHECK(m["delta_hat_source"] == "group file");
  CHECK(m["group"] == io::load_group(kCyclic).raw);
  const std::string csv = slurp(out + ".zeta.csv");
  CHECK(csv.rfind("re_s,im_s,re_log_z,im_log_z,tail_bound\r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("environment overrides") {
  const std::string out = scratch("env").string();
  ::setenv("KLEINIAN_MAX_WORD_LENGTH", "4", 1);
  ::setenv("KLEINIAN_GROUP", kCyclic.c_str(), 1);
  const Outcome r = invoke({"--out", out, "spectrum"});
  ::unsetenv("KLEINIAN_MAX_WORD_LENGTH");
  ::unsetenv("KLEINIAN_GROUP");
  REQUIRE(r.code == 0);
  CHECK(io::json::parse(slurp(out + ".manifest.json"))["config"]["max_word_length"] == 4);
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  std::vector<std::string> files[3];
  for (int run = 0; run < 3; ++run) {
    const std::string out = scratch("repro" + std::to_string(run)).string();
    const std::string threads = run == 2 ? "2" : "1";
    REQUIRE(invoke({"--group", kRank2, "--out", out, "--threads", threads, "zeta", "--from", "0.5", "--to", "1+2i",
                 "--points", "4", "--grid-points", "3"})
                .code == 0);
    REQUIRE(invoke({"--group", kRank2, "--out", out, "--threads", threads, "--basis-size", "9", "scatter", "--lambda",
                 "0.5i"})
                .code == 0);
    files[run] = {slurp(out + ".zeta.csv"), slurp(out + ".scatter.csv"), slurp(out + ".scatter.json")};
  }
  CHECK(files[0] == files[1]);
  CHECK(files[0] == files[2]);
  set_num_threads(1);
}

TEST_CASE("ladder and scatter outputs") {
  const std::string out = scratch("cmds").string();
  REQUIRE(invoke({"--group", kCyclic, "--out", out, "ladder"}).code == 0);
  const std::string csv = slurp(out + ".ladder.csv");
  std::istringstream rows(csv);
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  std::vector<std::string> cells;
  std::stringstream cs(row);
  for (std::string c; std::getline(cs, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() == 9);
  CHECK(std::stod(cells[7]) < 1e-8 + std::stod(cells[8]));

  REQUIRE(invoke({"--group", kRank2, "--out", out, "--basis-size", "33", "scatter", "--lambda", "1i"}).code == 0);
  const io::json s = io::json::parse(slurp(out + ".scatter.json"));
  CHECK(s["basis_size"] == 33);
  CHECK(s["unitarity_residual"].get<double>() < 1e-3);
  const std::string m = slurp(out + ".scatter.csv");
  CHECK(std::count(m.begin(), m.end(), '\n') == 1 + 33 * 33);
}

}  // TEST_SUITE
