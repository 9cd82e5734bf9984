#include "cli.hpp"

#include "bplab/regions.hpp"
#include "bplab/sampled.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bplab;
using nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bplab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "bplab_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("parse_config fills defaults") {
  auto c = cli::parse_config(R"({"command":"region","id":"pi2"})");
  CHECK(c.command == "region");
  CHECK(c.params["id"] == "pi2");
  CHECK(c.params["mode"] == "polygon");
  CHECK(c.params["step"] == "1/64");
  CHECK(c.params["seed"] == 1);
  auto d = cli::parse_config(R"({"id":"pi2"})", "region");
  CHECK(d.params == c.params);
}

TEST_CASE("parse_config rejects bad input") {
  try {
    cli::parse_config(R"({"command":"region","bogus":1})");
    FAIL("unknown key accepted");
  } catch (const cli::UsageError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::parse_config(R"({"command":"region","id":"AR","R":"1"})"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_config(R"({"command":"probe","mode":"vector","R":4})"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_config(R"({"command":"nosuch"})"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_config(R"({"command":"probe","levels":"many"})"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_config(R"({"command":"apply-op","grid":{"nx":64,"oops":1}})"), cli::UsageError);
}

TEST_CASE("region membership from the command line") {
  auto r = run({"region", "--id", "main", "--point", "1/3,1/3,1/3"});
  CHECK(r.status == 0);
  CHECK(r.out == "true\n");
  r = run({"region", "--id", "main", "--point", "9/10,9/10,-4/5"});
  CHECK(r.status == 0);
  CHECK(r.out == "false\n");
  CHECK(run({"region", "--id", "AR", "--R", "1", "--point", "1/3,1/3,1/3"}).status == 2);
  CHECK(run({"region", "--id", "main", "--point", "1/2,1/2,1/2"}).status == 2);
}

TEST_CASE("apply-op with a zero input writes a zero function") {
  const auto path = scratch("zero.bin");
  auto r = run({"apply-op", "--kind", "bht", "--f", "zero", "--g", "gaussian", "--output", path.string()});
  CHECK(r.status == 0);
  std::ifstream is(path, std::ios::binary);
  auto f = read_binary(is);
  CHECK(f.values().abs().maxCoeff() == 0);
}

TEST_CASE("polygon output round-trips through membership") {
  for (const std::string id : {"pi2", "main", "B"}) {
    auto r = run({"region", "--id", id, "--mode", "polygon"});
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    REQUIRE(j.contains("vertices"));
    std::vector<ExponentTriple> verts;
    for (const auto& v : j["vertices"]) {
      std::vector<std::string> parts = v.get<std::vector<std::string>>();
      REQUIRE(parts.size() == 3);
      verts.push_back(parse_triple(parts[0] + "," + parts[1] + "," + parts[2]));
    }
    Polygon p = region_polygon(make_region(id));
    CHECK(verts == p.vertices);
  }
  auto r = run({"region", "--mode", "figure", "--ids", "A,B,pi2"});
  CHECK(r.status == 0);
  CHECK(r.out.find("<svg") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({}).status == 2);
  CHECK(run({"nosuch"}).status == 2);
  CHECK(run({"probe", "--exponents", "2,2,2"}).status == 2);
  CHECK(run({"probe", "--op", "bht", "--bogus", "1"}).status == 2);
  CHECK(run({"apply-op", "--kind", "bp-single", "--scale", "9"}).status == 2);
  CHECK(run({"region", "--config", R"({"command":"region","id":"pi2","extra":true})"}).status == 2);
  CHECK(run({"lp-decompose", "--f", "trig"}).status == 0);
}

TEST_CASE("identical configs give identical bytes") {
  const std::vector<std::string> args{"probe", "--op", "bht", "--levels", "2", "--steps", "2", "--format", "json"};
  auto a = run(args), b = run(args);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  auto c = json::parse(a.out);
  CHECK(c["config"]["steps"] == 2);
  CHECK(c["levels"].size() == 2);
  const std::vector<std::string> ms{"model-sum", "--count", "30", "--eps", "phases", "--seed", "7"};
  CHECK(run(ms).out == run(ms).out);
}

TEST_CASE("atomic writes replace the target") {
  const auto path = scratch("atomic.txt");
  cli::write_atomic(path.string(), "first");
  cli::write_atomic(path.string(), "second");
  std::ifstream is(path);
  std::string s((std::istreambuf_iterator<char>(is)), {});
  CHECK(s == "second");
  for (const auto& e : std::filesystem::directory_iterator(path.parent_path()))
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
}
