#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string(DESTRIDE_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string fixture(const char* name) { return (fs::path(FIXTURE_DIR) / name).string(); }

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("destride-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator/(const char* name) const { return (dir / name).string(); }
};

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("lenet transform, verify and report") {
    Workspace ws;
    REQUIRE(cli("init " + fixture("lenet.json") + " " + (ws / "lenet.json") + " --seed 3").status == 0);

    const auto t = cli("transform " + (ws / "lenet.json") + " " + (ws / "unity.json"));
    CHECK(t.status == 0);
    CHECK(contains(t.out, "16x7x7"));
    CHECK(contains(t.out, "2x2 conv 320 -> 320x6x6"));
    CHECK(contains(t.out, "1x1 conv 80 -> 80x6x6"));
    CHECK(contains(t.out, "3x3 conv 200 -> 200x4x4"));
    CHECK(contains(t.out, "1x1 conv 50 -> 50x4x4"));
    CHECK(contains(t.out, "fc 500 -> 500"));

    const auto v = cli("verify " + (ws / "lenet.json") + " " + (ws / "unity.json") + " --trials 100 --tol 1e-9");
    CHECK(v.status == 0);
    CHECK(contains(v.out, "PASS"));

    const auto r = cli("report " + (ws / "lenet.json") + " " + (ws / "unity.json"));
    CHECK(r.status == 0);
    CHECK(contains(r.out, "16.00"));

    const auto j = cli("report " + (ws / "lenet.json") + " " + (ws / "unity.json") + " --json");
    REQUIRE(j.status == 0);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["ok"] == true);
    REQUIRE(doc["layers"].size() == 4);
    const double ratios[] = {16, 4, 4, 1};
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(doc["layers"][i]["distinct_sources"] == doc["layers"][i]["original_count"]);
      CHECK(doc["layers"][i]["ratio"].get<double>() == ratios[i]);
    }
    CHECK(nlohmann::json::parse(doc.dump()) == doc);
  }

  TEST_CASE("corrupted weights fail verification") {
    Workspace ws;
    REQUIRE(cli("init " + fixture("lenet.json") + " " + (ws / "lenet.json") + " --seed 3").status == 0);
    REQUIRE(cli("transform " + (ws / "lenet.json") + " " + (ws / "unity.json") + " --weights sidecar").status == 0);
    {
      std::fstream f(ws / "unity.weights.bin", std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(8 * 3);
      const double bad = 7.0;
      f.write(reinterpret_cast<const char*>(&bad), sizeof bad);
    }
    const auto v = cli("verify " + (ws / "lenet.json") + " " + (ws / "unity.json") + " --trials 5");
    CHECK(v.status == 1);
    CHECK(contains(v.out, "FAIL"));
    CHECK_FALSE(contains(v.out, "max_abs_dev  0.000e+00"));

    CHECK(cli("report " + (ws / "lenet.json") + " " + (ws / "unity.json")).status == 1);
  }

  TEST_CASE("unit strides: warning and identical structure") {
    Workspace ws;
    const auto t = cli("transform " + fixture("stride1.json") + " " + (ws / "out.json"));
    CHECK(t.status == 0);
    CHECK(contains(t.out, "nothing to eliminate"));
    const auto r = cli("report " + fixture("stride1.json") + " " + (ws / "out.json") + " --json");
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(r.out);
    for (const auto& l : doc["layers"]) CHECK(l["ratio"].get<double>() == 1.0);
  }

  TEST_CASE("small inline network") {
    Workspace ws;
    REQUIRE(cli("transform " + fixture("tiny.json") + " " + (ws / "t.json")).status == 0);
    CHECK(cli("verify " + fixture("tiny.json") + " " + (ws / "t.json") + " --tol 1e-12").status == 0);
    REQUIRE(cli("transform " + fixture("tiny.json") + " " + (ws / "t2.json") + " --output-stride 2").status == 0);
    CHECK(cli("verify " + fixture("tiny.json") + " " + (ws / "t2.json") + " --tol 1e-12").status == 0);
  }

  TEST_CASE("exit codes") {
    Workspace ws;
    const auto div = cli("transform " + fixture("indivisible.json") + " " + (ws / "x.json"));
    CHECK(div.status == 3);
    CHECK(contains(div.out, "layer 1"));
    CHECK(contains(div.out, "not divisible"));
    CHECK_FALSE(fs::exists(ws / "x.json"));

    CHECK(cli("transform " + (ws / "missing.json") + " " + (ws / "x.json")).status == 4);
    CHECK(cli("transform " + fixture("tiny.json") + " " + (ws / "no/such/dir/x.json")).status == 4);

    std::ofstream(ws / "broken.json") << "{\"schema_version\": 1,";
    CHECK(cli("transform " + (ws / "broken.json") + " " + (ws / "x.json")).status == 2);

    REQUIRE(cli("transform " + fixture("tiny.json") + " " + (ws / "t.json")).status == 0);
    CHECK(cli("verify " + fixture("tiny.json") + " " + (ws / "t.json") + " --trials 0").status == 2);
    CHECK(cli("verify " + fixture("stride1.json") + " " + (ws / "t.json")).status == 2);
    CHECK(cli("verify " + fixture("tiny.json") + " " + fixture("tiny.json")).status == 2);
    CHECK(cli("frobnicate").status == 2);
    CHECK(cli("").status == 2);
    CHECK(cli("--help").status == 0);
  }

  TEST_CASE("selftest") {
    const auto a = cli("selftest --seed 5");
    CHECK(a.status == 0);
    CHECK(contains(a.out, "theorem2"));
    CHECK_FALSE(contains(a.out, "FAIL"));
    CHECK(cli("selftest --seed 5").out == a.out);

    const auto one = cli("selftest --property lemma1");
    CHECK(one.status == 0);
    CHECK(contains(one.out, "lemma1"));
    CHECK_FALSE(contains(one.out, "theorem1"));

    CHECK(cli("selftest --property nonsense").status == 2);
  }
}
