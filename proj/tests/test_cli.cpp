#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vrmass/errors.hpp"
#include "vrmass/run.hpp"

using namespace vrmass;
using namespace vrmass::cli;
using nlohmann::json;

namespace {

const char* kMassConfig = R"(
manifold: {n: 3, k: 1}
metric: {kind: reference}
command: {name: mass}
)";

}  // namespace

TEST_CASE("config parsing fills defaults and rejects bad fields by name") {
  const auto c = parse_config(kMassConfig);
  CHECK(c.n == 3);
  CHECK(c.command == Command::Mass);
  CHECK(c.command_named);
  CHECK_THROWS_WITH_AS(validate(parse_config("manifold: {n: 2}")), doctest::Contains("manifold.n"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("manifold: {n: three}"), doctest::Contains("manifold.n"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("command: {name: nope}"), doctest::Contains("command.name"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(validate(parse_config("metric: {kind: wobbly}")), doctest::Contains("metric.kind"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("metric: {profiles: [{centre: x}]}"),
                       doctest::Contains("metric.profiles[0].centre"), ValidationError);
}

TEST_CASE("mass run on the reference reports zero and writes its outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "vrmass_cli_test";
  std::filesystem::remove_all(dir);
  const auto out = run(parse_config(kMassConfig), {dir.string(), 1, std::nullopt, std::nullopt});
  REQUIRE(out.exit_code == 0);
  const auto report = json::parse(out.report);
  CHECK(report["status"] == "ok");
  CHECK(std::abs(report["results"]["mass"]["mass"].get<double>()) < 1e-8);
  CHECK(std::filesystem::exists(dir / "run.json"));
  std::ifstream in(dir / "run.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("\"status\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("invalid input yields exit code 1 and a diagnostic") {
  auto cfg = parse_config(kMassConfig);
  cfg.n = 2;
  const auto out = run(cfg, {});
  CHECK(out.exit_code == 1);
  const auto report = json::parse(out.report);
  CHECK(report["status"] == "validation_error");
  CHECK(report["diagnostic"].get<std::string>().find("manifold.n") != std::string::npos);
}

TEST_CASE("reports are byte-identical across worker counts") {
  const auto cfg = parse_config(R"(
manifold: {n: 3, k: 1}
metric: {kind: reference}
command: {name: coercivity, n_min: 3, n_max: 5, samples: 101}
)");
  const auto a = run(cfg, {"", 1, 3, std::nullopt});
  const auto b = run(cfg, {"", 2, 3, std::nullopt});
  CHECK(a.exit_code == 0);
  CHECK(a.report == b.report);
}
