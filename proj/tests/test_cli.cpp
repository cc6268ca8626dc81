#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odoflow/cli.hpp"
#include "odoflow/space.hpp"

using namespace odoflow;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  const int code = run_command(args, out);
  return {code, out.str()};
}

bool has(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "odoflow_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("kvalues prints the product table and honors --max") {
  const auto r = run({"kvalues", "--max", "6"});
  CHECK(r.code == 0);
  CHECK(r.out == "n,K_n\n4,288\n5,34560\n6,24883200\n");

  const auto bad = run({"kvalues", "--max", "3"});
  CHECK(bad.code == 2);
  CHECK(has(bad.out, "error:"));
  CHECK(has(bad.out, "--max"));

  const fs::path out = tmp_dir() / "kvalues.csv";
  const auto emitted = run({"kvalues", "--max", "5", "--out", out.string()});
  CHECK(emitted.code == 0);
  CHECK(slurp(out) == "n,K_n\n4,288\n5,34560\n");
  CHECK_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST_CASE("prop51 corrected is clean, printed lists the failures") {
  const auto ok = run({"prop51", "--depth", "3"});
  CHECK(ok.code == 0);
  CHECK(has(ok.out, "0 violations"));

  const auto printed = run({"prop51", "--depth", "3", "--variant", "printed"});
  CHECK(printed.code == 0);  // expected mismatches, not an error
  const std::string first_line = printed.out.substr(0, printed.out.find('\n'));
  CHECK(has(first_line, " violations"));
  CHECK(first_line != "0 violations");
  CHECK(has(printed.out, "  0-1-0 k=1 n=5 expected x_3=1 got 0"));

  const fs::path out = tmp_dir() / "violations.csv";
  const auto emitted =
      run({"prop51", "--depth", "3", "--variant", "printed", "--out",
           out.string(), "--jobs", "2"});
  CHECK(emitted.code == 0);
  const std::string csv = slurp(out);
  CHECK(has(csv,
            "prefix,k,n,variant,expected_index,expected_value,observed_value"));
  CHECK(has(csv, "0-1-0,1,5,printed,3,1,0"));

  const auto bad = run({"prop51", "--variant", "bogus"});
  CHECK(bad.code == 2);
  CHECK(has(bad.out, "error:"));
}

TEST_CASE("bounds reports the interval table and the verdict line") {
  const auto r = run({"bounds", "--depth", "3", "--from", "4", "--to", "7"});
  CHECK(r.code == 0);
  CHECK(has(r.out, "n,m,forward,backward,corrected_bound,printed_bound,"
                   "forward_ok_corrected,forward_ok_printed"));
  CHECK(has(r.out, "4,2,1/8,1/8,1/4,1/8,true,true"));
  CHECK(has(r.out, "corrected bound holds on all rows"));

  // the last interval would need depth 4 to decide
  const auto undecidable =
      run({"bounds", "--depth", "3", "--from", "4", "--to", "16"});
  CHECK(undecidable.code == 2);
  CHECK(has(undecidable.out, "error:"));
}

TEST_CASE("decay writes deterministic csv and svg artifacts") {
  const fs::path csv_path = tmp_dir() / "decay.csv";
  const fs::path svg_path = tmp_dir() / "decay.svg";
  const std::vector<std::string> args = {
      "decay", "--depth", "3",           "--from", "4",
      "--to",  "7",       "--out",       csv_path.string(),
      "--svg", svg_path.string()};

  const auto first = run(args);
  CHECK(first.code == 0);
  CHECK(has(first.out, "union measure within envelope on all rows"));
  REQUIRE(fs::exists(csv_path));
  REQUIRE(fs::exists(svg_path));
  const std::string csv1 = slurp(csv_path);
  const std::string svg1 = slurp(svg_path);
  CHECK(has(csv1, "label,lo,hi,forward,backward,union,envelope"));
  CHECK(has(csv1, "K4,288/1,34560/1,1/8,1/8,1/4,1/2"));
  CHECK(has(svg1, "<svg"));

  const auto second = run(args);
  CHECK(second.code == 0);
  CHECK(slurp(csv_path) == csv1);
  CHECK(slurp(svg_path) == svg1);
}

TEST_CASE("decay log-scale grid and its validation") {
  const auto r = run({"decay", "--depth", "3", "--family", "log-scale",
                      "--s-from", "6", "--s-to", "7", "--s-step", "1",
                      "--delta", "1/2"});
  CHECK(r.code == 0);
  CHECK(has(r.out, "s=6/1"));
  CHECK(has(r.out, "s=7/1"));
  CHECK(has(r.out, "union measure within envelope on all rows"));

  const auto missing = run({"decay", "--depth", "3", "--family", "log-scale"});
  CHECK(missing.code == 2);
  CHECK(has(missing.out, "error:"));

  const auto too_far = run({"decay", "--depth", "3", "--from", "4", "--to",
                            "16"});
  CHECK(too_far.code == 2);

  const auto bad_family = run({"decay", "--family", "bogus"});
  CHECK(bad_family.code == 2);
}

TEST_CASE("delta reports the base return statistics") {
  const auto closed = run({"delta", "--window", "288:34560"});
  CHECK(closed.code == 0);
  CHECK(has(closed.out, "window [288/1, 34560/1)"));
  CHECK(has(closed.out, "base 1/1"));
  CHECK(has(closed.out, "forward 1/8 (undetermined 0/1, boundary 1/64)"));
  CHECK(has(closed.out, "backward 1/8 (undetermined 0/1, boundary 1/64)"));
  CHECK(has(closed.out, "union 1/4 (undetermined 0/1)"));

  // opening the lower endpoint excludes the only landing sum
  const auto open = run({"delta", "--window", "288:34560", "--open"});
  CHECK(open.code == 0);
  CHECK(has(open.out, "window (288/1, 34560/1)"));
  CHECK(has(open.out, "forward 0/1"));
  CHECK(has(open.out, "union 0/1"));

  const auto forward_only =
      run({"delta", "--window", "288:34560", "--directions", "forward"});
  CHECK(forward_only.code == 0);
  CHECK(has(forward_only.out, "forward 1/8"));
  CHECK(has(forward_only.out, "backward 0/1 (undetermined 0/1, boundary 0/1)"));
  CHECK(has(forward_only.out, "union 1/8"));

  const auto bad_dir =
      run({"delta", "--window", "288:34560", "--directions", "sideways"});
  CHECK(bad_dir.code == 2);
}

TEST_CASE("delta emits the full report as json") {
  const fs::path out = tmp_dir() / "delta.json";
  const auto r = run({"delta", "--window", "288:34560", "--out", out.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("base_measure").get<std::string>() == "1/1");
  CHECK(j.at("window").at("lo").get<std::string>() == "288/1");
  CHECK(j.at("forward").at("measure").get<std::string>() == "1/8");
  CHECK(j.at("union").at("measure").get<std::string>() == "1/4");
}

TEST_CASE("delta accepts certified log-scale windows") {
  const auto r = run({"delta", "--s", "6", "--delta", "1/2"});
  CHECK(r.code == 0);
  CHECK(has(r.out, "union 1/4 (undetermined 0/1)"));

  const auto half = run({"delta", "--s", "6"});
  CHECK(half.code == 2);
  CHECK(has(half.out, "--s and --delta must be given together"));

  // the cap is far too small for e^1000; the certification failure is
  // reported verbatim, not as a usage error
  const auto starved =
      run({"delta", "--s", "1000", "--delta", "1/2", "--precision-cap", "16"});
  CHECK(starved.code == 1);
  CHECK(has(starved.out, "within 16 bits"));
  CHECK_FALSE(has(starved.out, "error:"));
}

TEST_CASE("delta rejects malformed windows") {
  CHECK(run({"delta", "--window", "abc:def"}).code == 2);
  CHECK(run({"delta", "--window", "288"}).code == 2);
  const auto none = run({"delta"});
  CHECK(none.code == 2);
  CHECK(has(none.out, "need --window"));
}

TEST_CASE("lambda-rect reports the rectangle measure") {
  const auto r =
      run({"lambda-rect", "--band", "0:1", "--window", "286:290"});
  CHECK(r.code == 0);
  CHECK(has(r.out, "band [0/1, 1/1]"));
  CHECK(has(r.out, "measure 1/8"));
  CHECK(has(r.out, "undetermined 0/1"));

  const auto missing = run({"lambda-rect", "--window", "286:290"});
  CHECK(missing.code == 2);
  CHECK(has(missing.out, "--band"));

  const auto too_tall =
      run({"lambda-rect", "--band", "0:300", "--window", "286:290"});
  CHECK(too_tall.code == 2);
  CHECK(has(too_tall.out, "band top"));
}

TEST_CASE("prop-a always mirrors and applies the open window") {
  const auto all = run({"prop-a", "--depth", "3", "--scheme", "bernoulli:1/3",
                        "--window", "3/5:4/5", "--eta", "1/2"});
  CHECK(all.code == 0);
  CHECK(has(all.out, "window (3/5, 4/5) mirrored"));
  CHECK(has(all.out, "measure 1/1 of base 1/1"));
  CHECK(has(all.out, "exceeds eta*base (eta=1/2): true"));

  const auto gap = run({"prop-a", "--depth", "3", "--scheme", "bernoulli:1/3",
                        "--window", "1:6/5"});
  CHECK(gap.code == 0);
  CHECK(has(gap.out, "measure 0/1 of base 1/1"));
  CHECK_FALSE(has(gap.out, "exceeds"));

  // equal symbol weights never move the ratio off 1
  const auto uniform = run({"prop-a", "--depth", "3", "--window", "3/5:4/5"});
  CHECK(uniform.code == 0);
  CHECK(has(uniform.out, "measure 0/1 of base 1/1"));
}

TEST_CASE("flow-eval prints the outcome as json") {
  const auto reached =
      run({"flow-eval", "--point", "0,0,0", "--height", "0", "--t", "288"});
  CHECK(reached.code == 0);
  const auto j = nlohmann::json::parse(reached.out);
  REQUIRE(j.contains("reached"));
  CHECK(j.at("reached").at("base") == nlohmann::json::array({1, 0, 0}));
  CHECK(j.at("reached").at("height").get<std::string>() == "0/1");

  const auto stopped =
      run({"flow-eval", "--point", "0,0,0", "--height", "0", "--t", "-1"});
  CHECK(stopped.code == 0);
  const auto s = nlohmann::json::parse(stopped.out);
  REQUIRE(s.contains("stopped_at"));
  CHECK(s.at("remaining").get<std::string>() == "-1/1");

  const auto above =
      run({"flow-eval", "--point", "0,0,0", "--height", "288", "--t", "0"});
  CHECK(above.code == 2);
  CHECK(has(above.out, "error:"));

  const auto missing = run({"flow-eval", "--height", "0", "--t", "1"});
  CHECK(missing.code == 2);
}

TEST_CASE("conjugacy checks a coordinate relabeling") {
  const CoordinateScheme scheme = CoordinateScheme::dyadic(3);
  const fs::path set_path = tmp_dir() / "a0.json";
  spill(set_path, set_to_json(CylinderSet::coordinate_value(scheme, 2, 0)));

  const auto r = run({"conjugacy", "--depth", "3", "--window", "288:34560",
                      "--perm", "2:3,2,1,0", "--set", set_path.string()});
  CHECK(r.code == 0);
  CHECK(has(r.out, "original  forward 1/8 backward 1/8 union 1/4"));
  CHECK(has(r.out, "equal true"));

  // deliberately mismatched ceiling on the conjugated side
  const auto control =
      run({"conjugacy", "--depth", "3", "--window", "288:34560", "--perm",
           "2:3,2,1,0", "--set", set_path.string(), "--conjugated-ceiling",
           "constant:1"});
  CHECK(control.code == 0);
  CHECK(has(control.out, "equal false"));
  CHECK(has(control.out, "conjugated forward 0/1 backward 0/1 union 0/1"));

  const auto bad_perm = run({"conjugacy", "--depth", "3", "--window",
                             "288:34560", "--perm", "9:1,0"});
  CHECK(bad_perm.code == 2);
  CHECK(has(bad_perm.out, "out of range"));
}

TEST_CASE("conjugacy --weighting switches to the density check") {
  const CoordinateScheme scheme = CoordinateScheme::dyadic(3);
  const fs::path set_path = tmp_dir() / "a0w.json";
  spill(set_path, set_to_json(CylinderSet::coordinate_value(scheme, 2, 0)));
  const fs::path w_path = tmp_dir() / "weighting.json";
  spill(w_path, weighting_to_json(Weighting(
                    1, {{{0}, make_rat(3, 2)}, {{1}, make_rat(1, 2)}})));

  const auto r = run({"conjugacy", "--depth", "3", "--window", "288:34560",
                      "--weighting", w_path.string(), "--set",
                      set_path.string()});
  CHECK(r.code == 0);
  CHECK(has(r.out, "base 1/4"));
  CHECK(has(r.out, "weighted 1/4"));
  CHECK(has(r.out, "max density 3/2"));
  CHECK(has(r.out, "dominated true"));

  const auto unreadable =
      run({"conjugacy", "--depth", "3", "--window", "288:34560", "--weighting",
           (tmp_dir() / "missing.json").string()});
  CHECK(unreadable.code == 2);
}

TEST_CASE("usage errors exit with 2, help exits with 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"delta", "--unknown-flag"}).code == 2);

  const auto shallow = run({"delta", "--depth", "2", "--window", "1:2"});
  CHECK(shallow.code == 2);
  CHECK(has(shallow.out, "at least 3"));

  const auto deep = run({"delta", "--depth", "8", "--window", "288:34560"});
  CHECK(deep.code == 2);
  CHECK(has(deep.out, "--allow-large-depth"));

  const auto bad_scheme =
      run({"delta", "--scheme", "ternary", "--window", "1:2"});
  CHECK(bad_scheme.code == 2);

  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(has(help.out, "kvalues"));
  CHECK(has(help.out, "conjugacy"));
}

TEST_CASE("config files provide defaults that flags override") {
  const fs::path cfg = tmp_dir() / "config.json";
  spill(cfg, "{\"window\": \"1:2\", \"depth\": 3}\n");

  const auto defaults = run({"delta", "--config", cfg.string()});
  CHECK(defaults.code == 0);
  CHECK(has(defaults.out, "window [1/1, 2/1)"));
  CHECK(has(defaults.out, "union 0/1"));

  const auto overridden =
      run({"delta", "--config", cfg.string(), "--window", "288:34560"});
  CHECK(overridden.code == 0);
  CHECK(has(overridden.out, "window [288/1, 34560/1)"));
  CHECK(has(overridden.out, "union 1/4"));

  const auto unreadable = run({"delta", "--config", "/no/such/config.json"});
  CHECK(unreadable.code == 2);
  CHECK(has(unreadable.out, "cannot read --config file"));
}
