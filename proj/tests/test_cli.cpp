#include "doctest.h"

#include <sstream>

#include "json.hpp"
#include "pddrm/cli.hpp"
#include "pddrm/io.hpp"
#include "pddrm/manifest.hpp"
#include "support.hpp"

using namespace pddrm;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& x) { return x.string(); }

}  // namespace

TEST_CASE("gen-data writes the documented size and is deterministic") {
  testing::TempDir dir("gen");
  REQUIRE(cli({"gen-data", "--count", "2", "--seed", "4", "--out", p(dir / "a.pdds")}).code == 0);
  REQUIRE(cli({"gen-data", "--count", "2", "--seed", "4", "--out", p(dir / "b.pdds")}).code == 0);
  CHECK(std::filesystem::file_size(dir / "a.pdds") == 131088);
  CHECK(read_file(dir / "a.pdds") == read_file(dir / "b.pdds"));
  const auto m = read_manifest(p(dir / "a.pdds") + ".manifest.json");
  CHECK(m.command == "gen-data");
  CHECK(m.outputs.front() == p(dir / "a.pdds"));

  // Replaying the manifest elsewhere reproduces the file byte for byte.
  REQUIRE(cli({"replay", "--manifest", p(dir / "a.pdds") + ".manifest.json", "--out-dir", p(dir / "re")}).code == 0);
  CHECK(read_file(dir / "re" / "a.pdds") == read_file(dir / "a.pdds"));
}

TEST_CASE("run writes csv and manifest, and replay reproduces the csv") {
  testing::TempDir dir("run");
  const std::string test = p(dir / "test.pdds"), train = p(dir / "train.pdds");
  REQUIRE(cli({"gen-data", "--count", "6", "--seed", "1", "--n", "16", "--out", test}).code == 0);
  REQUIRE(cli({"gen-data", "--count", "6", "--seed", "2", "--n", "16", "--out", train}).code == 0);
  const auto r = cli({"run", "--problem", "inverse", "--method", "ddrm", "--dataset", test, "--train", train,
                      "--T", "20", "--seed", "5", "--out-dir", p(dir / "o1"), "--threads", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("ddrm-inverse samples=6") != std::string::npos);
  const std::string csv = read_file(dir / "o1" / "results.csv");
  CHECK(csv.rfind("method,problem,sample_index,mae\nddrm,inverse,0,", 0) == 0);
  CHECK(csv.find("ddrm,inverse,batch,") != std::string::npos);

  const auto j = nlohmann::json::parse(read_file(dir / "o1" / "manifest.json"));
  CHECK(j["records"][0]["method"] == "ddrm-inverse");
  CHECK(j["records"][0]["sample_count"] == 6);
  CHECK(j["config"]["eta"] == 8e-4);

  REQUIRE(cli({"replay", "--manifest", p(dir / "o1" / "manifest.json"), "--out-dir", p(dir / "o2")}).code == 0);
  CHECK(read_file(dir / "o2" / "results.csv") == csv);

  // Thread count does not change the numbers.
  REQUIRE(cli({"run", "--problem", "inverse", "--method", "ddrm", "--dataset", test, "--train", train, "--T", "20",
               "--seed", "5", "--out-dir", p(dir / "o3"), "--threads", "1"})
              .code == 0);
  CHECK(read_file(dir / "o3" / "results.csv") == csv);
}

TEST_CASE("run baselines and saved predictions") {
  testing::TempDir dir("base");
  const std::string test = p(dir / "t.pdds");
  REQUIRE(cli({"gen-data", "--count", "3", "--seed", "1", "--n", "16", "--mix", "type1", "--out", test}).code == 0);
  const auto r = cli({"run", "--problem", "forward", "--method", "spectral", "--dataset", test, "--seed", "0",
                      "--out-dir", p(dir / "s"), "--save-predictions"});
  REQUIRE(r.code == 0);
  const auto preds = read_pdds(dir / "s" / "predictions.pdds");
  const auto data = read_pdds(test);
  REQUIRE(preds.size() == 3);
  CHECK(preds[0].f == data[0].f);
  CHECK(mae(preds[0].u, data[0].u) < 1e-9);
  CHECK(cli({"run", "--problem", "inverse", "--method", "fd", "--dataset", test, "--seed", "0", "--out-dir",
             p(dir / "f")})
            .code == 0);
}

TEST_CASE("configuration errors exit with code 3") {
  testing::TempDir dir("cfg");
  const std::string test = p(dir / "t.pdds");
  REQUIRE(cli({"gen-data", "--count", "2", "--seed", "1", "--n", "8", "--out", test}).code == 0);
  const std::vector<std::string> base = {"run", "--dataset", test, "--seed", "1", "--out-dir", p(dir / "o")};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return cli(a).code;
  };
  CHECK(with({"--method", "nope"}) == 3);
  CHECK(with({"--problem", "sideways"}) == 3);
  CHECK(with({"--method", "ddrm"}) == 3);  // spectral-prior without --train
  CHECK(with({"--method", "ddrm", "--denoiser", "wiener"}) == 3);
  CHECK(with({"--method", "dry", "--denoiser", "spectral-prior"}) == 3);
  CHECK(with({"--method", "fd", "--denoiser", "identity"}) == 3);
  CHECK(with({"--method", "dry", "--sigma-min", "0.0001", "--sigma-max", "0.001", "--problem", "inverse"}) == 3);
  CHECK(with({"--method", "dry", "--eta", "2"}) == 3);
  CHECK(with({"--bogus-flag"}) == 3);
  CHECK(cli({"run", "--dataset", p(dir / "missing.pdds"), "--seed", "1", "--out-dir", p(dir / "o")}).code == 3);
  CHECK(cli({"gen-data", "--count", "2", "--out", p(dir / "x.pdds")}).code == 3);  // no seed
  CHECK(cli({"gen-data", "--count", "2", "--seed", "1", "--mix", "nn:0.3", "--out", p(dir / "x.pdds")}).code == 3);
  CHECK(cli({"verify", "--target", "thm9"}).code == 3);
  CHECK(cli({"replay", "--manifest", p(dir / "none.json")}).code == 3);
  CHECK(cli({}).code == 3);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("verify exit codes follow the report") {
  testing::TempDir dir("ver");
  const auto ok = cli({"verify", "--target", "eigen", "--n", "16", "--out", p(dir / "e.json")});
  CHECK(ok.code == 0);
  CHECK(nlohmann::json::parse(read_file(dir / "e.json"))["pass"] == true);
  // Two draws cannot pin the centre variance to 5%.
  const auto bad = cli({"verify", "--target", "bridge", "--draws", "2", "--seed", "3", "--out", p(dir / "b.json")});
  CHECK(bad.code == 2);
  CHECK(nlohmann::json::parse(read_file(dir / "b.json"))["pass"] == false);
  CHECK(std::filesystem::exists(p(dir / "b.json") + ".manifest.json"));
}

TEST_CASE("render writes pgm and sidecar") {
  testing::TempDir dir("ren");
  const std::string test = p(dir / "t.pdds");
  REQUIRE(cli({"gen-data", "--count", "2", "--seed", "1", "--n", "16", "--out", test}).code == 0);
  REQUIRE(cli({"render", "--input", test, "--index", "1", "--channel", "f", "--out", p(dir / "img")}).code == 0);
  const std::string pgm = read_file(dir / "img.pgm");
  const auto meta = parse_render_meta(read_file(dir / "img.json"));
  CHECK(meta.n == 16);
  const auto back = unrender_pgm(pgm, meta);
  const auto data = read_pdds(test);
  CHECK(testing::max_abs_diff(back.values(), data[1].f.values()) <= (meta.max - meta.min) / 65536.0);
  CHECK(cli({"render", "--input", test, "--index", "2", "--out", p(dir / "img")}).code == 3);
}

#ifdef PDDRM_ECHO_DENOISER
TEST_CASE("run with an external denoiser") {
  testing::TempDir dir("ext");
  const std::string test = p(dir / "t.pdds");
  REQUIRE(cli({"gen-data", "--count", "2", "--seed", "1", "--n", "16", "--out", test}).code == 0);
  const auto ext = cli({"run", "--problem", "forward", "--method", "ddrm", "--denoiser",
                        std::string("external:") + PDDRM_ECHO_DENOISER, "--dataset", test, "--T", "8", "--seed", "2",
                        "--out-dir", p(dir / "e")});
  REQUIRE(ext.code == 0);
  const auto dry = cli({"run", "--problem", "forward", "--method", "dry", "--dataset", test, "--T", "8", "--seed",
                        "2", "--out-dir", p(dir / "d")});
  REQUIRE(dry.code == 0);
  const auto je = nlohmann::json::parse(read_file(dir / "e" / "manifest.json"));
  const auto jd = nlohmann::json::parse(read_file(dir / "d" / "manifest.json"));
  CHECK(je["records"][0]["mae"].get<double>() ==
        doctest::Approx(jd["records"][0]["mae"].get<double>()).epsilon(1e-9));
  CHECK(cli({"run", "--method", "ddrm", "--denoiser", "external:/no/such/prog", "--dataset", test, "--seed", "1",
             "--out-dir", p(dir / "x")})
            .code == 3);
}
#endif
