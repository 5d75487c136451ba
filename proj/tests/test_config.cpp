#include "bnmfse/config.hpp"
#include "bnmfse/pipeline.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bnmfse;

namespace {

ErrorKind parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    ConfigFile::parse(in);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("# comment\nmode = online  # trailing\n\nnoise_rank=3\nnoise_models = a.bnmf, b.bnmf\n");
  const ConfigFile f = ConfigFile::parse(in);
  CHECK(f.get("mode") == "online");
  CHECK(f.get("noise_rank") == "3");
  CHECK_FALSE(f.get("missing"));
  RunConfig rc;
  rc.apply(f);
  CHECK(rc.mode == EnhanceMode::kOnline);
  CHECK(rc.online.noise_rank == 3);
  CHECK(rc.noise_models == std::vector<std::string>{"a.bnmf", "b.bnmf"});
}

TEST_CASE("config errors") {
  CHECK(parse_error("no equals sign") == ErrorKind::kFormat);
  CHECK(parse_error("Bad-Key = 1") == ErrorKind::kFormat);
  CHECK(parse_error("a = 1\na = 2") == ErrorKind::kFormat);
  RunConfig rc;
  CHECK_THROWS_AS(rc.apply("nonsense", "1"), Error);
  CHECK_THROWS_AS(rc.apply("max_iter", "1.5"), Error);
  CHECK_THROWS_AS(rc.apply("stream_gain", "abc"), Error);
  CHECK_THROWS_AS(rc.apply("mode", "offline"), Error);
  CHECK_THROWS_AS(rc.apply("seed", "-1"), Error);
}

TEST_CASE("every known key is accepted") {
  RunConfig rc;
  for (const std::string& k : RunConfig::known_keys()) {
    std::string v = "1";
    if (k == "mode") v = "hmm";
    if (k == "speech_model" || k == "noise_models") v = "x.bnmf";
    CHECK_NOTHROW(rc.apply(k, v));
  }
}

TEST_CASE("run config validation") {
  RunConfig rc;
  rc.speech_model = "/nonexistent/speech.bnmf";
  rc.mode = EnhanceMode::kHmm;
  CHECK_THROWS_AS(rc.validate(), Error);
  rc.mode = EnhanceMode::kSupervised;
  rc.noise_models = {"a", "b"};
  try {
    rc.validate();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kArgument);
  }
  rc.mode = EnhanceMode::kOnline;
  rc.apply("q", "0");
  CHECK_THROWS_AS(rc.validate(), Error);
}

TEST_CASE("model list resolves relative paths") {
  const auto dir = std::filesystem::temp_directory_path() / "bnmfse_list_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "list.txt");
    f << "# noise models\nwhite.bnmf\n\n/abs/hum.bnmf\n";
  }
  const auto l = read_model_list(dir / "list.txt");
  REQUIRE(l.size() == 2);
  CHECK(l[0] == (dir / "white.bnmf").string());
  CHECK(l[1] == "/abs/hum.bnmf");
  std::filesystem::remove_all(dir);
}

TEST_CASE("labels are made unique") {
  BnmfModel a, b, c;
  a.label = "hum";
  b.label = "hum";
  const auto l = unique_labels({a, b, c});
  CHECK(l == std::vector<std::string>{"hum", "hum_2", "noise"});
}

TEST_CASE("atomic writes leave no temporary file behind") {
  const auto dir = std::filesystem::temp_directory_path() / "bnmfse_atomic_test";
  std::filesystem::create_directories(dir);
  write_text_atomic(dir / "a.csv", [](std::ostream& o) { o << "x\n"; });
  CHECK(std::filesystem::exists(dir / "a.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "a.csv.tmp"));
  CHECK_THROWS(write_text_atomic(dir / "b.csv", [](std::ostream&) { fail(ErrorKind::kNumerical, "boom"); }));
  CHECK_FALSE(std::filesystem::exists(dir / "b.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "b.csv.tmp"));
  std::filesystem::remove_all(dir);
}
