// Unit tests for CSV serialization, SHA-256, and the trace cache.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qdual/io_util.hpp"

using namespace qdual;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_g17 round-trips doubles bit-exactly") {
  for (const double x : {0.1, 1.0 / 3.0, 2.718281828459045, -1e-300,
                         12345.678901234567, 0.0}) {
    CHECK(std::strtod(format_g17(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("csv quoting follows RFC rules") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("write_csv then read_csv round-trips including quoted fields") {
  const fs::path dir = temp_dir("qdual_io_test");
  const fs::path file = dir / "t.csv";
  const std::vector<std::string> header{"name", "value"};
  const std::vector<std::vector<std::string>> rows{
      {"simple", "1"}, {"needs,quote", "2"}, {"has \"q\"", "3"}};
  write_csv(file, header, rows);
  const auto got = read_csv(file);
  REQUIRE(got.size() == 4);
  CHECK(got[0] == header);
  for (int i = 0; i < 3; ++i) CHECK(got[i + 1] == rows[i]);
  CHECK_THROWS_AS(write_csv(file, header, {{"only-one-field"}}),
                  ValidationError);
}

TEST_CASE("write_csv is byte-deterministic") {
  const fs::path dir = temp_dir("qdual_io_det");
  const std::vector<std::string> header{"x", "y"};
  const std::vector<std::vector<std::string>> rows{
      {format_g17(1.0 / 3.0), format_g17(2.0 / 7.0)}};
  write_csv(dir / "a.csv", header, rows);
  write_csv(dir / "b.csv", header, rows);
  std::ifstream fa(dir / "a.csv", std::ios::binary);
  std::ifstream fb(dir / "b.csv", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(fa)), {});
  std::string sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(sa == sb);
  CHECK(!sa.empty());
}

TEST_CASE("sha256 matches the FIPS test vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // Multi-block message (> 64 bytes).
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("trace cache: store, hit, append-only replay") {
  const fs::path dir = temp_dir("qdual_cache_test");
  TraceCache cache(dir);
  const std::string key = "model=spin J=0.7 bx=0.9 bz=0.9 N=4 T=2";
  CHECK(!cache.lookup(key, "j=1").has_value());
  cache.store(key, "j=1", cplx(1.25, -0.5));
  cache.store(key, "j=2", cplx(0.0, 3.0));
  TraceCache replay(dir);
  const auto hit = replay.lookup(key, "j=1");
  REQUIRE(hit.has_value());
  CHECK(*hit == cplx(1.25, -0.5));
  // Identical re-store is fine; conflicting re-store throws.
  CHECK_NOTHROW(replay.store(key, "j=1", cplx(1.25, -0.5)));
  CHECK_THROWS_AS(replay.store(key, "j=1", cplx(1.0, 0.0)), ValidationError);
  // Distinct keys do not collide.
  CHECK(!replay.lookup("other-key", "j=1").has_value());
  CHECK_THROWS_AS(cache.store(key, "bad label", cplx(0, 0)), ValidationError);
}
