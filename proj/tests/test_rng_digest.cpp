#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "dmsim/digest.hpp"
#include "dmsim/rng.hpp"

using namespace dmsim;

TEST_CASE("sha256 matches published vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
        "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
  // Two-block message (56 bytes forces the length into a second block).
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 long input") {
  std::string a_million(1'000'000, 'a');
  CHECK(sha256_hex(a_million) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 streaming equals one shot at block boundaries") {
  const std::string msg(130, 'x');  // spans three compression blocks
  for (std::size_t cut : {std::size_t{0}, std::size_t{1}, std::size_t{55}, std::size_t{56},
                          std::size_t{63}, std::size_t{64}, std::size_t{65}, std::size_t{128}}) {
    Sha256 h;
    h.update(msg.data(), cut);
    h.update(msg.data() + cut, msg.size() - cut);
    CHECK(h.hex_digest() == sha256_hex(msg));
  }
}

TEST_CASE("entity rng is a pure function of seed, stream and id") {
  EntityRng a(42, StreamKind::sensor_false_report, 7);
  EntityRng b(42, StreamKind::sensor_false_report, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("entity rng streams do not collide across ids or kinds") {
  std::set<std::uint64_t> firsts;
  for (int id = 0; id < 50; ++id) {
    firsts.insert(EntityRng(1, StreamKind::sensor_false_report, id).next_u64());
    firsts.insert(EntityRng(1, StreamKind::map_waypoint, id).next_u64());
  }
  CHECK(firsts.size() == 100);
}

TEST_CASE("u01 stays in the half open unit interval") {
  EntityRng r(9, StreamKind::map_waypoint, 3);
  for (int i = 0; i < 10'000; ++i) {
    const double u = r.next_u01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("bernoulli degenerate probabilities") {
  EntityRng r(5, StreamKind::sensor_false_report, 1);
  for (int i = 0; i < 1000; ++i) CHECK_FALSE(r.next_bernoulli(0.0));
  for (int i = 0; i < 1000; ++i) CHECK(r.next_bernoulli(1.0));
}

TEST_CASE("uniform respects bounds") {
  EntityRng r(5, StreamKind::map_waypoint, 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = r.next_uniform(-3.0, 4.5);
    CHECK(v >= -3.0);
    CHECK(v < 4.5);
  }
}
