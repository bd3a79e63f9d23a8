#include <set>

#include "doctest.h"
#include "srwin/rng.hpp"

TEST_SUITE("rng") {
  TEST_CASE("mix64 fixed points") {
    CHECK(srwin::mix64(0) == 0);
    CHECK(srwin::mix64(1) == 0x5692161d100b05e5ULL);
  }

  TEST_CASE("stream seeds are distinct") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t master : {0ULL, 1ULL, 2ULL}) {
      for (auto s : {srwin::Stream::kForwardLoss, srwin::Stream::kFeedbackLoss,
                     srwin::Stream::kCodingMask, srwin::Stream::kMonteCarlo}) {
        seeds.insert(srwin::stream_seed(master, s));
      }
    }
    CHECK(seeds.size() == 12);
  }

  TEST_CASE("bernoulli source is reproducible and in range") {
    srwin::BernoulliSource a(99);
    srwin::BernoulliSource b(99);
    int hits = 0;
    for (int i = 0; i < 100000; ++i) {
      const double u = a.uniform();
      CHECK(u == b.uniform());
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      hits += u < 0.3 ? 1 : 0;
    }
    // 3 sigma of Binomial(1e5, 0.3) is about 435.
    CHECK(std::abs(hits - 30000) < 435);
  }

  TEST_CASE("frozen mask vectors") {
    struct Vector {
      std::uint64_t seed, block, tx;
      std::size_t b;
      const char* bits;
    };
    const Vector vectors[] = {
        {0, 0, 0, 8, "01101111"},
        {1, 0, 0, 16, "1110010000100110"},
        {1, 2, 3, 30, "001111100101000001011100000001"},
        {42, 7, 1, 64, "1000111000110010011111001010011010010010011011010000011110111000"},
        {12345, 100, 5, 70,
         "0000011010101010100101000111010010011001100110010000001010101011100110"},
    };
    for (const auto& v : vectors) {
      CHECK(srwin::mask_from(v.seed, v.block, v.tx, v.b).to_string() == v.bits);
    }
  }

  TEST_CASE("mask_from keeps bits above the block size clear") {
    const auto m = srwin::mask_from(3, 4, 5, 70);
    CHECK((m.words()[1] >> 6) == 0);
  }

  TEST_CASE("mask bits are balanced") {
    constexpr std::size_t kB = 16;
    std::size_t ones = 0;
    std::size_t empty = 0;
    constexpr int kN = 20000;
    for (int t = 0; t < kN; ++t) {
      const auto m = srwin::mask_from(7, t / 10, t % 10, kB);
      ones += m.count();
      empty += m.none() ? 1 : 0;
    }
    const double frac = static_cast<double>(ones) / (kN * kB);
    CHECK(frac == doctest::Approx(0.5).epsilon(0.01));
    CHECK(empty < 5);
  }

  TEST_CASE("single-bit masks include the empty mask") {
    int zeros = 0;
    for (int t = 0; t < 10000; ++t) zeros += srwin::mask_from(1, 0, t, 1).none() ? 1 : 0;
    CHECK(std::abs(zeros - 5000) < 150);
  }
}
