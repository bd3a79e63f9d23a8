#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "srwin/gf2.hpp"
#include "srwin/rng.hpp"

using srwin::gf2::BitMask;
using srwin::gf2::Decoder;

namespace {

using Payload = std::vector<std::byte>;

Payload bytes(std::initializer_list<int> values) {
  Payload out;
  for (int v : values) out.push_back(static_cast<std::byte>(v));
  return out;
}

Payload xor_of(const Payload& a, const Payload& b) {
  Payload out = a;
  srwin::gf2::xor_into(out, b);
  return out;
}

// Rank of a set of small masks by plain elimination on highest set bits.
std::size_t brute_rank(std::vector<std::uint64_t> rows) {
  std::size_t rank = 0;
  for (int bit = 63; bit >= 0; --bit) {
    const std::uint64_t m = std::uint64_t{1} << bit;
    auto it = std::find_if(rows.begin() + static_cast<long>(rank), rows.end(),
                           [m](std::uint64_t r) { return (r & m) != 0; });
    if (it == rows.end()) continue;
    std::iter_swap(rows.begin() + static_cast<long>(rank), it);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != rank && (rows[i] & m)) rows[i] ^= rows[rank];
    }
    ++rank;
  }
  return rank;
}

void check_reduced(const Decoder& d) {
  const auto rows = d.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto pivot = rows[i].lowest_set();
    REQUIRE(pivot < d.block_size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j != i) CHECK_FALSE(rows[j].test(pivot));
    }
  }
}

}  // namespace

TEST_SUITE("gf2") {
  TEST_CASE("bit mask basics") {
    const auto m = BitMask::from_string("10110");
    CHECK(m.size() == 5);
    CHECK(m.test(0));
    CHECK_FALSE(m.test(1));
    CHECK(m.count() == 3);
    CHECK(m.lowest_set() == 0);
    CHECK(m.to_string() == "10110");
    CHECK(BitMask(7).none());
    CHECK(BitMask(7).lowest_set() == 7);

    BitMask wide(130);
    wide.set(129);
    wide.set(64);
    CHECK(wide.count() == 2);
    CHECK(wide.lowest_set() == 64);
    wide.flip(64);
    CHECK(wide.lowest_set() == 129);

    auto a = BitMask::from_string("1100");
    a ^= BitMask::from_string("0110");
    CHECK(a.to_string() == "1010");
    CHECK_THROWS_AS(a ^= BitMask(5), std::invalid_argument);
    CHECK_THROWS_AS(BitMask::from_string("10x"), std::invalid_argument);
  }

  TEST_CASE("absorbing the same mask twice") {
    Decoder d(3);
    CHECK(d.absorb(BitMask::from_string("101")));
    CHECK_FALSE(d.absorb(BitMask::from_string("101")));
    CHECK(d.rank() == 1);
  }

  TEST_CASE("identity basis reaches full rank") {
    Decoder d(3);
    CHECK(d.absorb(BitMask::from_string("100")));
    CHECK(d.absorb(BitMask::from_string("010")));
    CHECK(d.absorb(BitMask::from_string("001")));
    CHECK(d.rank() == 3);
    CHECK(d.is_full_rank());
  }

  TEST_CASE("dependent third mask") {
    Decoder d(3);
    CHECK(d.absorb(BitMask::from_string("101")));
    CHECK(d.absorb(BitMask::from_string("011")));
    CHECK_FALSE(d.absorb(BitMask::from_string("110")));
    CHECK(d.rank() == 2);
    check_reduced(d);
  }

  TEST_CASE("empty mask is never innovative") {
    Decoder d(4);
    CHECK_FALSE(d.absorb(BitMask(4)));
    CHECK(d.rank() == 0);
  }

  TEST_CASE("full rank flag") {
    CHECK_FALSE(Decoder(1).is_full_rank());
    Decoder d(1);
    d.absorb(BitMask::from_string("1"));
    CHECK(d.is_full_rank());
  }

  TEST_CASE("dimension errors") {
    Decoder d(3, 2);
    CHECK_THROWS_AS(d.absorb(BitMask(4), bytes({1, 2})), std::invalid_argument);
    CHECK_THROWS_AS(d.absorb(BitMask::from_string("100"), bytes({1})), std::invalid_argument);
    CHECK(d.rank() == 0);
  }

  TEST_CASE("decode before full rank is a state error") {
    Decoder d(2, 1);
    CHECK_THROWS_AS((void)d.decode(), std::logic_error);
    d.absorb(BitMask::from_string("11"), bytes({3}));
    CHECK_THROWS_AS((void)d.decode(), std::logic_error);
  }

  TEST_CASE("single packet block") {
    Decoder d(1, 3);
    const auto p = bytes({7, 8, 9});
    d.absorb(BitMask::from_string("1"), p);
    CHECK(d.decode() == std::vector<Payload>{p});
  }

  TEST_CASE("back-substitution on two packets") {
    const auto p1 = bytes({0x12, 0x34});
    const auto p2 = bytes({0xab, 0xcd});
    Decoder d(2, 2);
    CHECK(d.absorb(BitMask::from_string("11"), xor_of(p1, p2)));
    CHECK(d.absorb(BitMask::from_string("01"), p2));
    CHECK(d.decode() == std::vector<Payload>{p1, p2});
  }

  TEST_CASE("rank matches an independent elimination") {
    srwin::BernoulliSource rng(11);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t b = 1 + rng.bits() % 20;
      Decoder d(b);
      std::vector<std::uint64_t> raw;
      std::size_t trues = 0;
      std::size_t last = 0;
      const std::size_t draws = 1 + rng.bits() % (b + 6);
      for (std::size_t k = 0; k < draws; ++k) {
        BitMask m(b);
        srwin::random_mask(rng, m);
        raw.push_back(m.words()[0]);
        const bool innovative = d.absorb(m);
        trues += innovative ? 1 : 0;
        CHECK(d.rank() >= last);
        CHECK(d.rank() <= b);
        CHECK(d.rank() == last + (innovative ? 1 : 0));
        last = d.rank();
        CHECK(d.rank() == brute_rank(raw));
      }
      CHECK(trues == d.rank());
      check_reduced(d);
    }
  }

  TEST_CASE("round trip across word boundaries") {
    srwin::BernoulliSource rng(5);
    for (std::size_t b : {1U, 2U, 63U, 64U, 65U, 130U}) {
      for (int rep = 0; rep < 20; ++rep) {
        std::vector<Payload> originals(b, Payload(9));
        for (auto& p : originals) {
          for (auto& x : p) x = static_cast<std::byte>(rng.bits());
        }
        Decoder d(b, 9);
        while (!d.is_full_rank()) {
          BitMask m(b);
          srwin::random_mask(rng, m);
          Payload coded(9);
          for (std::size_t i = 0; i < b; ++i) {
            if (m.test(i)) srwin::gf2::xor_into(coded, originals[i]);
          }
          d.absorb(m, coded);
        }
        check_reduced(d);
        CHECK(d.decode() == originals);
      }
    }
  }
}
