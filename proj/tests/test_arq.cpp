#include <vector>

#include "doctest.h"
#include "srwin/arq.hpp"

using srwin::Slot;
using srwin::arq::Receiver;
using srwin::arq::Sender;

namespace {

std::vector<std::uint64_t> seqs(const std::vector<Receiver::Delivery>& d) {
  std::vector<std::uint64_t> out;
  for (const auto& x : d) out.push_back(x.seq);
  return out;
}

}  // namespace

TEST_SUITE("arq") {
  TEST_CASE("fresh sender emits sequence zero") {
    Sender s(4, 10);
    const auto pkt = s.on_slot(0);
    REQUIRE(pkt.has_value());
    CHECK(pkt->seq == 0);
    CHECK(pkt->tx_count == 1);
    CHECK(s.outstanding() == 1);
  }

  TEST_CASE("constructor rejects degenerate parameters") {
    CHECK_THROWS_AS(Sender(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Sender(4, 0), std::invalid_argument);
  }

  TEST_CASE("window limits outstanding packets") {
    Sender s(3, 100);
    for (Slot t = 0; t < 3; ++t) CHECK(s.on_slot(t).has_value());
    CHECK_FALSE(s.on_slot(3).has_value());
    CHECK(s.outstanding() == 3);
  }

  TEST_CASE("timeout retransmits with a higher count") {
    Sender s(4, 5);
    for (Slot t = 0; t < 4; ++t) CHECK(s.on_slot(t)->seq == t);
    CHECK_FALSE(s.on_slot(4).has_value());
    const auto re = s.on_slot(5);
    REQUIRE(re.has_value());
    CHECK(re->seq == 0);
    CHECK(re->tx_count == 2);
    CHECK(s.timeouts() == 1);
    CHECK(s.outstanding() == 4);
  }

  TEST_CASE("retransmission takes priority over a new packet") {
    Sender s(8, 3);
    CHECK(s.on_slot(0)->seq == 0);
    CHECK(s.on_slot(1)->seq == 1);
    CHECK(s.on_slot(2)->seq == 2);
    const auto next = s.on_slot(3);
    CHECK(next->seq == 0);
    CHECK(next->tx_count == 2);
  }

  TEST_CASE("ACK handling") {
    Sender s(8, 100);
    s.on_slot(0);
    CHECK(s.on_ack(0) == std::optional<std::uint32_t>{1});
    CHECK(s.outstanding() == 0);
    CHECK_FALSE(s.on_ack(0).has_value());
    CHECK_FALSE(s.on_ack(42).has_value());
    CHECK(s.outstanding() == 0);
  }

  TEST_CASE("ACK beyond a gap leaves the gap outstanding") {
    Sender s(8, 100);
    for (Slot t = 0; t < 6; ++t) s.on_slot(t);
    for (std::uint64_t q : {0U, 1U, 2U}) s.on_ack(q);
    CHECK(s.outstanding() == 3);
    CHECK(s.on_ack(5).has_value());
    CHECK(s.outstanding() == 2);
    CHECK(s.tx_count(3) == std::optional<std::uint32_t>{1});
    CHECK(s.tx_count(4) == std::optional<std::uint32_t>{1});
    CHECK_FALSE(s.tx_count(5).has_value());
  }

  TEST_CASE("window spans an unbounded sequence range") {
    Sender s(2, 1000);
    s.on_slot(0);  // seq 0 stays outstanding
    for (Slot t = 1; t < 50; ++t) {
      const auto pkt = s.on_slot(t);
      REQUIRE(pkt.has_value());
      s.on_ack(pkt->seq);
    }
    CHECK(s.outstanding() == 1);
    CHECK(s.next_seq() == 50);
  }

  TEST_CASE("receiver in-order arrivals") {
    Receiver r;
    for (std::uint64_t q = 0; q < 3; ++q) {
      const auto res = r.on_packet(q, q);
      CHECK(res.ack.seq == q);
      CHECK(seqs(res.delivered) == std::vector<std::uint64_t>{q});
      CHECK(r.occupancy() == 0);
    }
  }

  TEST_CASE("receiver re-sequences 1, 2, 0") {
    Receiver r;
    CHECK(r.on_packet(1, 0).delivered.empty());
    CHECK(r.occupancy() == 1);
    CHECK(r.on_packet(2, 1).delivered.empty());
    CHECK(r.occupancy() == 2);
    CHECK(r.holds(1));
    const auto res = r.on_packet(0, 2);
    CHECK(seqs(res.delivered) == std::vector<std::uint64_t>{0, 1, 2});
    CHECK(res.delivered[1].arrived == 0);
    CHECK(r.occupancy() == 0);
    CHECK(r.next_expected() == 3);
  }

  TEST_CASE("lost head holds k packets") {
    Receiver r;
    const std::uint64_t k = 9;
    for (std::uint64_t q = 1; q <= k; ++q) {
      r.on_packet(q, q);
      CHECK(r.occupancy() == q);
    }
    CHECK(r.on_packet(0, 20).delivered.size() == k + 1);
    CHECK(r.occupancy() == 0);
  }

  TEST_CASE("duplicates are re-ACKed and dropped") {
    Receiver r;
    r.on_packet(0, 0);
    r.on_packet(2, 1);
    const auto first = r.on_packet(0, 2);
    CHECK(first.duplicate);
    CHECK(first.ack.seq == 0);
    CHECK(first.delivered.empty());
    CHECK(r.on_packet(2, 3).duplicate);
    CHECK(r.occupancy() == 1);
    CHECK(r.duplicates() == 2);
  }

  TEST_CASE("lossless steady state sends one new packet per slot") {
    constexpr std::uint32_t kW = 8;
    srwin::ChannelConfig cc;
    cc.rtt = kW;
    srwin::Channel<srwin::arq::DataPacket, srwin::arq::Ack> ch(cc);
    Sender s(kW, kW);
    Receiver r;
    for (Slot t = 0; t < 200; ++t) {
      for (const auto& ack : ch.poll_feedback(t)) s.on_ack(ack.seq);
      const auto pkt = s.on_slot(t);
      REQUIRE(pkt.has_value());
      CHECK(pkt->seq == t);
      CHECK(pkt->tx_count == 1);
      ch.send_forward(t, *pkt);
      if (t >= kW) CHECK(s.outstanding() == kW);
      for (const auto& p : ch.poll_forward(t)) {
        const auto res = r.on_packet(p.seq, t);
        CHECK(res.delivered.size() == 1);
        ch.send_feedback(t, res.ack);
      }
      CHECK(r.occupancy() == 0);
    }
    CHECK(s.timeouts() == 0);
  }

  TEST_CASE("lossy links keep the stream exact and the window bounded") {
    constexpr std::uint32_t kW = 16;
    srwin::ChannelConfig cc;
    cc.rtt = kW;
    cc.loss = 0.3;
    cc.ack_loss = 0.2;
    cc.seed = 77;
    srwin::Channel<srwin::arq::DataPacket, srwin::arq::Ack> ch(cc);
    Sender s(kW, kW);
    Receiver r;
    std::uint64_t expect = 0;
    for (Slot t = 0; t < 50000; ++t) {
      for (const auto& ack : ch.poll_feedback(t)) s.on_ack(ack.seq);
      if (const auto pkt = s.on_slot(t)) ch.send_forward(t, *pkt);
      REQUIRE(s.outstanding() <= kW);
      for (const auto& p : ch.poll_forward(t)) {
        const auto res = r.on_packet(p.seq, t);
        for (const auto& d : res.delivered) REQUIRE(d.seq == expect++);
        ch.send_feedback(t, res.ack);
      }
    }
    CHECK(expect > 20000);
    CHECK(r.duplicates() > 0);
  }
}
