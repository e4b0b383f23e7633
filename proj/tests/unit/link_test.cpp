#include <gtest/gtest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "brailleband/emulator.hpp"
#include "brailleband/error.hpp"
#include "brailleband/link.hpp"
#include "support/oracles.hpp"

namespace brailleband {
namespace {

using namespace std::chrono_literals;

TEST(Frames, WireFormat) {
  EXPECT_EQ(encode_frame(DataFrame{'a'}), (std::vector<std::uint8_t>{'a'}));
  EXPECT_EQ(encode_frame(ConfigFrame{ConfigParam::DotOn, 200}), (std::vector<std::uint8_t>{0x1B, 0x01, 0x00, 0xC8}));
  EXPECT_EQ(encode_frame(ConfigFrame{ConfigParam::MinCharGap, 0x1234}),
            (std::vector<std::uint8_t>{0x1B, 0x03, 0x12, 0x34}));
  EXPECT_THROW(encode_frame(DataFrame{kEscapeByte}), Error);
  EXPECT_THROW(encode_frame(DataFrame{'!'}), Error);
}

TEST(VirtualClock, NeverMovesBackwards) {
  VirtualClock clock(100ms);
  clock.advance_by(50ms);
  EXPECT_EQ(clock.now(), 150ms);
  EXPECT_THROW(clock.advance_to(10ms), Error);
}

TEST(HostTransmit, PacesByPreviousCharacter) {
  VirtualClock clock;
  const auto bytes = host_transmit("aa", TimingConfig::with_gap(1000ms), clock);
  EXPECT_EQ(bytes, (std::vector<TimedByte>{{0ms, 'a'}, {1600ms, 'a'}}));
  EXPECT_EQ(clock.now(), 3200ms);
}

TEST(HostTransmit, QThenA) {
  VirtualClock clock;
  const auto bytes = host_transmit("qa", TimingConfig::with_gap(1000ms), clock);
  EXPECT_EQ(bytes, (std::vector<TimedByte>{{0ms, 'q'}, {4000ms, 'a'}}));
}

TEST(HostTransmit, EmptyText) {
  VirtualClock clock;
  EXPECT_TRUE(host_transmit("", TimingConfig{}, clock).empty());
  EXPECT_EQ(clock.now(), 0ms);
}

TEST(HostTransmit, ValidatesBeforeSending) {
  VirtualClock clock;
  EXPECT_THROW(host_transmit("ab?", TimingConfig{}, clock), Error);
  EXPECT_EQ(clock.now(), 0ms);
}

TEST(HostTransmit, SpacesAndDigits) {
  VirtualClock clock;
  const auto bytes = host_transmit("a 1", TimingConfig::with_gap(1000ms), clock);
  // 'a' then space once its gap ends, then '#' a word gap after 'a' finished
  // vibrating, then '1'.
  EXPECT_EQ(bytes, (std::vector<TimedByte>{{0ms, 'a'}, {1600ms, ' '}, {2600ms, '#'}, {6000ms, '1'}}));
  EXPECT_EQ(clock.now(), 7600ms);
}

TEST(HostTransmit, MatchesScheduleBoundaries) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto text = oracle::random_text(rng, 10, false);
    const auto cfg = TimingConfig::with_gap(Millis{static_cast<long long>(rng() % 2000)});
    VirtualClock clock;
    const auto bytes = host_transmit(text, cfg, clock);
    const auto schedule = schedule_text(encode_text(text), cfg);
    ASSERT_EQ(bytes.size(), schedule.char_boundaries.size());
    for (std::size_t k = 0; k < bytes.size(); ++k) ASSERT_EQ(bytes[k].at, schedule.char_boundaries[k].start);
    ASSERT_EQ(clock.now(), schedule.total_duration);
  }
}

TEST(HostTransmit, TimingPreamble) {
  VirtualClock clock;
  TimingConfig cfg = TimingConfig::with_gap(500ms);
  cfg.dot_on = 200ms;
  const auto bytes = host_transmit("a", cfg, clock, HostOptions{.send_timing_preamble = true});
  ASSERT_EQ(bytes.size(), 9U);
  EXPECT_EQ(bytes[0], (TimedByte{0ms, 0x1B}));
  EXPECT_EQ(bytes[1].byte, 0x01);
  EXPECT_EQ(bytes[3].byte, 200);
  EXPECT_EQ(bytes[5].byte, 0x02);
  EXPECT_EQ(bytes[8], (TimedByte{0ms, 'a'}));
}

TEST(ReceiverFeed, SingleDot) {
  const auto out = receiver_feed({}, 'a', 0ms);
  EXPECT_EQ(out.commands, (std::vector<ActuationCommand>{{SelectChannel{0}, 0ms}, {TriggerPulse{300ms}, 0ms}}));
  EXPECT_FALSE(out.dropped);
  EXPECT_EQ(out.state.busy_until, 600ms);
}

TEST(ReceiverFeed, TwoDotsSerialized) {
  const auto out = receiver_feed({}, 'b', 0ms);
  EXPECT_EQ(out.commands, (std::vector<ActuationCommand>{{SelectChannel{0}, 0ms},
                                                         {TriggerPulse{300ms}, 0ms},
                                                         {SelectChannel{1}, 600ms},
                                                         {TriggerPulse{300ms}, 600ms}}));
  const auto oracle = schedule_char(encode_char('b'), TimingConfig::with_gap(0ms));
  EXPECT_EQ(pulses_of(out.commands), oracle.events);
}

TEST(ReceiverFeed, ConfigFrameSetsDotOn) {
  ReceiverState state;
  for (std::uint8_t b : {0x1B, 0x01, 0x00, 0xC8}) {
    auto out = receiver_feed(std::move(state), b, 0ms);
    EXPECT_TRUE(out.commands.empty());
    EXPECT_FALSE(out.dropped);
    state = std::move(out.state);
  }
  EXPECT_EQ(state.timing.dot_on, 200ms);
  EXPECT_TRUE(std::holds_alternative<Idle>(state.mode));
  const auto out = receiver_feed(state, 'a', 0ms);
  EXPECT_EQ(std::get<TriggerPulse>(out.commands[1].op).duration, 200ms);
}

TEST(ReceiverFeed, ConfigIdempotent) {
  BandReceiver once;
  BandReceiver twice;
  const std::vector<TimedByte> frame{{0ms, 0x1B}, {0ms, 0x02}, {0ms, 0x01}, {0ms, 0x00}};
  once.feed(frame);
  twice.feed(frame);
  twice.feed(frame);
  EXPECT_EQ(once.state(), twice.state());
  EXPECT_EQ(once.state().timing.dot_off, 256ms);
}

TEST(ReceiverFeed, MinCharGapDelaysNextCharacter) {
  BandReceiver rx;
  rx.feed(std::vector<TimedByte>{{0ms, 0x1B}, {0ms, 0x03}, {0ms, 0x03}, {0ms, 0xE8}, {0ms, 'a'}, {600ms, 'a'}});
  const auto pulses = pulses_of(rx.commands());
  ASSERT_EQ(pulses.size(), 2U);
  EXPECT_EQ(pulses[1].start, 1600ms);
}

TEST(ReceiverFeed, QueuesWhileBusyInFifoOrder) {
  BandReceiver rx;
  rx.feed(std::vector<TimedByte>{{0ms, 'q'}, {100ms, 'a'}, {200ms, 'b'}});
  const auto& pending = rx.state().pending;
  ASSERT_EQ(pending.size(), 2U);
  EXPECT_EQ(pending[0], (PendingChar{'a', 3000ms}));
  EXPECT_EQ(pending[1], (PendingChar{'b', 3600ms}));
  const auto pulses = pulses_of(rx.commands());
  for (std::size_t i = 1; i < pulses.size(); ++i) EXPECT_GE(pulses[i].start, pulses[i - 1].start + pulses[i - 1].duration);
  rx.feed(TimedByte{3600ms, ' '});
  EXPECT_TRUE(rx.state().pending.empty());
}

TEST(ReceiverFeed, UnknownBytesAreDroppedNotThrown) {
  BandReceiver rx;
  rx.feed(std::vector<TimedByte>{{0ms, '!'}, {0ms, 0x1B}, {0ms, 0x09}, {0ms, 0}, {0ms, 1}, {5ms, 'a'}});
  ASSERT_EQ(rx.dropped().size(), 2U);
  EXPECT_EQ(rx.dropped()[0].byte, '!');
  EXPECT_EQ(rx.commands().size(), 2U);
}

TEST(ReceiverFeed, ZeroDotOnRejected) {
  BandReceiver rx;
  rx.feed(std::vector<TimedByte>{{0ms, 0x1B}, {0ms, 0x01}, {0ms, 0}, {0ms, 0}});
  EXPECT_EQ(rx.dropped().size(), 1U);
  EXPECT_EQ(rx.state().timing.dot_on, 300ms);
}

TEST(ReceiverFeed, SpaceEmitsNothing) {
  const auto out = receiver_feed({}, ' ', 50ms);
  EXPECT_TRUE(out.commands.empty());
  EXPECT_EQ(out.state.busy_until, 0ms);
}

TEST(LinkRoundtrip, Examples) {
  const auto cfg = TimingConfig::with_gap(1000ms);
  EXPECT_EQ(pulses_of(link_roundtrip("cat", cfg).commands), schedule_text(encode_text("cat"), cfg).events);
  const auto single = pulses_of(link_roundtrip("a", cfg).commands);
  EXPECT_EQ(single, (std::vector<VibrationEvent>{{1, 0ms, 300ms}}));
  EXPECT_EQ(link_roundtrip("ab ", cfg).commands, link_roundtrip("ab", cfg).commands);
}

TEST(LinkRoundtrip, EquivalentToScheduleForRandomInputs) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const auto text = oracle::random_text(rng, 12);
    TimingConfig cfg;
    cfg.dot_on = Millis{1 + static_cast<long long>(rng() % 600)};
    cfg.dot_off = Millis{1 + static_cast<long long>(rng() % 600)};
    cfg.char_gap = Millis{static_cast<long long>(rng() % 3000)};
    cfg.word_gap = cfg.char_gap + Millis{static_cast<long long>(rng() % 3000)};
    const auto trace = link_roundtrip(text, cfg);
    const auto schedule = schedule_text(encode_text(text), cfg);
    ASSERT_EQ(pulses_of(trace.commands), schedule.events) << text;
    ASSERT_EQ(trace.end_of_transmission, schedule.total_duration);
  }
}

TEST(LinkRoundtrip, ChunkingDoesNotMatter) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const auto text = oracle::random_text(rng, 10);
    const auto trace = link_roundtrip(text, TimingConfig::with_gap(Millis{static_cast<long long>(rng() % 1500)}));
    BandReceiver chunked;
    std::size_t pos = 0;
    while (pos < trace.bytes.size()) {
      const std::size_t n = std::min<std::size_t>(1 + rng() % 5, trace.bytes.size() - pos);
      chunked.feed(std::span<const TimedByte>(trace.bytes).subspan(pos, n));
      pos += n;
    }
    ASSERT_EQ(chunked.commands(), trace.commands);
  }
}

TEST(LinkRoundtrip, BusyUntilMonotone) {
  const auto trace = link_roundtrip("quick brown fox 42", TimingConfig::with_gap(0ms));
  ReceiverState state;
  Millis last{0};
  for (const auto& b : trace.bytes) {
    auto out = receiver_feed(std::move(state), b.byte, b.at);
    EXPECT_GE(out.state.busy_until, last);
    last = out.state.busy_until;
    state = std::move(out.state);
  }
}

TEST(PulsesOf, RejectsPulseWithoutSelect) {
  const std::vector<ActuationCommand> bad{{TriggerPulse{300ms}, 0ms}};
  EXPECT_THROW(pulses_of(bad), Error);
  const std::vector<ActuationCommand> late{{SelectChannel{0}, 0ms}, {TriggerPulse{300ms}, 5ms}};
  EXPECT_THROW(pulses_of(late), Error);
  const std::vector<ActuationCommand> doubled{{SelectChannel{0}, 0ms}, {SelectChannel{1}, 0ms}, {TriggerPulse{300ms}, 0ms}};
  EXPECT_THROW(pulses_of(doubled), Error);
}

TEST(Export, CommandsAndEmissions) {
  const auto trace = link_roundtrip("a", TimingConfig{});
  const auto j = nlohmann::json::parse(commands_to_json(trace.commands));
  EXPECT_EQ(j["commands"][0]["op"], "select");
  EXPECT_EQ(j["commands"][1]["duration_ms"], 300);
  VirtualClock clock;
  EXPECT_EQ(emissions_to_text(host_transmit("a", TimingConfig{}, clock)), "0 0x61 'a'\n");
}

}  // namespace
}  // namespace brailleband
