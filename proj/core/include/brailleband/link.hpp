#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "brailleband/timing.hpp"

namespace brailleband {

// Wire format. Data frames are single ASCII bytes (letters, digits, space and
// '#' for the number indicator). Config frames are
//   0x1B, parameter id, value high byte, value low byte.
inline constexpr std::uint8_t kEscapeByte = 0x1B;

enum class ConfigParam : std::uint8_t {
  DotOn = 0x01,
  DotOff = 0x02,
  MinCharGap = 0x03,
};

struct DataFrame {
  std::uint8_t byte;
  friend bool operator==(const DataFrame&, const DataFrame&) = default;
};

struct ConfigFrame {
  ConfigParam param;
  std::uint16_t value;
  friend bool operator==(const ConfigFrame&, const ConfigFrame&) = default;
};

using LinkFrame = std::variant<DataFrame, ConfigFrame>;

/// Throws InvalidInput for data bytes that are not part of the alphabet.
std::vector<std::uint8_t> encode_frame(const LinkFrame& frame);

struct TimedByte {
  Millis at;
  std::uint8_t byte;
  friend bool operator==(const TimedByte&, const TimedByte&) = default;
};

/// Monotone virtual time shared by the host and band in one link pair.
class VirtualClock {
 public:
  explicit VirtualClock(Millis start = Millis{0}) : now_(start) {}
  Millis now() const noexcept { return now_; }
  /// Throws InvalidInput when asked to move backwards.
  void advance_to(Millis t);
  void advance_by(Millis dt) { advance_to(now_ + dt); }

 private:
  Millis now_;
};

struct HostOptions {
  // Prefix the transmission with config frames carrying dot_on and dot_off so
  // the band actuates with the host's timing.
  bool send_timing_preamble = false;
};

/// Phone side. Validates the whole text, then emits one byte per character,
/// each at the instant the previous character's window (d * dot_cycle +
/// char_gap, or word_gap before a space) elapses. The clock is left at the end
/// of the final window.
std::vector<TimedByte> host_transmit(std::string_view text, const TimingConfig& cfg,
                                     VirtualClock& clock, HostOptions options = {});

struct SelectChannel {
  int channel;  // 0..7; channels 0..5 drive dots 1..6
  friend bool operator==(const SelectChannel&, const SelectChannel&) = default;
};

struct TriggerPulse {
  Millis duration;
  friend bool operator==(const TriggerPulse&, const TriggerPulse&) = default;
};

struct ActuationCommand {
  std::variant<SelectChannel, TriggerPulse> op;
  Millis timestamp;
  friend bool operator==(const ActuationCommand&, const ActuationCommand&) = default;
};

inline constexpr int kMuxChannels = 8;
constexpr int channel_for_dot(int dot) noexcept { return dot - 1; }
constexpr int dot_for_channel(int channel) noexcept { return channel + 1; }

struct DeviceTiming {
  Millis dot_on{300};
  Millis dot_off{300};
  Millis min_char_gap{0};
  friend bool operator==(const DeviceTiming&, const DeviceTiming&) = default;
};

struct Idle {
  friend bool operator==(Idle, Idle) = default;
};
struct Escaped {
  friend bool operator==(Escaped, Escaped) = default;
};
struct EscapedParam {
  std::uint8_t id;
  friend bool operator==(EscapedParam, EscapedParam) = default;
};
struct EscapedValue {
  std::uint8_t id;
  std::uint8_t high;
  friend bool operator==(EscapedValue, EscapedValue) = default;
};

using ParserMode = std::variant<Idle, Escaped, EscapedParam, EscapedValue>;

struct PendingChar {
  char glyph;
  Millis starts_at;
  friend bool operator==(const PendingChar&, const PendingChar&) = default;
};

struct ReceiverState {
  ParserMode mode = Idle{};
  // Characters accepted but not yet started, FIFO.
  std::deque<PendingChar> pending;
  Millis busy_until{0};
  DeviceTiming timing;

  friend bool operator==(const ReceiverState&, const ReceiverState&) = default;
};

struct DroppedByte {
  std::uint8_t byte;
  Millis at;
  std::string reason;
  friend bool operator==(const DroppedByte&, const DroppedByte&) = default;
};

struct FeedOutcome {
  ReceiverState state;
  std::vector<ActuationCommand> commands;
  std::optional<DroppedByte> dropped;
};

/// Band side: one byte into the parser. Data bytes expand into
/// SelectChannel/TriggerPulse pairs starting at max(now, busy_until). Unknown
/// bytes and invalid config values are dropped and reported, never thrown.
FeedOutcome receiver_feed(ReceiverState state, std::uint8_t byte, Millis now);

/// Stateful convenience wrapper that accumulates commands and drop reports.
class BandReceiver {
 public:
  BandReceiver() = default;
  explicit BandReceiver(DeviceTiming timing) { state_.timing = timing; }

  void feed(std::span<const TimedByte> chunk);
  void feed(TimedByte b) { feed(std::span<const TimedByte>(&b, 1)); }

  const ReceiverState& state() const noexcept { return state_; }
  const std::vector<ActuationCommand>& commands() const noexcept { return commands_; }
  const std::vector<DroppedByte>& dropped() const noexcept { return dropped_; }

 private:
  ReceiverState state_;
  std::vector<ActuationCommand> commands_;
  std::vector<DroppedByte> dropped_;
};

struct LinkTrace {
  std::vector<TimedByte> bytes;
  std::vector<ActuationCommand> commands;
  Millis end_of_transmission{0};
};

/// host_transmit (with timing preamble) fed byte by byte into a fresh receiver.
LinkTrace link_roundtrip(std::string_view text, const TimingConfig& cfg);

/// Pulses as (node, start, duration) events, for comparison with schedules.
/// Throws MalformedCommandStream if a pulse has no preceding select.
std::vector<VibrationEvent> pulses_of(std::span<const ActuationCommand> commands);

std::string commands_to_json(std::span<const ActuationCommand> commands, int indent = -1);
std::string emissions_to_text(std::span<const TimedByte> bytes);

}  // namespace brailleband
