#include "brailleband/link.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "brailleband/error.hpp"

namespace brailleband {

namespace {

bool is_data_byte(std::uint8_t b) {
  return (b >= 'a' && b <= 'z') || (b >= 'A' && b <= 'Z') || (b >= '0' && b <= '9') || b == ' ' ||
         b == static_cast<std::uint8_t>(kNumberIndicatorGlyph);
}

std::optional<BrailleCell> cell_for_byte(std::uint8_t b) {
  if (b == static_cast<std::uint8_t>(kNumberIndicatorGlyph)) {
    return CharacterMap::standard().number_indicator();
  }
  const char c = normalize(static_cast<char>(b));
  if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) return encode_char(c);
  return std::nullopt;
}

void append_config(std::vector<TimedByte>& out, Millis at, ConfigParam param, Millis value) {
  if (value.count() < 0 || value.count() > 0xFFFF) {
    throw Error(ErrorCode::InvalidConfig,
                fmt::format("{} ms does not fit a 16-bit config value", value.count()));
  }
  for (auto b : encode_frame(ConfigFrame{param, static_cast<std::uint16_t>(value.count())})) {
    out.push_back({at, b});
  }
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const LinkFrame& frame) {
  if (const auto* data = std::get_if<DataFrame>(&frame)) {
    if (!is_data_byte(data->byte)) {
      throw Error(ErrorCode::InvalidInput, fmt::format("0x{:02X} is not a data byte", data->byte));
    }
    return {data->byte};
  }
  const auto& cfg = std::get<ConfigFrame>(frame);
  return {kEscapeByte, static_cast<std::uint8_t>(cfg.param), static_cast<std::uint8_t>(cfg.value >> 8),
          static_cast<std::uint8_t>(cfg.value & 0xFF)};
}

void VirtualClock::advance_to(Millis t) {
  if (t < now_) {
    throw Error(ErrorCode::InvalidInput,
                fmt::format("clock cannot move back from {} to {} ms", now_.count(), t.count()));
  }
  now_ = t;
}

std::vector<TimedByte> host_transmit(std::string_view text, const TimingConfig& cfg,
                                     VirtualClock& clock, HostOptions options) {
  cfg.validate();
  const auto tokens = encode_text(text);  // validate before anything is sent
  std::vector<TimedByte> out;
  out.reserve(tokens.size() + 8);

  if (options.send_timing_preamble) {
    append_config(out, clock.now(), ConfigParam::DotOn, cfg.dot_on);
    append_config(out, clock.now(), ConfigParam::DotOff, cfg.dot_off);
  }

  bool after_char = false;
  for (const Token& token : tokens) {
    if (const auto* ct = std::get_if<CellToken>(&token)) {
      out.push_back({clock.now(), static_cast<std::uint8_t>(ct->source)});
      clock.advance_by(ct->cell.dot_count() * cfg.dot_cycle() + cfg.char_gap);
      after_char = true;
    } else {
      out.push_back({clock.now(), static_cast<std::uint8_t>(' ')});
      clock.advance_by(after_char ? cfg.word_gap - cfg.char_gap : cfg.word_gap);
      after_char = false;
    }
  }
  return out;
}

FeedOutcome receiver_feed(ReceiverState state, std::uint8_t byte, Millis now) {
  FeedOutcome out;
  while (!state.pending.empty() && state.pending.front().starts_at <= now) state.pending.pop_front();

  auto drop = [&](std::string reason) { out.dropped = DroppedByte{byte, now, std::move(reason)}; };

  if (std::holds_alternative<Escaped>(state.mode)) {
    state.mode = EscapedParam{byte};
  } else if (const auto* param = std::get_if<EscapedParam>(&state.mode)) {
    state.mode = EscapedValue{param->id, byte};
  } else if (const auto* value = std::get_if<EscapedValue>(&state.mode)) {
    const std::uint8_t id = value->id;
    const Millis v{(static_cast<int>(value->high) << 8) | byte};
    state.mode = Idle{};
    switch (id) {
      case static_cast<std::uint8_t>(ConfigParam::DotOn):
        if (v.count() == 0) drop("dot_on must be positive");
        else state.timing.dot_on = v;
        break;
      case static_cast<std::uint8_t>(ConfigParam::DotOff):
        if (v.count() == 0) drop("dot_off must be positive");
        else state.timing.dot_off = v;
        break;
      case static_cast<std::uint8_t>(ConfigParam::MinCharGap):
        state.timing.min_char_gap = v;
        break;
      default:
        drop(fmt::format("unknown config parameter 0x{:02X}", id));
    }
  } else if (byte == kEscapeByte) {
    state.mode = Escaped{};
  } else if (byte == ' ') {
    // Word pacing is the host's job.
  } else if (auto cell = cell_for_byte(byte)) {
    const Millis start = std::max(now, state.busy_until);
    const Millis cycle = state.timing.dot_on + state.timing.dot_off;
    Millis t = start;
    for (int dot : cell->dots()) {
      out.commands.push_back({SelectChannel{channel_for_dot(dot)}, t});
      out.commands.push_back({TriggerPulse{state.timing.dot_on}, t});
      t += cycle;
    }
    state.busy_until = t + state.timing.min_char_gap;
    if (start > now) state.pending.push_back({static_cast<char>(byte), start});
  } else {
    drop(fmt::format("unmapped data byte 0x{:02X}", byte));
  }
  out.state = std::move(state);
  return out;
}

void BandReceiver::feed(std::span<const TimedByte> chunk) {
  for (const auto& b : chunk) {
    auto outcome = receiver_feed(std::move(state_), b.byte, b.at);
    state_ = std::move(outcome.state);
    commands_.insert(commands_.end(), outcome.commands.begin(), outcome.commands.end());
    if (outcome.dropped) dropped_.push_back(std::move(*outcome.dropped));
  }
}

LinkTrace link_roundtrip(std::string_view text, const TimingConfig& cfg) {
  VirtualClock clock;
  LinkTrace trace;
  trace.bytes = host_transmit(text, cfg, clock, HostOptions{.send_timing_preamble = true});
  BandReceiver receiver;
  for (const auto& b : trace.bytes) receiver.feed(b);
  trace.commands = receiver.commands();
  trace.end_of_transmission = clock.now();
  return trace;
}

std::vector<VibrationEvent> pulses_of(std::span<const ActuationCommand> commands) {
  std::vector<VibrationEvent> out;
  std::optional<ActuationCommand> selected;
  for (const auto& cmd : commands) {
    if (const auto* sel = std::get_if<SelectChannel>(&cmd.op)) {
      if (selected) {
        throw Error(ErrorCode::MalformedCommandStream,
                    fmt::format("select at {} ms was never followed by a pulse", selected->timestamp.count()));
      }
      if (sel->channel < 0 || sel->channel >= kMuxChannels) {
        throw Error(ErrorCode::MalformedCommandStream, fmt::format("channel {} out of range", sel->channel));
      }
      selected = cmd;
      continue;
    }
    const auto& pulse = std::get<TriggerPulse>(cmd.op);
    if (!selected || selected->timestamp != cmd.timestamp) {
      throw Error(ErrorCode::MalformedCommandStream,
                  fmt::format("pulse at {} ms lacks a preceding select", cmd.timestamp.count()));
    }
    const int channel = std::get<SelectChannel>(selected->op).channel;
    out.push_back({dot_for_channel(channel), cmd.timestamp, pulse.duration});
    selected.reset();
  }
  return out;
}

std::string commands_to_json(std::span<const ActuationCommand> commands, int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& cmd : commands) {
    if (const auto* sel = std::get_if<SelectChannel>(&cmd.op)) {
      arr.push_back({{"op", "select"}, {"channel", sel->channel}, {"t_ms", cmd.timestamp.count()}});
    } else {
      arr.push_back({{"op", "pulse"},
                     {"duration_ms", std::get<TriggerPulse>(cmd.op).duration.count()},
                     {"t_ms", cmd.timestamp.count()}});
    }
  }
  return nlohmann::json{{"commands", arr}}.dump(indent);
}

std::string emissions_to_text(std::span<const TimedByte> bytes) {
  std::string out;
  for (const auto& b : bytes) {
    if (b.byte >= 0x20 && b.byte < 0x7F) {
      out += fmt::format("{} 0x{:02X} '{}'\n", b.at.count(), b.byte, static_cast<char>(b.byte));
    } else {
      out += fmt::format("{} 0x{:02X}\n", b.at.count(), b.byte);
    }
  }
  return out;
}

}  // namespace brailleband
