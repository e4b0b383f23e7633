#include "brailleband/emulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "brailleband/error.hpp"
#include "brailleband/json_io.hpp"

namespace brailleband {

namespace {

constexpr double kRowPitchMm = 50.0;
constexpr double kColumnPitchMm = 45.0;

void check_bijection(const std::array<Node, 6>& nodes) {
  std::array<bool, 6> seen_dot{};
  std::array<bool, 6> seen_slot{};
  for (const auto& n : nodes) {
    if (n.dot < 1 || n.dot > 6 || n.row < 1 || n.row > 3) {
      throw Error(ErrorCode::InvalidInput, fmt::format("node dot {} row {} out of range", n.dot, n.row));
    }
    const auto slot = static_cast<std::size_t>((n.row - 1) * 2 + (n.column == BandColumn::Left ? 0 : 1));
    if (seen_dot[static_cast<std::size_t>(n.dot - 1)] || seen_slot[slot]) {
      throw Error(ErrorCode::InvalidInput,
                  fmt::format("dot {} or its (row, column) slot is assigned twice", n.dot));
    }
    seen_dot[static_cast<std::size_t>(n.dot - 1)] = true;
    seen_slot[slot] = true;
  }
}

}  // namespace

BandGeometry BandGeometry::standard() {
  std::array<Node, 6> nodes{};
  for (int dot = 1; dot <= 6; ++dot) {
    const int row = (dot - 1) % 3 + 1;
    const bool left = dot <= 3;
    nodes[static_cast<std::size_t>(dot - 1)] = Node{dot, row, left ? BandColumn::Left : BandColumn::Right,
                                                    (row - 1) * kRowPitchMm, left ? 0.0 : kColumnPitchMm};
  }
  return make(nodes);
}

BandGeometry BandGeometry::make(std::array<Node, 6> nodes, double tpdt_mm) {
  auto g = unchecked(nodes);
  const auto violations = validate_geometry(g, tpdt_mm);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::InvalidInput,
                fmt::format("{} node pair(s) closer than {} mm; dots {} and {} are {:.1f} mm apart",
                            violations.size(), tpdt_mm, v.dot_a, v.dot_b, v.distance_mm));
  }
  return g;
}

BandGeometry BandGeometry::unchecked(std::array<Node, 6> nodes) {
  check_bijection(nodes);
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.dot < b.dot; });
  return BandGeometry(nodes);
}

const Node& BandGeometry::node_for_dot(int dot) const {
  if (dot < 1 || dot > 6) throw Error(ErrorCode::InvalidInput, fmt::format("no node for dot {}", dot));
  return nodes_[static_cast<std::size_t>(dot - 1)];
}

BandGeometry BandGeometry::scaled(double factor) const {
  auto nodes = nodes_;
  for (auto& n : nodes) {
    n.along_mm *= factor;
    n.around_mm *= factor;
  }
  return BandGeometry(nodes);
}

double distance_mm(const Node& a, const Node& b) noexcept {
  return std::hypot(a.along_mm - b.along_mm, a.around_mm - b.around_mm);
}

std::vector<TpdtViolation> validate_geometry(const BandGeometry& geometry, double tpdt_mm) {
  std::vector<TpdtViolation> out;
  const auto& nodes = geometry.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double d = distance_mm(nodes[i], nodes[j]);
      if (d < tpdt_mm) out.push_back({nodes[i].dot, nodes[j].dot, d});
    }
  }
  return out;
}

MotorTimeline apply_commands(std::span<const ActuationCommand> commands, Millis horizon) {
  const auto pulses = pulses_of(commands);
  MotorTimeline timeline;
  Millis busy_until{0};
  bool first = true;
  for (const auto& p : pulses) {
    if (p.node < 1 || p.node > 6) {
      throw Error(ErrorCode::MalformedCommandStream,
                  fmt::format("pulse at {} ms targets unused channel {}", p.start.count(), p.node - 1));
    }
    if (!first && p.start < busy_until) {
      throw Error(ErrorCode::MalformedCommandStream,
                  fmt::format("pulse at {} ms overlaps a pulse running until {} ms", p.start.count(),
                              busy_until.count()));
    }
    timeline.nodes[static_cast<std::size_t>(p.node - 1)].push_back({p.start, p.start + p.duration});
    busy_until = p.start + p.duration;
    first = false;
  }
  timeline.horizon = std::max(horizon, busy_until);
  return timeline;
}

TimelineSummary timeline_summary(const MotorTimeline& timeline) {
  TimelineSummary s;
  for (std::size_t i = 0; i < timeline.nodes.size(); ++i) {
    s.pulse_counts[i] = static_cast<int>(timeline.nodes[i].size());
    for (const auto& iv : timeline.nodes[i]) {
      s.total_vibration += iv.off - iv.on;
      s.makespan = std::max(s.makespan, iv.off);
    }
  }
  s.makespan = std::max(s.makespan, timeline.horizon);
  return s;
}

std::vector<VibrationEvent> timeline_events(const MotorTimeline& timeline) {
  std::vector<VibrationEvent> out;
  for (std::size_t i = 0; i < timeline.nodes.size(); ++i) {
    for (const auto& iv : timeline.nodes[i]) out.push_back({static_cast<int>(i) + 1, iv.on, iv.off - iv.on});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const VibrationEvent& a, const VibrationEvent& b) { return a.start < b.start; });
  return out;
}

std::string timeline_to_text(const MotorTimeline& timeline) {
  std::string out;
  for (const auto& e : timeline_events(timeline)) {
    out += fmt::format("node {} on {} off {}\n", e.node, e.start.count(), (e.start + e.duration).count());
  }
  const auto s = timeline_summary(timeline);
  out += fmt::format("counts {}\n", fmt::join(s.pulse_counts, ","));
  out += fmt::format("vibration {} makespan {}\n", s.total_vibration.count(), s.makespan.count());
  return out;
}

std::string timeline_to_json(const MotorTimeline& timeline, int indent) {
  return nlohmann::json(timeline).dump(indent);
}

MotorTimeline timeline_from_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<MotorTimeline>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, fmt::format("malformed timeline: {}", e.what()));
  }
}

void to_json(nlohmann::json& j, const MotorTimeline& t) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& e : timeline_events(t)) {
    intervals.push_back({{"node", e.node}, {"on_ms", e.start.count()}, {"off_ms", (e.start + e.duration).count()}});
  }
  j = nlohmann::json{{"intervals", intervals}, {"horizon_ms", t.horizon.count()}, {"summary", timeline_summary(t)}};
}

void from_json(const nlohmann::json& j, MotorTimeline& t) {
  t = MotorTimeline{};
  for (const auto& iv : j.at("intervals")) {
    const int node = iv.at("node").get<int>();
    if (node < 1 || node > 6) throw Error(ErrorCode::InvalidInput, fmt::format("timeline node {} out of range", node));
    t.nodes[static_cast<std::size_t>(node - 1)].push_back(
        {Millis{iv.at("on_ms").get<long long>()}, Millis{iv.at("off_ms").get<long long>()}});
  }
  t.horizon = Millis{j.at("horizon_ms").get<long long>()};
}

void to_json(nlohmann::json& j, const TimelineSummary& s) {
  j = nlohmann::json{{"pulse_counts", s.pulse_counts},
                     {"total_vibration_ms", s.total_vibration.count()},
                     {"makespan_ms", s.makespan.count()}};
}

}  // namespace brailleband
