#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "brailleband/link.hpp"

namespace brailleband {

enum class BandColumn { Left, Right };

/// One vibration node. Positions are on the unrolled forearm surface: `along`
/// runs wrist to elbow, `around` follows the circumference.
struct Node {
  int dot;   // 1..6
  int row;   // band 1..3
  BandColumn column;
  double along_mm;
  double around_mm;

  friend bool operator==(const Node&, const Node&) = default;
};

inline constexpr double kForearmTpdtMm = 40.0;

struct TpdtViolation {
  int dot_a;
  int dot_b;
  double distance_mm;

  friend bool operator==(const TpdtViolation&, const TpdtViolation&) = default;
};

class BandGeometry {
 public:
  /// Three bands 50 mm apart along the forearm, two columns 45 mm apart
  /// around it. Dots 1-3 in the left column, 4-6 in the right.
  static BandGeometry standard();

  /// Checks the dot/row/column bijection and the spacing threshold. Throws
  /// InvalidInput on either failure.
  static BandGeometry make(std::array<Node, 6> nodes, double tpdt_mm = kForearmTpdtMm);

  /// Checks only the bijection. For inspecting layouts that may violate
  /// spacing.
  static BandGeometry unchecked(std::array<Node, 6> nodes);

  const std::array<Node, 6>& nodes() const noexcept { return nodes_; }
  const Node& node_for_dot(int dot) const;
  BandGeometry scaled(double factor) const;

 private:
  explicit BandGeometry(std::array<Node, 6> nodes) : nodes_(nodes) {}
  std::array<Node, 6> nodes_;
};

double distance_mm(const Node& a, const Node& b) noexcept;

/// All node pairs closer than tpdt_mm, ordered by (dot_a, dot_b).
std::vector<TpdtViolation> validate_geometry(const BandGeometry& geometry,
                                             double tpdt_mm = kForearmTpdtMm);

struct Interval {
  Millis on;
  Millis off;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct MotorTimeline {
  std::array<std::vector<Interval>, 6> nodes;  // index = dot - 1
  // End of the observed window; at least the last off time.
  Millis horizon{0};

  const std::vector<Interval>& intervals(int dot) const { return nodes.at(static_cast<std::size_t>(dot - 1)); }

  friend bool operator==(const MotorTimeline&, const MotorTimeline&) = default;
};

/// Each pulse becomes an on/off interval on its node. Throws
/// MalformedCommandStream for a pulse without a select, an unused channel, or
/// any overlap with another pulse (single-actuation model). `horizon` extends
/// the makespan past the last pulse, e.g. to the end of the host's window.
MotorTimeline apply_commands(std::span<const ActuationCommand> commands, Millis horizon = Millis{0});

struct TimelineSummary {
  std::array<int, 6> pulse_counts{};
  Millis total_vibration{0};
  Millis makespan{0};

  friend bool operator==(const TimelineSummary&, const TimelineSummary&) = default;
};

TimelineSummary timeline_summary(const MotorTimeline& timeline);

/// Intervals flattened to (node, start, duration) sorted by start time.
std::vector<VibrationEvent> timeline_events(const MotorTimeline& timeline);

std::string timeline_to_text(const MotorTimeline& timeline);
std::string timeline_to_json(const MotorTimeline& timeline, int indent = -1);
MotorTimeline timeline_from_json(const std::string& text);

}  // namespace brailleband
