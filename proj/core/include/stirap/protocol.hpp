#pragma once

#include "stirap/lambda_model.hpp"
#include "stirap/pulse.hpp"
#include "stirap/quantum.hpp"

#include <span>
#include <variant>
#include <vector>

namespace stirap {

/// A loop already oriented for traversal (negative loops are reversed).
struct LoopSegment {
  PulseSchedule schedule;
  LoopSign sign = LoopSign::Positive;
};

/// Instantaneous microwave gate.
struct GateSegment {
  Gate gate;
};

/// Constant optical drive (all-zero drive is an idle period).
struct HoldSegment {
  double duration_ns = 0.0;
  DriveSample drive;
};

using Segment = std::variant<LoopSegment, GateSegment, HoldSegment>;

struct SignedLoop {
  PulseSchedule schedule;
  LoopSign sign = LoopSign::Positive;
};

class ProtocolSchedule {
 public:
  ProtocolSchedule() = default;
  ProtocolSchedule(std::vector<Segment> segments, bool echo);

  const std::vector<Segment>& segments() const { return segments_; }
  bool echo() const { return echo_; }
  std::size_t loop_count() const;
  double duration() const;

 private:
  std::vector<Segment> segments_;
  bool echo_ = false;
};

/// Concatenates loops (negative loops traverse their schedule in reverse).
/// With echo, the loop list must split into a positive first half and a
/// negative second half of equal length; a pi pulse on (0_g, -1_g) is placed
/// between them. Throws std::invalid_argument otherwise or on an empty list.
ProtocolSchedule compose(std::span<const SignedLoop> loops, bool echo);

/// Microwave pi pulse used by the echo.
Gate echo_pi_gate();

/// pi/2 pulse taking |0_g> to (|0_g> + |-1_g>)/sqrt(2).
Gate preparation_gate();

/// (|0_g> + |-1_g>)/sqrt(2), the input state of phase measurements.
DensityMatrix prepared_reference_state();

/// n loops of the same sign.
ProtocolSchedule repeated_loops(const PulseSchedule& loop, int n, LoopSign sign);

/// n/2 positive loops, a pi pulse, n/2 negative loops. n must be even.
ProtocolSchedule echo_loops(const PulseSchedule& loop, int n);

}  // namespace stirap
