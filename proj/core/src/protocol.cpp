#include "stirap/protocol.hpp"

#include "stirap/units.hpp"

#include <stdexcept>

namespace stirap {

ProtocolSchedule::ProtocolSchedule(std::vector<Segment> segments, bool echo)
    : segments_(std::move(segments)), echo_(echo) {}

std::size_t ProtocolSchedule::loop_count() const {
  std::size_t n = 0;
  for (const Segment& s : segments_) n += std::holds_alternative<LoopSegment>(s) ? 1 : 0;
  return n;
}

double ProtocolSchedule::duration() const {
  double total = 0.0;
  for (const Segment& s : segments_) {
    if (const auto* loop = std::get_if<LoopSegment>(&s)) total += loop->schedule.duration();
    if (const auto* hold = std::get_if<HoldSegment>(&s)) total += hold->duration_ns;
  }
  return total;
}

Gate echo_pi_gate() { return Gate{GateKind::Pi, 0.0, kReferencePair}; }

Gate preparation_gate() { return Gate{GateKind::HalfPi, 0.5 * kPi, kReferencePair}; }

DensityMatrix prepared_reference_state() {
  return apply_instant_gate(DensityMatrix::basis(Level::Zero), preparation_gate());
}

ProtocolSchedule repeated_loops(const PulseSchedule& loop, int n, LoopSign sign) {
  if (n < 1) throw std::invalid_argument("loop count must be positive");
  const std::vector<SignedLoop> loops(static_cast<std::size_t>(n), SignedLoop{loop, sign});
  return compose(loops, false);
}

ProtocolSchedule echo_loops(const PulseSchedule& loop, int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("echo needs an even, positive loop count");
  std::vector<SignedLoop> loops;
  for (int i = 0; i < n; ++i) loops.push_back({loop, i < n / 2 ? LoopSign::Positive : LoopSign::Negative});
  return compose(loops, true);
}

ProtocolSchedule compose(std::span<const SignedLoop> loops, bool echo) {
  if (loops.empty()) throw std::invalid_argument("compose needs at least one loop");

  const auto oriented = [](const SignedLoop& l) {
    return LoopSegment{l.sign == LoopSign::Negative ? l.schedule.reversed() : l.schedule, l.sign};
  };

  std::vector<Segment> segments;
  if (!echo) {
    for (const SignedLoop& l : loops) segments.emplace_back(oriented(l));
    return ProtocolSchedule(std::move(segments), false);
  }

  if (loops.size() % 2 != 0) throw std::invalid_argument("echo needs an even number of loops");
  const std::size_t half = loops.size() / 2;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const LoopSign expected = i < half ? LoopSign::Positive : LoopSign::Negative;
    if (loops[i].sign != expected) {
      throw std::invalid_argument("echo needs positive loops before the pi pulse and negative loops after");
    }
    if (i == half) segments.emplace_back(GateSegment{echo_pi_gate()});
    segments.emplace_back(oriented(loops[i]));
  }
  return ProtocolSchedule(std::move(segments), true);
}

}  // namespace stirap
