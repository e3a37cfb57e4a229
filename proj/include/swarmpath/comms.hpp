#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmpath/robot.hpp"

namespace swarmpath {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncodingError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FrameMode : std::uint8_t { Broadcast, Unicast };

/// Ten-byte range-and-bearing payload.
///
/// Slot layout (big-endian pairs):
///   [0..1] exploring time in ticks   [2..4] reserved, always 0
///   [5..6] sender robot id           [7] termination flag
///   [8] acknowledgment flag          [9] path-formation request flag
struct ProtocolFrame {
  static constexpr std::size_t kSize = 10;
  std::array<std::uint8_t, kSize> data{};
  FrameMode mode = FrameMode::Broadcast;
  std::int32_t unicast_target = kNoSource;

  bool operator==(const ProtocolFrame&) const = default;
};

struct FrameFlags {
  bool terminate = false;
  bool ack = false;
  bool request = false;
  bool operator==(const FrameFlags&) const = default;
};

struct DecodedFrame {
  std::uint32_t exploring_ticks = 0;
  std::uint32_t robot_id = 0;
  FrameFlags flags;
  bool operator==(const DecodedFrame&) const = default;
};

ProtocolFrame encode_frame(std::uint32_t exploring_time_ticks, std::uint32_t robot_id,
                           FrameFlags flags);
/// Inverse of encode_frame. Throws ProtocolError on reserved-slot or flag violations.
DecodedFrame decode_frame(const ProtocolFrame& frame);

ProtocolFrame make_unicast(ProtocolFrame f, std::int32_t target);

/// Lowercase hex of the ten payload bytes, used by trace exports.
std::string frame_hex(const ProtocolFrame& frame);

/// Robots needed to cover the estimated path: ceil(s * t / v + delta).
/// s in m/s, t in seconds, v (visual range) in meters.
int required_robot_count(double speed, double exploring_seconds, double visual_range,
                         double delta);

struct AllocationResult {
  int n_required = 0;
  std::vector<std::int32_t> assigned_path;
  std::vector<std::int32_t> assigned_rest;
  int shortfall = 0;
  bool no_responders = false;
};

/// First n responders (arrival order) form the path, the remainder rest.
AllocationResult allocate_tasks(std::span<const std::int32_t> responses, int n);

struct AllocationParams {
  double speed_mps = 0.1;
  double visual_range = 1.0;
  double delta = 2.0;
  double tick_seconds = 0.1;

  int required_for(std::uint32_t exploring_ticks) const {
    return required_robot_count(speed_mps, exploring_ticks * tick_seconds, visual_range, delta);
  }
};

/// Replays one request/ack/termination exchange between a founder standing at
/// the nest and the robots in its communication range. Robots in
/// DecisionMaking answer; all acknowledgments arrive on the same tick and are
/// ordered by id.
AllocationResult run_allocation_round(const Robot& founder, std::span<const Robot> in_range,
                                      const AllocationParams& params);

}  // namespace swarmpath
