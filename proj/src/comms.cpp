#include "swarmpath/comms.hpp"

#include <algorithm>
#include <cmath>

namespace swarmpath {

ProtocolFrame encode_frame(std::uint32_t exploring_time_ticks, std::uint32_t robot_id,
                           FrameFlags flags) {
  if (exploring_time_ticks > 0xFFFF)
    throw EncodingError("exploring time " + std::to_string(exploring_time_ticks) +
                        " does not fit in two slots");
  if (robot_id > 0xFFFF)
    throw EncodingError("robot id " + std::to_string(robot_id) + " does not fit in two slots");
  ProtocolFrame f;
  f.data[0] = static_cast<std::uint8_t>(exploring_time_ticks / 256);
  f.data[1] = static_cast<std::uint8_t>(exploring_time_ticks % 256);
  f.data[5] = static_cast<std::uint8_t>(robot_id / 256);
  f.data[6] = static_cast<std::uint8_t>(robot_id % 256);
  f.data[7] = flags.terminate ? 1 : 0;
  f.data[8] = flags.ack ? 1 : 0;
  f.data[9] = flags.request ? 1 : 0;
  return f;
}

DecodedFrame decode_frame(const ProtocolFrame& f) {
  for (std::size_t i = 2; i <= 4; ++i)
    if (f.data[i] != 0)
      throw ProtocolError("reserved slot " + std::to_string(i) + " is " +
                          std::to_string(f.data[i]));
  for (std::size_t i = 7; i <= 9; ++i)
    if (f.data[i] > 1)
      throw ProtocolError("flag slot " + std::to_string(i) + " is " + std::to_string(f.data[i]));
  DecodedFrame d;
  d.exploring_ticks = f.data[0] * 256u + f.data[1];
  d.robot_id = f.data[5] * 256u + f.data[6];
  d.flags = {f.data[7] == 1, f.data[8] == 1, f.data[9] == 1};
  return d;
}

ProtocolFrame make_unicast(ProtocolFrame f, std::int32_t target) {
  f.mode = FrameMode::Unicast;
  f.unicast_target = target;
  return f;
}

std::string frame_hex(const ProtocolFrame& f) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(2 * ProtocolFrame::kSize);
  for (std::uint8_t b : f.data) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

int required_robot_count(double speed, double exploring_seconds, double visual_range,
                         double delta) {
  if (!(visual_range > 0.0)) throw ParameterError("visual range must be > 0");
  if (!(speed > 0.0)) throw ParameterError("speed must be > 0");
  if (exploring_seconds < 0.0 || delta < 0.0)
    throw ParameterError("exploring time and delta must be >= 0");
  const double raw = speed * exploring_seconds / visual_range + delta;
  // Absorb representation noise so that e.g. 7.000000000001 stays 7.
  return static_cast<int>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

AllocationResult allocate_tasks(std::span<const std::int32_t> responses, int n) {
  AllocationResult r;
  r.n_required = std::max(n, 0);
  const std::size_t take = std::min<std::size_t>(r.n_required, responses.size());
  r.assigned_path.assign(responses.begin(), responses.begin() + take);
  r.assigned_rest.assign(responses.begin() + take, responses.end());
  r.shortfall = r.n_required - static_cast<int>(take);
  r.no_responders = responses.empty();
  return r;
}

AllocationResult run_allocation_round(const Robot& founder, std::span<const Robot> in_range,
                                      const AllocationParams& params) {
  const int n = params.required_for(founder.found_at_exploring_ticks);
  const ProtocolFrame request =
      encode_frame(founder.found_at_exploring_ticks, founder.id, {.request = true});

  // Tick 1: every willing robot decodes the request and unicasts an ack.
  std::vector<ProtocolFrame> acks;
  for (const Robot& r : in_range) {
    if (r.id == founder.id || r.state != RobotState::DecisionMaking) continue;
    const DecodedFrame req = decode_frame(request);
    if (!req.flags.request) continue;
    acks.push_back(make_unicast(
        encode_frame(static_cast<std::uint32_t>(r.exploring_ticks), r.id, {.ack = true}),
        static_cast<std::int32_t>(req.robot_id)));
  }

  // Tick 2: the founder reads acks in arrival order; same-tick ties go by id.
  std::vector<std::int32_t> order;
  for (const ProtocolFrame& f : acks) {
    const DecodedFrame d = decode_frame(f);
    if (d.flags.ack && f.unicast_target == founder.id)
      order.push_back(static_cast<std::int32_t>(d.robot_id));
  }
  std::sort(order.begin(), order.end());

  // Termination goes out once n acks are in; later acks are told to rest.
  return allocate_tasks(order, n);
}

}  // namespace swarmpath
