#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmpath/geometry.hpp"
#include "swarmpath/robot.hpp"

namespace swarmpath {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Camera range, equal to the visibility bound used by the subgoal logic.
inline constexpr double kCameraRange = 1.00;
/// Reading returned by the light sensor when standing on the source.
inline constexpr double kLightSaturation = 1.0e12;

struct ArenaSpec {
  double width = 8.0;
  double height = 4.0;
  std::vector<Rect> obstacles;
  Disk nest{{1.0, 2.0}, 0.25};
  Disk goal{{7.0, 2.0}, 0.25};
  double reference_intensity = 1.0;
  std::string name;

  Vec2 light_source() const { return nest.center; }
  Rect bounds() const { return {{0.0, 0.0}, {width, height}}; }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

ArenaSpec load_arena(const std::filesystem::path& path);
ArenaSpec parse_arena(const std::string& json_text);
std::string arena_to_json(const ArenaSpec& arena);

struct Blob {
  SignalColor color = SignalColor::Black;
  double range = 0.0;
  double bearing = 0.0;  // observer body frame, (-pi, pi]
  std::int32_t source_id = kNoSource;
};

struct VisibilityResult {
  bool visible = false;
  double range = 0.0;
  bool occluded_by_obstacle = false;
  bool out_of_range = false;
};

/// One proximity sensor reading: bearing in body frame, value in [0, 1].
struct ProximityReading {
  double bearing = 0.0;
  double value = 0.0;
};

struct ProximityRing {
  static constexpr int kSensorCount = 24;
  static constexpr double kRange = 0.10;
};

/// True iff the open segment (p1, p2) passes through the interior of an obstacle.
bool segment_intersects_obstacle(Vec2 p1, Vec2 p2, const ArenaSpec& arena);

VisibilityResult line_of_sight(Vec2 observer, Vec2 target, const ArenaSpec& arena,
                               double max_range);

/// Light intensity (I/x)^2 at pos; saturates at kLightSaturation on the source.
double light_reading(Vec2 pos, const ArenaSpec& arena,
                     double saturation = kLightSaturation);

/// Unit vector up the light gradient (toward the nest); zero at the nest center.
Vec2 nest_potential_vector(Vec2 pos, const ArenaSpec& arena);

/// Negated proximity-weighted sum of unit vectors at the reading bearings.
Vec2 diffusion_vector(std::span<const ProximityReading> readings);

/// Blobs for every lit robot and both landmarks in line of sight, sorted by
/// (range, source id). The observer itself is skipped, as are robots whose LED
/// is off (black).
std::vector<Blob> detect_blobs(const Robot& observer, std::span<const Robot> robots,
                               const ArenaSpec& arena, double max_range = kCameraRange);
std::vector<Blob> detect_blobs(const Robot& observer, std::span<const Robot* const> candidates,
                               const ArenaSpec& arena, double max_range = kCameraRange);

/// Readings of the 24-sensor ring against walls, obstacles and other robots.
std::vector<ProximityReading> sense_proximity(const Pose& pose, double body_radius,
                                              std::span<const Robot> robots,
                                              std::int32_t self_id,
                                              const ArenaSpec& arena);
std::vector<ProximityReading> sense_proximity(const Pose& pose, double body_radius,
                                              std::span<const Robot* const> candidates,
                                              std::int32_t self_id,
                                              const ArenaSpec& arena);

}  // namespace swarmpath
