#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrnav {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double kForwardStepMeters = 0.25;
inline constexpr double kTurnStepRadians = kPi / 6.0;  // 30 degrees

/// Planar position and heading in world meters / radians, theta in [0, 2*pi).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose normalized() const;
  bool finite() const;
};

/// Wraps an angle into [0, 2*pi). Idempotent.
double normalize_angle(double a);

/// Wraps an angle into (-pi, pi].
double wrap_to_pi(double a);

enum class Action : std::uint8_t {
  MoveForward,
  TurnLeft,
  TurnRight,
  LookUp,
  LookDown,
  Stop,
};

std::string_view to_string(Action a);
std::optional<Action> action_from_string(std::string_view name);

inline constexpr std::int16_t kNoCategory = -1;

/// Fixed category registry shared by scenes, maps and the render palette.
int category_count();
std::optional<std::int16_t> category_id(std::string_view name);
std::string_view category_name(std::int16_t id);

/// One labeled 3D point of the global map. category is kNoCategory for
/// unlabeled geometry; robot is the id of the observer the point came from.
struct CloudPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::int16_t category = kNoCategory;
  std::int16_t robot = 0;
};

struct SemanticPointCloud {
  std::vector<CloudPoint> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

struct EpisodeConfig {
  std::string episode_id;
  std::string scene_id;
  std::string target_category;
  double start_x = 0.0;
  double start_y = 0.0;
  int robot_count = 2;
  int max_steps = 500;
  double success_radius_m = 0.1;
  int global_period = 25;   // local steps between global replans
  double map_side_m = 24.0; // side of the square exploration map

  void validate() const;  // throws Error{Validation}
};

}  // namespace mrnav
