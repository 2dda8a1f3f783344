#include "mrnav/types.hpp"

#include <array>
#include <cmath>

#include "mrnav/error.hpp"

namespace mrnav {

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod can land exactly on 2*pi
  return r;
}

double wrap_to_pi(double a) {
  double r = normalize_angle(a);
  if (r > kPi) r -= kTwoPi;
  return r;
}

Pose Pose::normalized() const { return Pose{x, y, normalize_angle(theta)}; }

bool Pose::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta);
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::MoveForward: return "move_forward";
    case Action::TurnLeft: return "turn_left";
    case Action::TurnRight: return "turn_right";
    case Action::LookUp: return "look_up";
    case Action::LookDown: return "look_down";
    case Action::Stop: return "stop";
  }
  return "unknown";
}

std::optional<Action> action_from_string(std::string_view name) {
  for (auto a : {Action::MoveForward, Action::TurnLeft, Action::TurnRight,
                 Action::LookUp, Action::LookDown, Action::Stop}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

namespace {
constexpr std::array<std::string_view, 12> kCategories = {
    "chair", "sofa", "plant", "bed", "toilet", "tv",
    "table", "sink", "cabinet", "refrigerator", "lamp", "person",
};
}  // namespace

int category_count() { return static_cast<int>(kCategories.size()); }

std::optional<std::int16_t> category_id(std::string_view name) {
  for (std::size_t i = 0; i < kCategories.size(); ++i) {
    if (kCategories[i] == name) return static_cast<std::int16_t>(i);
  }
  return std::nullopt;
}

std::string_view category_name(std::int16_t id) {
  if (id < 0 || id >= static_cast<std::int16_t>(kCategories.size())) return "unlabeled";
  return kCategories[static_cast<std::size_t>(id)];
}

void EpisodeConfig::validate() const {
  if (robot_count < 1) throw Error(ErrorKind::Validation, "robot_count must be >= 1");
  if (max_steps < 1) throw Error(ErrorKind::Validation, "max_steps must be >= 1");
  if (!(success_radius_m > 0.0))
    throw Error(ErrorKind::Validation, "success_radius_m must be > 0");
  if (global_period < 1) throw Error(ErrorKind::Validation, "global_period must be >= 1");
  if (!(map_side_m > 0.0)) throw Error(ErrorKind::Validation, "map_side_m must be > 0");
  if (!category_id(target_category))
    throw Error(ErrorKind::Validation, "unknown target category: " + target_category);
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Extent: return "extent error";
    case ErrorKind::Index: return "index error";
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Ownership: return "ownership error";
    case ErrorKind::FrameMismatch: return "frame mismatch";
    case ErrorKind::InvalidPose: return "invalid pose";
    case ErrorKind::InvalidPoint: return "invalid point";
    case ErrorKind::InvalidSource: return "invalid source";
    case ErrorKind::Unreachable: return "unreachable";
    case ErrorKind::NoSpace: return "no explored space";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

}  // namespace mrnav
