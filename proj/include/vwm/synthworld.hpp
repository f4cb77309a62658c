#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vwm/image.hpp"

namespace vwm::synthworld {

struct Vec2i {
  int x = 0;
  int y = 0;
  friend Vec2i operator+(Vec2i a, Vec2i b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2i operator-(Vec2i a, Vec2i b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2i operator*(Vec2i a, int k) { return {a.x * k, a.y * k}; }
  bool operator==(const Vec2i&) const = default;
};

enum class Shape : int { Disc = 0, Square = 1, Diamond = 2, Triangle = 3 };

struct SpriteState {
  Shape shape = Shape::Disc;
  uint64_t texture_seed = 0;
  Vec2i pos;       // sprite center, world coordinates, px
  Vec2i vel;       // px per tick, integer so ground truth warps are exact
  double depth = 1.0;  // smaller = nearer; strictly distinct across sprites
  int size = 8;        // radius-like extent, px
  bool is_hand = false;
};

struct CameraState {
  Vec2i vel;          // px per tick
  double zoom = 1.0;  // only 1.0 is renderable; kept for config round-trips
};

struct WorldScene {
  uint64_t seed = 0;
  std::vector<SpriteState> sprites;
  CameraState camera;
  uint64_t background_seed = 0;
  int image_side = 64;
};

struct WorldConfig {
  int image_side = 64;
  int patch_side = 8;  // image_side must be divisible by this
  int min_sprites = 1;
  int max_sprites = 3;
  int min_size = 14;
  int max_size = 26;
  int max_speed = 2;          // per-axis |velocity| bound, px/tick
  double camera_prob = 0.5;   // probability the camera translates
  int max_camera_speed = 2;
  double hand_prob = 0.3;     // probability the scene contains the hand
                              // sprite attached to one object (they share
                              // velocity, the world's contact dynamics)
  double static_prob = 0.1;   // probability everything is at rest
  double depth_min = 2.0;
  double depth_max = 10.0;
  double background_depth = 50.0;
  int gap_min = 5;   // render_pair dt range, ticks
  int gap_max = 14;
  double texture_noise = 0.5;  // sprite/background texture contrast in [0,1]
};

// Flow is f1->f2 displacement; occluded marks f1 pixels whose surface point
// is covered or out of frame in f2; segments are sprite ids with 0=background.
struct GroundTruth {
  int width = 0;
  int height = 0;
  FlowField flow;
  std::vector<uint8_t> occluded;
  std::vector<float> depth;
  std::vector<uint16_t> segments;

  GroundTruth() = default;
  GroundTruth(int w, int h)
      : width(w), height(h), flow(w, h),
        occluded(static_cast<size_t>(w) * h, 0),
        depth(static_cast<size_t>(w) * h, 0.f),
        segments(static_cast<size_t>(w) * h, 0) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

struct FramePair {
  Image f1;
  Image f2;
  int dt = 1;  // ticks between the frames
};

struct StereoPair {
  Image left;
  Image right;
  double baseline = 1.0;
};

enum class PhysicsCategory : int {
  Cohesion = 0,
  SupportTop = 1,
  SupportBottom = 2,
  ForceTransfer = 3,
  ForceSeparation = 4,
};

const char* to_string(PhysicsCategory c);
PhysicsCategory physics_category_from_string(const std::string& s);
inline constexpr int kPhysicsCategoryCount = 5;

struct ObjectMask {
  std::vector<uint8_t> context;  // width*height booleans
  std::vector<uint8_t> target;
  bool is_hand = false;
};

struct PhysicsEpisode {
  PhysicsCategory category = PhysicsCategory::Cohesion;
  uint64_t seed = 0;
  Image context;
  Image target;
  Vec2i hand_location;  // pixel inside the hand's rendered extent, target frame
  std::vector<ObjectMask> object_masks;
  WorldScene context_scene;  // sprite layout behind each frame
  WorldScene target_scene;
};

WorldScene gen_scene(uint64_t seed, const WorldConfig& config);

// Scene advanced by t ticks (positions moved, same seed material).
WorldScene scene_at(const WorldScene& scene, int t);

// Renders frames at ticks 0 and dt. Camera zoom must be 1.0.
std::pair<FramePair, GroundTruth> render_pair(const WorldScene& scene, int dt,
                                              const WorldConfig& config);

Image render_frame(const WorldScene& scene, int t);

// Per-pixel id of the visible sprite (0 = background) at tick t.
std::vector<uint16_t> render_owners(const WorldScene& scene, int t);

// Exact disparity in px for a surface at the given depth.
double exact_disparity(double baseline, double depth);

// The right eye shifts each surface left by round(exact_disparity(depth)).
// GroundTruth.flow holds the integer left->right flow; depth holds true depth.
std::pair<StereoPair, GroundTruth> render_stereo(const WorldScene& scene, double baseline,
                                                 const WorldConfig& config);

PhysicsEpisode gen_physics_episode(PhysicsCategory category, uint64_t seed,
                                   const WorldConfig& config);

// JSON-lines (de)serialization of scene records for manifests.
std::string scene_to_json(const WorldScene& scene);
WorldScene scene_from_json(const std::string& line);
std::string episode_record_json(const PhysicsEpisode& ep);

}  // namespace vwm::synthworld
