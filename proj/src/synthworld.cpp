#include "vwm/synthworld.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "vwm/errors.hpp"
#include "vwm/rng.hpp"

namespace vwm::synthworld {

using nlohmann::json;

namespace {

constexpr double kDisparityScale = 16.0;  // disparity = baseline * scale / depth

double hash01(uint64_t seed, int x, int y) {
  uint64_t h = hash_mix(seed, static_cast<uint64_t>(static_cast<int64_t>(x)),
                        static_cast<uint64_t>(static_cast<int64_t>(y)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct Rgb {
  uint8_t r, g, b;
};

uint8_t clamp_u8(double v) { return static_cast<uint8_t>(std::clamp(v, 0.0, 255.0)); }

Rgb base_color(uint64_t seed, bool background) {
  uint64_t s = seed;
  auto chan = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53);
  };
  if (background) return {clamp_u8(chan(30, 110)), clamp_u8(chan(30, 110)), clamp_u8(chan(30, 110))};
  return {clamp_u8(chan(90, 230)), clamp_u8(chan(90, 230)), clamp_u8(chan(90, 230))};
}

Rgb textured(uint64_t seed, int x, int y, bool background, double noise_amp) {
  Rgb base = base_color(seed, background);
  double n = (hash01(seed, x, y) - 0.5) * 2.0 * 90.0 * noise_amp;
  return {clamp_u8(base.r + n), clamp_u8(base.g + n), clamp_u8(base.b + n)};
}

constexpr Rgb kHandColor = {235, 168, 112};

// Half-extent of a shape's bounding box, px.
int shape_extent(Shape shape, int size) {
  switch (shape) {
    case Shape::Square:
      return (size * 2) / 5;
    default:
      return size / 2;
  }
}

bool inside_shape(Shape shape, int lx, int ly, int size) {
  const int r = size / 2;
  switch (shape) {
    case Shape::Disc:
      return lx * lx + ly * ly <= r * r;
    case Shape::Square: {
      const int hs = (size * 2) / 5;
      return std::abs(lx) <= hs && std::abs(ly) <= hs;
    }
    case Shape::Diamond:
      return std::abs(lx) + std::abs(ly) <= r;
    case Shape::Triangle:
      return ly >= -r && ly <= r && 2 * std::abs(lx) <= ly + r;
  }
  return false;
}

void validate_config(const WorldConfig& c) {
  if (c.image_side <= 0 || c.patch_side <= 0 || c.image_side % c.patch_side != 0)
    throw ConfigError("image side must be positive and divisible by patch side");
  if (c.min_sprites < 1 || c.max_sprites > 5 || c.min_sprites > c.max_sprites)
    throw ConfigError("sprite count range must lie within [1,5]");
  if (c.min_size < 4 || c.min_size > c.max_size) throw ConfigError("bad sprite size range");
  if (c.gap_min < 1 || c.gap_min > c.gap_max) throw ConfigError("bad gap range");
  if (c.depth_min <= 0 || c.depth_min >= c.depth_max) throw ConfigError("bad depth range");
  if (c.camera_prob < 0 || c.camera_prob > 1 || c.hand_prob < 0 || c.hand_prob > 1 ||
      c.static_prob < 0 || c.static_prob > 1)
    throw ConfigError("probabilities must lie in [0,1]");
}

// Indices of sprites sorted far-to-near, the paint order.
std::vector<int> paint_order(const WorldScene& scene) {
  std::vector<int> order(scene.sprites.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return scene.sprites[a].depth > scene.sprites[b].depth;
  });
  return order;
}

}  // namespace

const char* to_string(PhysicsCategory c) {
  switch (c) {
    case PhysicsCategory::Cohesion: return "cohesion";
    case PhysicsCategory::SupportTop: return "support_top";
    case PhysicsCategory::SupportBottom: return "support_bottom";
    case PhysicsCategory::ForceTransfer: return "force_transfer";
    case PhysicsCategory::ForceSeparation: return "force_separation";
  }
  return "?";
}

PhysicsCategory physics_category_from_string(const std::string& s) {
  for (int i = 0; i < kPhysicsCategoryCount; ++i) {
    auto c = static_cast<PhysicsCategory>(i);
    if (s == to_string(c)) return c;
  }
  throw ConfigError("unknown physics category: " + s);
}

WorldScene gen_scene(uint64_t seed, const WorldConfig& config) {
  validate_config(config);
  Rng rng(hash_mix(seed, 0x5ce9e5eedULL));
  WorldScene scene;
  scene.seed = seed;
  scene.image_side = config.image_side;
  scene.background_seed = rng.next_u64();

  const bool is_static = rng.uniform() < config.static_prob;
  const bool has_hand = rng.uniform() < config.hand_prob;
  if (!is_static && rng.uniform() < config.camera_prob) {
    scene.camera.vel = {static_cast<int>(rng.uniform_int(-config.max_camera_speed, config.max_camera_speed)),
                        static_cast<int>(rng.uniform_int(-config.max_camera_speed, config.max_camera_speed))};
  }

  int count = static_cast<int>(rng.uniform_int(config.min_sprites, config.max_sprites));
  if (has_hand) count = std::min(count, 4);  // hand must fit under the 5-sprite cap

  for (int i = 0; i < count; ++i) {
    SpriteState s;
    s.shape = static_cast<Shape>(rng.uniform_int(0, 3));
    s.texture_seed = rng.next_u64();
    s.size = static_cast<int>(rng.uniform_int(config.min_size, config.max_size));
    const int margin = s.size / 2;
    s.pos = {static_cast<int>(rng.uniform_int(margin, config.image_side - 1 - margin)),
             static_cast<int>(rng.uniform_int(margin, config.image_side - 1 - margin))};
    if (!is_static) {
      s.vel = {static_cast<int>(rng.uniform_int(-config.max_speed, config.max_speed)),
               static_cast<int>(rng.uniform_int(-config.max_speed, config.max_speed))};
    }
    for (;;) {
      s.depth = rng.uniform(config.depth_min, config.depth_max);
      bool distinct = true;
      for (const auto& other : scene.sprites)
        if (other.depth == s.depth) distinct = false;
      if (distinct) break;
    }
    scene.sprites.push_back(s);
  }

  if (has_hand) {
    const int target = static_cast<int>(rng.next_below(scene.sprites.size()));
    SpriteState& obj = scene.sprites[target];
    SpriteState hand;
    hand.shape = Shape::Disc;
    hand.is_hand = true;
    hand.size = static_cast<int>(rng.uniform_int(10, 14));
    hand.texture_seed = 0;
    const int dir = static_cast<int>(rng.uniform_int(0, 3));
    const int dist = shape_extent(obj.shape, obj.size) + hand.size / 2 + 1;
    static constexpr Vec2i kDirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    hand.pos = obj.pos + kDirs[dir] * dist;
    // Contact dynamics: the hand drives the object it touches.
    if (!is_static) {
      hand.vel = {static_cast<int>(rng.uniform_int(-config.max_speed, config.max_speed)),
                  static_cast<int>(rng.uniform_int(-config.max_speed, config.max_speed))};
    }
    obj.vel = hand.vel;
    double nearest = config.depth_max;
    for (const auto& s : scene.sprites) nearest = std::min(nearest, s.depth);
    hand.depth = nearest * 0.5;
    scene.sprites.push_back(hand);
  }
  return scene;
}

WorldScene scene_at(const WorldScene& scene, int t) {
  WorldScene out = scene;
  for (auto& s : out.sprites) s.pos = s.pos + s.vel * t;
  return out;
}

Image render_frame(const WorldScene& scene, int t) {
  if (scene.camera.zoom != 1.0) throw ConfigError("camera zoom is not renderable");
  const int side = scene.image_side;
  Image im(side, side);
  const Vec2i cam = scene.camera.vel * t;
  const auto order = paint_order(scene);
  const double noise = 0.5;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int wx = x + cam.x, wy = y + cam.y;
      Rgb c = textured(scene.background_seed, wx, wy, true, noise);
      for (int idx : order) {
        const SpriteState& s = scene.sprites[idx];
        const Vec2i pos = s.pos + s.vel * t;
        const int lx = wx - pos.x, ly = wy - pos.y;
        if (inside_shape(s.shape, lx, ly, s.size)) {
          c = s.is_hand ? kHandColor : textured(s.texture_seed, lx, ly, false, noise);
        }
      }
      im.at(x, y, 0) = c.r;
      im.at(x, y, 1) = c.g;
      im.at(x, y, 2) = c.b;
    }
  }
  return im;
}

std::vector<uint16_t> render_owners(const WorldScene& scene, int t) {
  const int side = scene.image_side;
  std::vector<uint16_t> owners(static_cast<size_t>(side) * side, 0);
  const Vec2i cam = scene.camera.vel * t;
  const auto order = paint_order(scene);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int wx = x + cam.x, wy = y + cam.y;
      for (int idx : order) {
        const SpriteState& s = scene.sprites[idx];
        const Vec2i pos = s.pos + s.vel * t;
        if (inside_shape(s.shape, wx - pos.x, wy - pos.y, s.size))
          owners[static_cast<size_t>(y) * side + x] = static_cast<uint16_t>(idx + 1);
      }
    }
  }
  return owners;
}

std::pair<FramePair, GroundTruth> render_pair(const WorldScene& scene, int dt,
                                              const WorldConfig& config) {
  if (dt < config.gap_min || dt > config.gap_max)
    throw ConfigError("dt outside the configured gap range");
  const int side = scene.image_side;
  FramePair pair;
  pair.dt = dt;
  pair.f1 = render_frame(scene, 0);
  pair.f2 = render_frame(scene, dt);
  const auto owners1 = render_owners(scene, 0);
  const auto owners2 = render_owners(scene, dt);

  GroundTruth gt(side, side);
  const Vec2i cam_flow = scene.camera.vel * (-dt);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const size_t i = gt.idx(x, y);
      const uint16_t owner = owners1[i];
      Vec2i flow = cam_flow;
      double depth = config.background_depth;
      if (owner != 0) {
        const SpriteState& s = scene.sprites[owner - 1];
        flow = (s.vel - scene.camera.vel) * dt;
        depth = s.depth;
      }
      gt.flow.at(x, y) = {static_cast<float>(flow.x), static_cast<float>(flow.y)};
      gt.depth[i] = static_cast<float>(depth);
      gt.segments[i] = owner;
      const int tx = x + flow.x, ty = y + flow.y;
      bool occ = tx < 0 || tx >= side || ty < 0 || ty >= side;
      if (!occ) occ = owners2[gt.idx(tx, ty)] != owner;
      gt.occluded[i] = occ ? 1 : 0;
    }
  }
  return {std::move(pair), std::move(gt)};
}

double exact_disparity(double baseline, double depth) { return baseline * kDisparityScale / depth; }

std::pair<StereoPair, GroundTruth> render_stereo(const WorldScene& scene, double baseline,
                                                 const WorldConfig& config) {
  if (baseline <= 0) throw ConfigError("stereo baseline must be positive");
  if (scene.camera.zoom != 1.0) throw ConfigError("camera zoom is not renderable");
  const int side = scene.image_side;
  StereoPair pair;
  pair.baseline = baseline;
  pair.left = render_frame(scene, 0);

  const int bg_shift =
      static_cast<int>(std::lround(exact_disparity(baseline, config.background_depth)));
  std::vector<int> shifts(scene.sprites.size());
  for (size_t i = 0; i < scene.sprites.size(); ++i)
    shifts[i] = static_cast<int>(std::lround(exact_disparity(baseline, scene.sprites[i].depth)));

  // Right eye: every surface shifts left by its rounded disparity.
  WorldScene right = scene;
  right.camera.vel = {0, 0};
  for (size_t i = 0; i < right.sprites.size(); ++i) right.sprites[i].pos.x -= shifts[i];

  Image rim(side, side);
  const auto order = paint_order(right);
  const double noise = 0.5;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      Rgb c = textured(scene.background_seed, x + bg_shift, y, true, noise);
      for (int idx : order) {
        const SpriteState& s = right.sprites[idx];
        const int lx = x - s.pos.x, ly = y - s.pos.y;
        if (inside_shape(s.shape, lx, ly, s.size))
          c = s.is_hand ? kHandColor : textured(s.texture_seed, lx, ly, false, noise);
      }
      rim.at(x, y, 0) = c.r;
      rim.at(x, y, 1) = c.g;
      rim.at(x, y, 2) = c.b;
    }
  }
  pair.right = std::move(rim);

  WorldScene left = scene;
  left.camera.vel = {0, 0};
  const auto owners_l = render_owners(left, 0);
  const auto owners_r = render_owners(right, 0);
  GroundTruth gt(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const size_t i = gt.idx(x, y);
      const uint16_t owner = owners_l[i];
      const int shift = owner == 0 ? bg_shift : shifts[owner - 1];
      gt.flow.at(x, y) = {static_cast<float>(-shift), 0.f};
      gt.depth[i] =
          static_cast<float>(owner == 0 ? config.background_depth : scene.sprites[owner - 1].depth);
      gt.segments[i] = owner;
      const int tx = x - shift;
      bool occ = tx < 0 || tx >= side;
      if (!occ) occ = owners_r[gt.idx(tx, y)] != owner;
      gt.occluded[i] = occ ? 1 : 0;
    }
  }
  return {std::move(pair), std::move(gt)};
}

namespace {

std::vector<uint8_t> sprite_mask(const WorldScene& scene, int sprite_idx) {
  const int side = scene.image_side;
  std::vector<uint8_t> mask(static_cast<size_t>(side) * side, 0);
  const SpriteState& s = scene.sprites[sprite_idx];
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if (inside_shape(s.shape, x - s.pos.x, y - s.pos.y, s.size))
        mask[static_cast<size_t>(y) * side + x] = 1;
  return mask;
}

SpriteState make_object(Rng& rng, Shape shape, int size, Vec2i pos, double depth) {
  SpriteState s;
  s.shape = shape;
  s.size = size;
  s.pos = pos;
  s.depth = depth;
  s.texture_seed = rng.next_u64();
  return s;
}

}  // namespace

PhysicsEpisode gen_physics_episode(PhysicsCategory category, uint64_t seed,
                                   const WorldConfig& config) {
  validate_config(config);
  Rng rng(hash_mix(seed, static_cast<uint64_t>(category), 0x9e15ULL));
  const int side = config.image_side;

  PhysicsEpisode ep;
  ep.category = category;
  ep.seed = seed;

  WorldScene ctx;
  ctx.seed = seed;
  ctx.image_side = side;
  ctx.background_seed = rng.next_u64();

  const int hand_size = 12;
  const int hr = hand_size / 2;
  auto rand_sign = [&]() { return rng.uniform() < 0.5 ? -1 : 1; };

  // Sprite order: objects first, hand last (nearest).
  std::vector<Vec2i> deltas;  // per-sprite context->target displacement
  switch (category) {
    case PhysicsCategory::Cohesion: {
      const int size = static_cast<int>(rng.uniform_int(14, 18));
      const int r = size / 2;
      const Vec2i d{rand_sign() * static_cast<int>(rng.uniform_int(8, 10)),
                    static_cast<int>(rng.uniform_int(-3, 3))};
      const Vec2i pos{static_cast<int>(rng.uniform_int(r + hr * 2 + 12, side - 1 - r - hr * 2 - 12)),
                      static_cast<int>(rng.uniform_int(r + 8, side - 1 - r - 8))};
      auto obj = make_object(rng, Shape::Disc, size, pos, 4.0);
      SpriteState hand;
      hand.shape = Shape::Disc;
      hand.is_hand = true;
      hand.size = hand_size;
      hand.depth = 2.0;
      // Hand behind the motion: touches the trailing side.
      hand.pos = pos - Vec2i{(d.x > 0 ? 1 : -1) * (r + hr + 1), 0};
      ctx.sprites = {obj, hand};
      deltas = {d, d};
      break;
    }
    case PhysicsCategory::SupportTop:
    case PhysicsCategory::SupportBottom: {
      const int size_b = static_cast<int>(rng.uniform_int(14, 16));
      const int size_a = static_cast<int>(rng.uniform_int(12, 14));
      const int hb = (size_b * 2) / 5, ha = (size_a * 2) / 5;
      const bool pull = category == PhysicsCategory::SupportTop;
      const int dx = rand_sign() * (pull ? (ha + hb + 4) : static_cast<int>(rng.uniform_int(8, 10)));
      const int bx = static_cast<int>(
          rng.uniform_int(std::max(hb, ha) + std::abs(dx) + hr * 2 + 4,
                          side - 1 - std::max(hb, ha) - std::abs(dx) - hr * 2 - 4));
      const int by = static_cast<int>(rng.uniform_int(side / 2 + 4, side - 1 - hb - 2));
      auto bottom = make_object(rng, Shape::Square, size_b, {bx, by}, 5.0);
      auto top = make_object(rng, Shape::Square, size_a, {bx, by - hb - ha - 1}, 4.0);
      SpriteState hand;
      hand.shape = Shape::Disc;
      hand.is_hand = true;
      hand.size = hand_size;
      hand.depth = 2.0;
      hand.pos = Vec2i{bx - (dx > 0 ? 1 : -1) * (hb + hr + 1), by};
      ctx.sprites = {top, bottom, hand};
      if (pull) {
        deltas = {{0, hb + ha + 1}, {dx, 0}, {dx, 0}};  // support gone, top falls
      } else {
        deltas = {{dx, 0}, {dx, 0}, {dx, 0}};  // top rides along
      }
      break;
    }
    case PhysicsCategory::ForceTransfer: {
      const int size_a = static_cast<int>(rng.uniform_int(14, 16));
      const int size_b = static_cast<int>(rng.uniform_int(14, 16));
      const int ra = size_a / 2, rb = size_b / 2;
      const int dxm = static_cast<int>(rng.uniform_int(8, 10));
      const int sgn = rand_sign();
      const int ax = static_cast<int>(
          rng.uniform_int(ra + hr * 2 + dxm + 4, side - 1 - ra - rb * 2 - dxm - hr * 2 - 6));
      const int ay = static_cast<int>(rng.uniform_int(ra + 6, side - 1 - ra - 6));
      Vec2i apos{sgn > 0 ? ax : side - 1 - ax, ay};
      auto a = make_object(rng, Shape::Disc, size_a, apos, 4.0);
      auto b = make_object(rng, Shape::Disc, size_b, apos + Vec2i{sgn * (ra + rb + 1), 0}, 5.0);
      SpriteState hand;
      hand.shape = Shape::Disc;
      hand.is_hand = true;
      hand.size = hand_size;
      hand.depth = 2.0;
      hand.pos = apos - Vec2i{sgn * (ra + hr + 1), 0};
      ctx.sprites = {a, b, hand};
      const Vec2i d{sgn * dxm, 0};
      deltas = {d, d, d};
      break;
    }
    case PhysicsCategory::ForceSeparation: {
      const int size_a = static_cast<int>(rng.uniform_int(14, 16));
      const int size_b = static_cast<int>(rng.uniform_int(14, 16));
      const int ra = size_a / 2, rb = size_b / 2;
      const Vec2i d{rand_sign() * static_cast<int>(rng.uniform_int(8, 10)), 0};
      const int quarter = side / 4;
      Vec2i apos{quarter, static_cast<int>(rng.uniform_int(ra + hr + 8, side - 1 - ra - hr - 8))};
      Vec2i bpos{3 * quarter,
                 static_cast<int>(rng.uniform_int(rb + 4, side - 1 - rb - 4))};
      if (d.x > 0) apos.x -= 4;  // keep the moved pair clear of the bystander
      auto a = make_object(rng, Shape::Disc, size_a, apos, 4.0);
      auto b = make_object(rng, Shape::Disc, size_b, bpos, 5.0);
      SpriteState hand;
      hand.shape = Shape::Disc;
      hand.is_hand = true;
      hand.size = hand_size;
      hand.depth = 2.0;
      hand.pos = apos - Vec2i{(d.x > 0 ? 1 : -1) * (ra + hr + 1), 0};
      ctx.sprites = {a, b, hand};
      deltas = {d, {0, 0}, d};
      break;
    }
  }

  WorldScene tgt = ctx;
  for (size_t i = 0; i < tgt.sprites.size(); ++i) tgt.sprites[i].pos = tgt.sprites[i].pos + deltas[i];

  ep.context_scene = ctx;
  ep.target_scene = tgt;
  ep.context = render_frame(ctx, 0);
  ep.target = render_frame(tgt, 0);
  for (size_t i = 0; i < ctx.sprites.size(); ++i) {
    ObjectMask m;
    m.is_hand = ctx.sprites[i].is_hand;
    m.context = sprite_mask(ctx, static_cast<int>(i));
    m.target = sprite_mask(tgt, static_cast<int>(i));
    ep.object_masks.push_back(std::move(m));
  }
  for (const auto& s : tgt.sprites)
    if (s.is_hand) ep.hand_location = s.pos;
  return ep;
}

std::string scene_to_json(const WorldScene& scene) {
  json j;
  j["seed"] = scene.seed;
  j["image_side"] = scene.image_side;
  j["background_seed"] = scene.background_seed;
  j["camera"] = {{"vx", scene.camera.vel.x}, {"vy", scene.camera.vel.y}, {"zoom", scene.camera.zoom}};
  j["sprites"] = json::array();
  for (const auto& s : scene.sprites) {
    j["sprites"].push_back({{"shape", static_cast<int>(s.shape)},
                            {"texture_seed", s.texture_seed},
                            {"x", s.pos.x},
                            {"y", s.pos.y},
                            {"vx", s.vel.x},
                            {"vy", s.vel.y},
                            {"depth", s.depth},
                            {"size", s.size},
                            {"is_hand", s.is_hand}});
  }
  return j.dump();
}

WorldScene scene_from_json(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw DataError("malformed scene record");
  try {
    WorldScene scene;
    scene.seed = j.at("seed").get<uint64_t>();
    scene.image_side = j.at("image_side").get<int>();
    scene.background_seed = j.at("background_seed").get<uint64_t>();
    scene.camera.vel = {j.at("camera").at("vx").get<int>(), j.at("camera").at("vy").get<int>()};
    scene.camera.zoom = j.at("camera").at("zoom").get<double>();
    for (const auto& sj : j.at("sprites")) {
      SpriteState s;
      s.shape = static_cast<Shape>(sj.at("shape").get<int>());
      s.texture_seed = sj.at("texture_seed").get<uint64_t>();
      s.pos = {sj.at("x").get<int>(), sj.at("y").get<int>()};
      s.vel = {sj.at("vx").get<int>(), sj.at("vy").get<int>()};
      s.depth = sj.at("depth").get<double>();
      s.size = sj.at("size").get<int>();
      s.is_hand = sj.at("is_hand").get<bool>();
      scene.sprites.push_back(s);
    }
    return scene;
  } catch (const json::exception& e) {
    throw DataError(std::string("scene record schema violation: ") + e.what());
  }
}

std::string episode_record_json(const PhysicsEpisode& ep) {
  json j;
  j["category"] = to_string(ep.category);
  j["seed"] = ep.seed;
  j["hand_x"] = ep.hand_location.x;
  j["hand_y"] = ep.hand_location.y;
  j["objects"] = ep.object_masks.size();
  return j.dump();
}

}  // namespace vwm::synthworld
