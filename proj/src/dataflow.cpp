#include "vwm/dataflow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vwm/errors.hpp"

namespace vwm::dataflow {

using nlohmann::json;

std::vector<size_t> order_clips(const std::vector<ClipRecord>& clips,
                                const CurriculumPolicy& policy) {
  std::vector<size_t> order(clips.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(hash_mix(policy.seed, 0x0cdecULL));

  if (policy.mode == ShuffleMode::GlobalShuffle) {
    rng.shuffle(order.data(), order.size());
    return order;
  }

  if (policy.window_sec <= 0) throw ConfigError("window_shuffle requires a positive window");
  for (const auto& c : clips) {
    if (!c.timestamp_sec) throw DataError("window_shuffle requires clip timestamps");
    if (*c.timestamp_sec < 0) throw DataError("clip timestamps must be non-negative");
  }

  auto window_of = [&](size_t i) {
    return static_cast<int64_t>(std::floor(*clips[i].timestamp_sec / policy.window_sec));
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return window_of(a) < window_of(b); });
  size_t start = 0;
  while (start < order.size()) {
    size_t end = start + 1;
    while (end < order.size() && window_of(order[end]) == window_of(order[start])) ++end;
    rng.shuffle(order.data() + start, end - start);
    start = end;
  }
  return order;
}

std::pair<int, int> gap_range_frames(double frame_rate) {
  if (frame_rate <= 0) throw ConfigError("frame rate must be positive");
  const int lo = static_cast<int>(std::lround(0.150 * frame_rate));
  const int hi = static_cast<int>(std::lround(0.450 * frame_rate));
  return {std::max(1, lo), std::max(1, hi)};
}

SampledPair sample_pair(const ClipRecord& clip, const synthworld::WorldConfig& world,
                        const PairSamplerConfig& cfg, Rng& rng) {
  const auto [gmin, gmax] = gap_range_frames(clip.frame_rate);
  if (clip.frame_count <= gmax)
    throw DataError("clip too short for the maximum frame gap");
  if (cfg.render_side < cfg.crop_side) throw ConfigError("render side smaller than crop side");

  const int gap = static_cast<int>(rng.uniform_int(gmin, gmax));
  const int start = static_cast<int>(rng.uniform_int(0, clip.frame_count - 1 - gap));

  synthworld::WorldConfig render_cfg = world;
  render_cfg.image_side = cfg.render_side;
  render_cfg.gap_min = 1;
  render_cfg.gap_max = std::max(gmax, render_cfg.gap_max);
  auto scene = synthworld::gen_scene(clip.scene_seed, render_cfg);
  auto [pair, gt] = synthworld::render_pair(synthworld::scene_at(scene, start), gap, render_cfg);

  // One crop rectangle, applied to both frames and the ground truth.
  const int max_off = cfg.render_side - cfg.crop_side;
  const int ox = max_off > 0 ? static_cast<int>(rng.uniform_int(0, max_off)) : 0;
  const int oy = max_off > 0 ? static_cast<int>(rng.uniform_int(0, max_off)) : 0;

  SampledPair out;
  out.start_frame = start;
  out.gap_frames = gap;
  out.pair.dt = gap;
  out.pair.f1 = Image(cfg.crop_side, cfg.crop_side);
  out.pair.f2 = Image(cfg.crop_side, cfg.crop_side);
  out.gt = synthworld::GroundTruth(cfg.crop_side, cfg.crop_side);
  for (int y = 0; y < cfg.crop_side; ++y) {
    for (int x = 0; x < cfg.crop_side; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.pair.f1.at(x, y, c) = pair.f1.at(x + ox, y + oy, c);
        out.pair.f2.at(x, y, c) = pair.f2.at(x + ox, y + oy, c);
      }
      const size_t src = gt.idx(x + ox, y + oy);
      const size_t dst = out.gt.idx(x, y);
      out.gt.flow.at(x, y) = gt.flow.at(x + ox, y + oy);
      out.gt.occluded[dst] = gt.occluded[src];
      out.gt.depth[dst] = gt.depth[src];
      out.gt.segments[dst] = gt.segments[src];
    }
  }
  return out;
}

std::string clip_to_json(const ClipRecord& clip) {
  json j;
  j["clip_id"] = clip.clip_id;
  j["source_id"] = clip.source_id;
  if (clip.timestamp_sec) j["timestamp_sec"] = *clip.timestamp_sec;
  j["frame_count"] = clip.frame_count;
  j["frame_rate"] = clip.frame_rate;
  j["scene_seed"] = clip.scene_seed;
  return j.dump();
}

ClipRecord clip_from_json(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw DataError("malformed clip record");
  try {
    ClipRecord c;
    c.clip_id = j.at("clip_id").get<uint64_t>();
    c.source_id = j.at("source_id").get<std::string>();
    if (j.contains("timestamp_sec")) c.timestamp_sec = j["timestamp_sec"].get<double>();
    c.frame_count = j.at("frame_count").get<int>();
    c.frame_rate = j.at("frame_rate").get<double>();
    c.scene_seed = j.at("scene_seed").get<uint64_t>();
    if (c.frame_count <= 0 || c.frame_rate <= 0) throw DataError("bad clip geometry");
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("clip record schema violation: ") + e.what());
  }
}

std::vector<ClipRecord> read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open manifest: " + path);
  std::vector<ClipRecord> clips;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    clips.push_back(clip_from_json(line));
  }
  return clips;
}

void write_manifest(const std::string& path, const std::vector<ClipRecord>& clips) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open manifest for write: " + path);
  for (const auto& c : clips) f << clip_to_json(c) << "\n";
}

}  // namespace vwm::dataflow
