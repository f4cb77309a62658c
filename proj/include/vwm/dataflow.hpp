#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vwm/rng.hpp"
#include "vwm/synthworld.hpp"

namespace vwm::dataflow {

struct ClipRecord {
  uint64_t clip_id = 0;
  std::string source_id;                 // child / camera identity
  std::optional<double> timestamp_sec;   // recording-time position
  int frame_count = 0;
  double frame_rate = 30.0;
  uint64_t scene_seed = 0;  // the synthetic scene standing in for the clip's video
};

enum class ShuffleMode { GlobalShuffle, WindowShuffle };

struct CurriculumPolicy {
  ShuffleMode mode = ShuffleMode::GlobalShuffle;
  double window_sec = 300.0;  // 300, 1800, 86400 are the supported presets
  uint64_t seed = 0;
};

// Permutation of clip indices. Window shuffle keeps every clip inside its
// original time window; window indices are non-decreasing across the output.
std::vector<size_t> order_clips(const std::vector<ClipRecord>& clips,
                                const CurriculumPolicy& policy);

// Inclusive frame-gap range equivalent to 150-450 ms at the clip frame rate.
std::pair<int, int> gap_range_frames(double frame_rate);

struct SampledPair {
  synthworld::FramePair pair;
  synthworld::GroundTruth gt;
  int start_frame = 0;
  int gap_frames = 0;
};

struct PairSamplerConfig {
  int crop_side = 64;   // model input side; render side may be larger
  int render_side = 64;
};

// Draws (start, gap) for a clip, renders both frames from the clip's scene,
// and applies one crop rectangle to both frames and the ground truth.
SampledPair sample_pair(const ClipRecord& clip, const synthworld::WorldConfig& world,
                        const PairSamplerConfig& cfg, Rng& rng);

// Visits a fixed ordering exactly once (the online, single-epoch regime).
class SingleEpochIterator {
 public:
  SingleEpochIterator(std::vector<ClipRecord> clips, std::vector<size_t> order)
      : clips_(std::move(clips)), order_(std::move(order)) {}

  const ClipRecord* next() {
    if (cursor_ >= order_.size()) return nullptr;
    return &clips_[order_[cursor_++]];
  }
  bool exhausted() const { return cursor_ >= order_.size(); }
  void reset() { cursor_ = 0; }  // multi-epoch reuses the same ordering

 private:
  std::vector<ClipRecord> clips_;
  std::vector<size_t> order_;
  size_t cursor_ = 0;
};

std::string clip_to_json(const ClipRecord& clip);
ClipRecord clip_from_json(const std::string& line);
std::vector<ClipRecord> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ClipRecord>& clips);

}  // namespace vwm::dataflow
