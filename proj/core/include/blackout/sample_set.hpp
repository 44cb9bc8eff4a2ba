#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "blackout/cascade.hpp"

namespace blackout {

inline constexpr int kSampleFormatVersion = 1;

/// Samples drawn under one network and baseline model. Sample i always
/// comes from substream i of master_seed.
struct SampleSet {
  std::string network_hash;
  std::string model_hash;
  std::uint64_t master_seed = 0;
  std::vector<CascadeSample> samples;

  std::size_t count() const { return samples.size(); }
  bool operator==(const SampleSet&) const = default;
};

/// Draws one sample from the given stream.
using SampleFn = std::function<CascadeSample(RandomStream&)>;

/// Samples for substreams [first, first + count), in index order. `workers`
/// threads split the range; 0 means hardware concurrency. The result does
/// not depend on the worker count.
std::vector<CascadeSample> draw_samples(const SampleFn& draw, std::uint64_t master_seed, std::uint64_t first,
                                        std::size_t count, unsigned workers = 1);

SampleSet generate_samples(const CascadeSimulator& sim, std::size_t n, std::uint64_t master_seed,
                           unsigned workers = 1);

/// Grows `set` to `target` samples by drawing the next substreams. Existing
/// samples are untouched; a target at or below the current count is a no-op.
/// Throws ValidationError if the set was drawn under another network or model.
void extend_samples(const CascadeSimulator& sim, SampleSet& set, std::size_t target, unsigned workers = 1);

nlohmann::json header_to_json(const SampleSet& set);

/// JSON lines: a header line, then one sample per line.
void write_samples(const SampleSet& set, std::ostream& out);
SampleSet read_samples(std::istream& in);

/// Writes through a temporary file renamed into place.
void save_samples(const SampleSet& set, const std::string& path);
SampleSet load_samples(const std::string& path);
/// Header only, without parsing the samples.
nlohmann::json load_sample_header(const std::string& path);

}  // namespace blackout
