#include "blackout/sample_set.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

#include "blackout/error.hpp"

namespace blackout {

std::vector<CascadeSample> draw_samples(const SampleFn& draw, std::uint64_t master_seed, std::uint64_t first,
                                        std::size_t count, unsigned workers) {
  std::vector<CascadeSample> out(count);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(master_seed, first + i);
      out[i] = draw(rng);
    }
  };
  if (workers <= 1) {
    run(0, count);
    return out;
  }

  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk), end = std::min(count, begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      try {
        run(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

SampleSet generate_samples(const CascadeSimulator& sim, std::size_t n, std::uint64_t master_seed, unsigned workers) {
  if (n < 1) throw ValidationError("sample count must be >= 1");
  SampleSet set;
  set.network_hash = sim.network_hash();
  set.model_hash = sim.model_hash();
  set.master_seed = master_seed;
  set.samples = draw_samples([&sim](RandomStream& rng) { return sim.simulate(rng); }, master_seed, 0, n, workers);
  return set;
}

void extend_samples(const CascadeSimulator& sim, SampleSet& set, std::size_t target, unsigned workers) {
  if (set.network_hash != sim.network_hash() || set.model_hash != sim.model_hash())
    throw ValidationError("sample set was drawn under a different network or failure model");
  if (target <= set.count()) return;
  auto more = draw_samples([&sim](RandomStream& rng) { return sim.simulate(rng); }, set.master_seed, set.count(),
                           target - set.count(), workers);
  set.samples.insert(set.samples.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

nlohmann::json header_to_json(const SampleSet& set) {
  return {{"format_version", kSampleFormatVersion},
          {"network_hash", set.network_hash},
          {"model_hash", set.model_hash},
          {"master_seed", set.master_seed},
          {"count", set.count()}};
}

void write_samples(const SampleSet& set, std::ostream& out) {
  out << header_to_json(set).dump() << '\n';
  for (const auto& s : set.samples) out << sample_to_json(s).dump() << '\n';
}

namespace {

nlohmann::json parse_line(const std::string& line, std::size_t lineno) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("samples", lineno, e.byte, e.what());
  }
}

void check_header(const nlohmann::json& h) {
  if (!h.is_object()) throw SchemaError("$header", "expected an object");
  for (const char* key : {"format_version", "network_hash", "model_hash", "master_seed", "count"})
    if (!h.contains(key)) throw SchemaError(std::string("$header.") + key, "missing required field");
  if (h["format_version"] != kSampleFormatVersion)
    throw SchemaError("$header.format_version", "unsupported sample format version " + h["format_version"].dump());
}

}  // namespace

SampleSet read_samples(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("samples", 1, 1, "missing header line");
  const auto header = parse_line(line, 1);
  check_header(header);
  SampleSet set;
  try {
    set.network_hash = header["network_hash"].get<std::string>();
    set.model_hash = header["model_hash"].get<std::string>();
    set.master_seed = header["master_seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("$header", e.what());
  }
  const auto count = header["count"].get<std::size_t>();
  set.samples.reserve(count);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    set.samples.push_back(sample_from_json(parse_line(line, lineno), "$[" + std::to_string(lineno - 2) + "]"));
  }
  if (set.samples.size() != count)
    throw SchemaError("$header.count", "header announces " + std::to_string(count) + " samples, file holds " +
                                            std::to_string(set.samples.size()));
  for (std::size_t i = 0; i < set.samples.size(); ++i)
    if (set.samples[i].substream != i)
      throw SchemaError("$[" + std::to_string(i) + "].substream", "samples must be stored in substream order");
  return set;
}

void save_samples(const SampleSet& set, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    write_samples(set, out);
    if (!out.flush()) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

SampleSet load_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_samples(in);
}

nlohmann::json load_sample_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("samples", 1, 1, "missing header line");
  auto header = parse_line(line, 1);
  check_header(header);
  return header;
}

}  // namespace blackout
