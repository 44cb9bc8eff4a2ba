#include "blackout/risk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "blackout/error.hpp"

namespace blackout {

Strategy Strategy::sorted() const {
  Strategy s{maintained};
  std::sort(s.maintained.begin(), s.maintained.end());
  return s;
}

std::size_t RiskMatrices::position(int id) const {
  const auto it = std::lower_bound(component_ids.begin(), component_ids.end(), id);
  if (it == component_ids.end() || *it != id)
    throw ValidationError("unknown component id " + std::to_string(id));
  return static_cast<std::size_t>(it - component_ids.begin());
}

std::vector<std::size_t> RiskMatrices::positions(const Strategy& s) const {
  std::vector<std::size_t> rows;
  rows.reserve(s.size());
  for (int id : s.maintained) rows.push_back(position(id));
  std::sort(rows.begin(), rows.end());
  if (const auto dup = std::adjacent_find(rows.begin(), rows.end()); dup != rows.end())
    throw ValidationError("component id " + std::to_string(component_ids[*dup]) + " listed twice");
  return rows;
}

void RiskMatrices::set_y0(double threshold) {
  if (!(threshold >= 0.0)) throw ValidationError("y0 must be >= 0");
  y0 = threshold;
  c.assign(n, 0.0);
  nonzero.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (shed[i] >= y0) c[i] = shed[i];
    if (c[i] > 0.0) nonzero.push_back(static_cast<std::uint32_t>(i));
  }
}

RiskMatrices RiskMatrices::at_threshold(double threshold) const {
  RiskMatrices m;
  m.component_ids = component_ids;
  m.n = n;
  m.factors = factors;
  m.shed = shed;
  m.set_y0(threshold);
  return m;
}

RiskMatrices make_matrices(std::vector<int> component_ids, std::vector<double> shed, std::vector<double> p,
                           std::vector<double> q, double y0) {
  if (!std::is_sorted(component_ids.begin(), component_ids.end()) ||
      std::adjacent_find(component_ids.begin(), component_ids.end()) != component_ids.end())
    throw ValidationError("component ids must be ascending and distinct");
  const std::size_t n = shed.size();
  if (p.size() != component_ids.size() * n || q.size() != p.size())
    throw ValidationError("factor matrices do not match K x N");
  auto f = std::make_shared<GammaFactors>();
  f->ratio.resize(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > 0.0 && p[j] <= 1.0) || !(q[j] >= 0.0 && q[j] <= 1.0))
      throw ValidationError("factor entry " + std::to_string(j) + " outside P in (0, 1], Q in [0, 1]");
    f->ratio[j] = q[j] / p[j];
  }
  f->p = std::move(p);
  f->q = std::move(q);
  RiskMatrices m;
  m.component_ids = std::move(component_ids);
  m.n = n;
  m.factors = std::move(f);
  m.shed = std::move(shed);
  m.set_y0(y0);
  return m;
}

RiskMatrices build_matrices(std::span<const CascadeSample> samples, const FailureModel& baseline,
                            const MaintenanceEffect& effect, double y0, std::vector<int> component_ids) {
  effect.check();
  std::sort(component_ids.begin(), component_ids.end());
  if (std::adjacent_find(component_ids.begin(), component_ids.end()) != component_ids.end())
    throw ValidationError("component ids must be distinct");

  const std::size_t n = samples.size(), k_count = component_ids.size();
  std::vector<double> shed(n), p_all(k_count * n), q_all(k_count * n);
  for (std::size_t i = 0; i < n; ++i) shed[i] = samples[i].shed;

  for (std::size_t k = 0; k < k_count; ++k) {
    const int id = component_ids[k];
    const FailureParams& phi = baseline.params(id);
    const FailureParams phi_bar = effect.apply(phi);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = samples[i];
      if (!s.trace(id))
        throw ValidationError("sample " + std::to_string(i) + " has no loading trace for component " +
                              std::to_string(id) + "; it is not maintainable in this sample set");
      const double p = gamma_factor(phi, s, id);
      if (!(p > 0.0))
        throw Error("component " + std::to_string(id) + ", sample " + std::to_string(i) +
                    ": zero probability under the baseline model; samples and model do not match");
      const double q = gamma_factor(phi_bar, s, id);
      p_all[k * n + i] = p;
      q_all[k * n + i] = q;
    }
  }
  return make_matrices(std::move(component_ids), std::move(shed), std::move(p_all), std::move(q_all), y0);
}

RiskMatrices build_matrices(const SampleSet& samples, const FailureModel& baseline, const MaintenanceEffect& effect,
                            double y0, std::vector<int> component_ids) {
  return build_matrices(std::span<const CascadeSample>(samples.samples), baseline, effect, y0,
                        std::move(component_ids));
}

namespace {

// Neumaier-compensated running sum; the result depends only on the order of
// the terms, which is always ascending sample index.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double weight_at(const RiskMatrices& m, std::span<const std::size_t> rows, std::size_t i) {
  double w = 1.0;
  const auto& ratio = m.factors->ratio;
  for (auto k : rows) w *= ratio[k * m.n + i];
  return w;
}

}  // namespace

double estimate_risk_positions(const RiskMatrices& m, std::span<const std::size_t> rows) {
  if (m.n == 0) throw ValidationError("risk estimate needs at least one sample");
  CompensatedSum sum;
  for (auto i : m.nonzero) sum.add(weight_at(m, rows, i) * m.c[i]);
  return sum.value() / static_cast<double>(m.n);
}

double estimate_risk(const RiskMatrices& m) { return estimate_risk_positions(m, {}); }

double estimate_risk_strategy(const RiskMatrices& m, const Strategy& s) {
  const auto rows = m.positions(s);
  return estimate_risk_positions(m, rows);
}

std::vector<double> strategy_weights(const RiskMatrices& m, const Strategy& s) {
  const auto rows = m.positions(s);
  std::vector<double> w(m.n);
  for (std::size_t i = 0; i < m.n; ++i) w[i] = weight_at(m, rows, i);
  return w;
}

std::vector<double> strategy_terms(const RiskMatrices& m, const Strategy& s) {
  const auto rows = m.positions(s);
  std::vector<double> out(m.n, 0.0);
  for (auto i : m.nonzero) out[i] = weight_at(m, rows, i) * m.c[i];
  return out;
}

namespace {

constexpr char kMagic[4] = {'B', 'K', 'R', 'M'};
constexpr std::uint32_t kBlobVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof bits);
  unsigned char bytes[sizeof bits];
  for (std::size_t b = 0; b < sizeof bits; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  out.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

template <typename T>
T take(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof bytes)) throw ParseError("matrices", 0, 0, "truncated blob");
  U bits = 0;
  for (std::size_t b = 0; b < sizeof bits; ++b) bits |= static_cast<U>(bytes[b]) << (8 * b);
  T value;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (double x : v) put(out, x);
  }
}

void take_doubles(std::istream& in, std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
      throw ParseError("matrices", 0, 0, "truncated blob");
  } else {
    for (double& x : v) x = take<double>(in);
  }
}

}  // namespace

void write_matrices_blob(const RiskMatrices& m, std::ostream& out) {
  out.write(kMagic, 4);
  put(out, kBlobVersion);
  put(out, static_cast<std::uint64_t>(m.components()));
  put(out, static_cast<std::uint64_t>(m.n));
  put(out, m.y0);
  for (int id : m.component_ids) put(out, static_cast<std::int64_t>(id));
  put_doubles(out, m.shed);
  put_doubles(out, m.factors->p);
  put_doubles(out, m.factors->q);
}

RiskMatrices read_matrices_blob(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("matrices", 0, 0, "bad magic");
  if (const auto v = take<std::uint32_t>(in); v != kBlobVersion)
    throw ParseError("matrices", 0, 4, "unsupported blob version " + std::to_string(v));
  const auto k_count = take<std::uint64_t>(in);
  const auto n = take<std::uint64_t>(in);
  const double y0 = take<double>(in);
  if (k_count > (1u << 20) || n > (std::uint64_t{1} << 32)) throw ParseError("matrices", 0, 8, "implausible dimensions");
  std::vector<int> ids;
  for (std::uint64_t k = 0; k < k_count; ++k) ids.push_back(static_cast<int>(take<std::int64_t>(in)));
  std::vector<double> shed(n), p(k_count * n), q(k_count * n);
  take_doubles(in, shed);
  take_doubles(in, p);
  take_doubles(in, q);
  return make_matrices(std::move(ids), std::move(shed), std::move(p), std::move(q), y0);
}

void save_matrices(const RiskMatrices& m, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    write_matrices_blob(m, out);
    if (!out.flush()) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

RiskMatrices load_matrices(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_matrices_blob(in);
}

void write_matrices_csv(const RiskMatrices& m, std::ostream& out) {
  out << "sample,shed,c";
  for (int id : m.component_ids) out << ",P_" << id;
  for (int id : m.component_ids) out << ",Q_" << id;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < m.n; ++i) {
    out << i << ',' << m.shed[i] << ',' << m.c[i];
    for (std::size_t k = 0; k < m.components(); ++k) out << ',' << m.p_at(k, i);
    for (std::size_t k = 0; k < m.components(); ++k) out << ',' << m.q_at(k, i);
    out << '\n';
  }
}

nlohmann::json strategy_to_json(const Strategy& s) { return s.sorted().maintained; }

}  // namespace blackout
