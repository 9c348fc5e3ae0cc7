#include "throttle/detectors.hpp"

#include <cmath>

#include <fmt/format.h>

#include "throttle/csv.hpp"
#include "throttle/error.hpp"

namespace throttle {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

TraceDetector TraceDetector::from_list(const std::vector<Verdict>& list,
                                       std::uint64_t first_epoch) {
  TraceDetector d;
  d.verdicts.resize(first_epoch);
  d.verdicts.insert(d.verdicts.end(), list.begin(), list.end());
  return d;
}

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError(fmt::format("stochastic detector: {} must lie in [0, 1]", name));
}

struct VerdictVisitor {
  std::uint64_t epoch;

  Verdict operator()(const TraceDetector& d) const {
    if (epoch >= d.verdicts.size() || !d.verdicts[epoch])
      throw SourceExhausted(fmt::format("trace has no verdict for epoch {}", epoch));
    return *d.verdicts[epoch];
  }

  Verdict operator()(const StochasticDetector& d) const {
    const double p = d.ground_truth == GroundTruth::attack ? d.tpr : d.fpr;
    return unit_interval(splitmix64_at(d.seed, epoch)) < p ? Verdict::malicious
                                                           : Verdict::benign;
  }

  Verdict operator()(const ThresholdDetector& d) const {
    const auto& samples = *d.stream;
    if (epoch >= samples.size())
      throw SourceExhausted(fmt::format("measurement stream ends before epoch {}", epoch));
    const std::uint64_t first = epoch + 1 >= d.window_size ? epoch + 1 - d.window_size : 0;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::uint64_t e = first; e <= epoch; ++e) {
      if (!samples[e])
        throw SourceExhausted(fmt::format("measurement stream has no sample at epoch {}", e));
      sum += *samples[e];
      ++count;
    }
    return sum / static_cast<double>(count) > d.cutoff ? Verdict::malicious
                                                       : Verdict::benign;
  }
};

}  // namespace

VerdictSource::VerdictSource(TraceDetector d) : impl_(std::move(d)) {}

VerdictSource::VerdictSource(StochasticDetector d) : impl_(d) {
  check_probability(d.tpr, "tpr");
  check_probability(d.fpr, "fpr");
}

VerdictSource::VerdictSource(ThresholdDetector d) : impl_(std::move(d)) {
  const auto& t = std::get<ThresholdDetector>(impl_);
  if (t.window_size == 0) throw ValidationError("threshold detector: window must be >= 1");
  if (!std::isfinite(t.cutoff)) throw ValidationError("threshold detector: bad cutoff");
  if (!t.stream) throw ValidationError("threshold detector: missing measurement stream");
}

SourceKind VerdictSource::kind() const noexcept {
  return static_cast<SourceKind>(impl_.index());
}

Verdict VerdictSource::next_verdict(std::uint64_t epoch) const {
  return std::visit(VerdictVisitor{epoch}, impl_);
}

std::optional<std::uint64_t> VerdictSource::last_epoch() const {
  if (const auto* t = std::get_if<TraceDetector>(&impl_)) {
    if (t->verdicts.empty()) return std::nullopt;
    return t->verdicts.size() - 1;
  }
  if (const auto* t = std::get_if<ThresholdDetector>(&impl_)) {
    if (t->stream->empty()) return std::nullopt;
    return t->stream->size() - 1;
  }
  return std::nullopt;
}

Verdict next_verdict(const VerdictSource& source, std::uint64_t epoch) {
  return source.next_verdict(epoch);
}

namespace {

constexpr std::string_view kTraceHeader = "epoch,process,verdict";
constexpr std::string_view kStreamHeader = "epoch,value";

std::map<std::string, TraceDetector> traces_from_table(const csv::Table& table) {
  std::map<std::string, TraceDetector> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto line = table.lines[i];
    const auto epoch = csv::to_u64(row[0], line);
    if (row[1].empty()) throw ParseError(fmt::format("line {}: empty process id", line));
    Verdict v;
    try {
      v = parse_verdict(row[2]);
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line, e.what()));
    }
    auto& slots = out[row[1]].verdicts;
    if (slots.size() <= epoch) slots.resize(epoch + 1);
    if (slots[epoch])
      throw ParseError(fmt::format("line {}: duplicate verdict for {} at epoch {}", line,
                                   row[1], epoch));
    slots[epoch] = v;
  }
  return out;
}

std::shared_ptr<const std::vector<std::optional<double>>> stream_from_table(
    const csv::Table& table) {
  auto samples = std::make_shared<std::vector<std::optional<double>>>();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto line = table.lines[i];
    const auto epoch = csv::to_u64(table.rows[i][0], line);
    if (samples->size() <= epoch) samples->resize(epoch + 1);
    if ((*samples)[epoch])
      throw ParseError(fmt::format("line {}: duplicate sample for epoch {}", line, epoch));
    (*samples)[epoch] = csv::to_double(table.rows[i][1], line);
  }
  return samples;
}

}  // namespace

std::map<std::string, TraceDetector> read_trace_csv(std::istream& in) {
  return traces_from_table(csv::read(in, kTraceHeader));
}

std::map<std::string, TraceDetector> load_trace_csv(const std::string& path) {
  return traces_from_table(csv::read_file(path, kTraceHeader));
}

std::shared_ptr<const std::vector<std::optional<double>>> read_stream_csv(std::istream& in) {
  return stream_from_table(csv::read(in, kStreamHeader));
}

std::shared_ptr<const std::vector<std::optional<double>>> load_stream_csv(
    const std::string& path) {
  return stream_from_table(csv::read_file(path, kStreamHeader));
}

}  // namespace throttle
