#include "throttle/scenario_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "throttle/csv.hpp"
#include "throttle/error.hpp"

namespace throttle {

namespace pt = boost::property_tree;

namespace {

std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// One INI section with typed, tracked lookups so unknown keys can be rejected.
class Section {
 public:
  Section(std::string name, const pt::ptree& body) : name_(std::move(name)), body_(body) {
    for (const auto& [key, child] : body_) {
      if (!child.empty()) throw ParseError(fmt::format("[{}]: nested key '{}'", name_, key));
    }
  }

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    auto it = body_.find(key);
    if (it == body_.not_found()) return std::nullopt;
    return std::string(csv::trim(it->second.data()));
  }

  std::string required_text(const std::string& key) {
    auto v = text(key);
    if (!v || v->empty()) throw ParseError(fmt::format("[{}]: missing '{}'", name_, key));
    return *v;
  }

  double number(const std::string& key, double fallback) {
    auto v = text(key);
    return v ? parse_double(key, *v) : fallback;
  }

  double required_number(const std::string& key) {
    return parse_double(key, required_text(key));
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    auto v = text(key);
    return v ? parse_u64(key, *v) : fallback;
  }

  std::optional<std::uint64_t> optional_integer(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    return parse_u64(key, *v);
  }

  void reject_unknown() const {
    for (const auto& [key, child] : body_) {
      if (!used_.count(key))
        throw ParseError(fmt::format("[{}]: unknown key '{}'", name_, key));
    }
  }

  const std::string& name() const { return name_; }

 private:
  double parse_double(const std::string& key, const std::string& value) const {
    try {
      return csv::to_double(value, 0);
    } catch (const ParseError&) {
      throw ParseError(fmt::format("[{}]: '{}' is not a number: '{}'", name_, key, value));
    }
  }

  std::uint64_t parse_u64(const std::string& key, const std::string& value) const {
    try {
      return csv::to_u64(value, 0);
    } catch (const ParseError&) {
      throw ParseError(
          fmt::format("[{}]: '{}' is not a non-negative integer: '{}'", name_, key, value));
    }
  }

  std::string name_;
  const pt::ptree& body_;
  std::set<std::string> used_;
};

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

AssessmentPolicy read_policy(Section& s, const std::string& prefix) {
  const auto family = s.text(prefix).value_or("incremental");
  if (family == "incremental") return AssessmentPolicy::incremental();
  if (family == "exponential") return AssessmentPolicy::exponential();
  if (family == "linear")
    return AssessmentPolicy::linear(s.required_number(prefix + "_a"),
                                    s.required_number(prefix + "_b"));
  throw ParseError(fmt::format("[{}]: unknown {} family '{}'", s.name(), prefix, family));
}

ResponseCurve read_curve(const std::string& section, std::string_view spec) {
  const auto parts = words(spec);
  const auto arg = [&](std::size_t i) {
    if (i >= parts.size())
      throw ParseError(fmt::format("[{}]: response '{}' is missing arguments", section, spec));
    return csv::to_double(parts[i], 0);
  };
  if (parts.empty()) throw ParseError(fmt::format("[{}]: empty response", section));
  const std::size_t expected = parts[0] == "proportional"        ? 1
                               : parts[0] == "linear_saturating" ? 2
                               : parts[0] == "cliff"             ? 3
                                                                 : 0;
  if (expected == 0)
    throw ParseError(fmt::format("[{}]: unknown response curve '{}'", section, parts[0]));
  if (parts.size() > expected)
    throw ParseError(fmt::format("[{}]: too many arguments in '{}'", section, spec));
  if (parts[0] == "proportional") return ResponseCurve::proportional();
  if (parts[0] == "linear_saturating") return ResponseCurve::linear_saturating(arg(1));
  return ResponseCurve::cliff(arg(1), arg(2));
}

ActuatorPolicy read_actuator(Section& s) {
  const auto mode_text = s.text("mode").value_or("additive");
  ActuationMode mode;
  if (mode_text == "additive") {
    mode = ActuationMode::additive;
  } else if (mode_text == "multiplicative") {
    mode = ActuationMode::multiplicative;
  } else {
    throw ParseError(fmt::format("[actuator]: unknown mode '{}'", mode_text));
  }
  ResourceSet targets;
  for (const auto& w : words(s.text("targets").value_or("cpu"))) targets.insert(parse_resource(w));
  ResourceShares floors = kDefaultFloors;
  for (Resource r : kAllResources)
    floors[r] = s.number("floor_" + std::string(to_string(r)), kDefaultFloors[r]);
  return ActuatorPolicy(s.number("gamma", 0.1), mode, targets, floors);
}

struct DetectorSpec {
  std::string id;
  std::string kind;
  // trace
  std::optional<std::map<std::string, TraceDetector>> traces;
  std::optional<std::string> trace_process;
  // stochastic
  double tpr = 1.0;
  double fpr = 0.0;
  GroundTruth truth = GroundTruth::attack;
  std::optional<std::uint64_t> seed;
  // threshold
  std::shared_ptr<const std::vector<std::optional<double>>> stream;
  std::uint64_t window = 1;
  double cutoff = 0.0;
};

DetectorSpec read_detector(Section& s, const std::string& id,
                           const std::filesystem::path& base_dir) {
  DetectorSpec d;
  d.id = id;
  d.kind = s.required_text("kind");
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() ? path : base_dir / path).string();
  };
  if (d.kind == "trace") {
    d.traces = load_trace_csv(resolve(s.required_text("file")));
    d.trace_process = s.text("process");
  } else if (d.kind == "stochastic") {
    d.tpr = s.number("tpr", 1.0);
    d.fpr = s.number("fpr", 0.0);
    const auto truth = s.text("ground_truth").value_or("attack");
    if (truth == "attack") {
      d.truth = GroundTruth::attack;
    } else if (truth == "benign") {
      d.truth = GroundTruth::benign;
    } else {
      throw ParseError(fmt::format("[{}]: ground_truth must be attack or benign", s.name()));
    }
    d.seed = s.optional_integer("seed");
  } else if (d.kind == "threshold") {
    d.stream = load_stream_csv(resolve(s.required_text("stream")));
    d.window = s.integer("window", 1);
    d.cutoff = s.required_number("cutoff");
  } else {
    throw ParseError(fmt::format("[{}]: unknown detector kind '{}'", s.name(), d.kind));
  }
  return d;
}

VerdictSource build_source(const DetectorSpec& d, const std::string& process_id,
                           std::uint64_t scenario_seed) {
  if (d.kind == "trace") {
    const auto& key = d.trace_process.value_or(process_id);
    auto it = d.traces->find(key);
    if (it == d.traces->end())
      throw SourceExhausted(
          fmt::format("detector '{}': trace has no rows for process '{}'", d.id, key));
    return VerdictSource(it->second);
  }
  if (d.kind == "stochastic") {
    StochasticDetector s;
    s.tpr = d.tpr;
    s.fpr = d.fpr;
    s.ground_truth = d.truth;
    s.seed = d.seed.value_or(derive_detector_seed(scenario_seed, d.id, process_id));
    return VerdictSource(s);
  }
  ThresholdDetector t;
  t.window_size = d.window;
  t.cutoff = d.cutoff;
  t.stream = d.stream;
  return VerdictSource(t);
}

}  // namespace

std::uint64_t derive_detector_seed(std::uint64_t scenario_seed, std::string_view detector_id,
                                   std::string_view process_id) noexcept {
  std::string key(detector_id);
  key += '/';
  key += process_id;
  return splitmix64_at(scenario_seed, fnv1a(key));
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed_override) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(fmt::format("scenario line {}: {}", e.line(), e.message()));
  }

  Scenario scenario;
  std::optional<pt::ptree> scenario_body, policies_body, actuator_body;
  std::vector<std::pair<std::string, const pt::ptree*>> process_bodies, detector_bodies;

  for (const auto& [name, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ParseError(fmt::format("scenario: key '{}' outside any section", name));
    if (name == "scenario") {
      scenario_body = body;
    } else if (name == "policies") {
      policies_body = body;
    } else if (name == "actuator") {
      actuator_body = body;
    } else if (name.rfind("process.", 0) == 0 && name.size() > 8) {
      process_bodies.emplace_back(name.substr(8), &body);
    } else if (name.rfind("detector.", 0) == 0 && name.size() > 9) {
      detector_bodies.emplace_back(name.substr(9), &body);
    } else {
      throw ParseError(fmt::format("scenario: unknown section [{}]", name));
    }
  }
  if (!scenario_body) throw ParseError("scenario: missing [scenario] section");

  {
    Section s("scenario", *scenario_body);
    scenario.epochs = s.integer("epochs", 0);
    if (scenario.epochs == 0) throw ParseError("[scenario]: 'epochs' must be >= 1");
    scenario.epoch_duration_ms = s.number("epoch_ms", 100.0);
    scenario.rules.n_star = s.integer("n_star", 0);
    scenario.rules.measurements_per_epoch = s.integer("measurements_per_epoch", 1);
    scenario.rng_seed = s.integer("seed", 0);
    s.reject_unknown();
  }
  if (seed_override) scenario.rng_seed = *seed_override;

  if (policies_body) {
    Section s("policies", *policies_body);
    scenario.rules.penalty = read_policy(s, "penalty");
    scenario.rules.compensation = read_policy(s, "compensation");
    s.reject_unknown();
  }

  if (actuator_body) {
    Section s("actuator", *actuator_body);
    scenario.actuator = read_actuator(s);
    s.reject_unknown();
  }

  std::map<std::string, DetectorSpec> detectors;
  for (const auto& [id, body] : detector_bodies) {
    Section s("detector." + id, *body);
    detectors.emplace(id, read_detector(s, id, base_dir));
    s.reject_unknown();
  }

  for (const auto& [id, body] : process_bodies) {
    Section s("process." + id, *body);
    ProgressModel model;
    model.base_rate = s.number("base_rate", 1.0);
    model.unit_label = s.text("unit").value_or("abstract");
    const auto combiner = s.text("combiner").value_or("bottleneck_min");
    if (combiner == "bottleneck_min") {
      model.combiner = Combiner::bottleneck_min;
    } else if (combiner == "product") {
      model.combiner = Combiner::product;
    } else {
      throw ParseError(fmt::format("[{}]: unknown combiner '{}'", s.name(), combiner));
    }
    for (Resource r : kAllResources) {
      if (auto spec = s.text(std::string(to_string(r))))
        model.respond(r, read_curve(s.name(), *spec));
    }
    const auto detector_id = s.required_text("detector");
    auto it = detectors.find(detector_id);
    if (it == detectors.end())
      throw ParseError(fmt::format("[{}]: unknown detector '{}'", s.name(), detector_id));
    auto completes_after = s.optional_integer("completes_after");
    s.reject_unknown();
    scenario.processes.push_back(
        {id, std::move(model), build_source(it->second, id, scenario.rng_seed), completes_after});
  }

  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario '" + path.string() + "'");
  try {
    return parse_scenario(in, path.parent_path(), seed_override);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void use_traces(Scenario& scenario, const std::map<std::string, TraceDetector>& traces) {
  for (auto& p : scenario.processes) {
    auto it = traces.find(p.id);
    if (it == traces.end())
      throw SourceExhausted("trace has no rows for process '" + p.id + "'");
    p.source = VerdictSource(it->second);
  }
}

}  // namespace throttle
