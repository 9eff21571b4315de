#include "gpfewshot/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gpfewshot/errors.hpp"

namespace gpfewshot::config {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Minimal TOML reader producing the same tree shape as the JSON config:
// top-level [section] tables, key = value pairs, values being strings,
// integers, floats, booleans or (nested) arrays.

class TomlLite {
 public:
  explicit TomlLite(const std::string& text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    std::istringstream in(text_);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no_;
      std::string line = strip(strip_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("unterminated table header");
        const std::string name = strip(line.substr(1, line.size() - 2));
        if (name.empty()) fail("empty table name");
        if (root.contains(name)) fail("duplicate table [" + name + "]");
        root[name] = json::object();
        table = &root[name];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected key = value");
      const std::string key = strip(line.substr(0, eq));
      if (key.empty()) fail("empty key");
      if (table->contains(key)) fail("duplicate key '" + key + "'");
      size_t pos = 0;
      const std::string value_text = strip(line.substr(eq + 1));
      if (value_text.empty()) fail("missing value for '" + key + "'");
      (*table)[key] = parse_value(value_text, pos);
      if (pos != value_text.size()) fail("trailing characters after value");
    }
    return root;
  }

 private:
  static std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_string = !in_string;
      if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
  }

  static std::string strip(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  json parse_value(const std::string& s, size_t& pos) {
    skip_ws(s, pos);
    if (pos >= s.size()) fail("missing value");
    const char c = s[pos];
    if (c == '"') return parse_string(s, pos);
    if (c == '[') return parse_array(s, pos);
    if (s.compare(pos, 4, "true") == 0) {
      pos += 4;
      return json(true);
    }
    if (s.compare(pos, 5, "false") == 0) {
      pos += 5;
      return json(false);
    }
    return parse_number(s, pos);
  }

  json parse_string(const std::string& s, size_t& pos) {
    ++pos;  // opening quote
    std::string out;
    while (pos < s.size() && s[pos] != '"') out += s[pos++];
    if (pos >= s.size()) fail("unterminated string");
    ++pos;
    return json(out);
  }

  json parse_array(const std::string& s, size_t& pos) {
    ++pos;  // '['
    json arr = json::array();
    skip_ws(s, pos);
    if (pos < s.size() && s[pos] == ']') {
      ++pos;
      return arr;
    }
    while (true) {
      arr.push_back(parse_value(s, pos));
      skip_ws(s, pos);
      if (pos >= s.size()) fail("unterminated array");
      if (s[pos] == ',') {
        ++pos;
        skip_ws(s, pos);
        continue;
      }
      if (s[pos] == ']') {
        ++pos;
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  json parse_number(const std::string& s, size_t& pos) {
    const size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != ',' && s[pos] != ']') {
      ++pos;
    }
    const std::string token = s.substr(start, pos - start);
    try {
      if (token.find_first_of(".eE") == std::string::npos) {
        return json(std::stoll(token));
      }
      return json(std::stod(token));
    } catch (const std::exception&) {
      fail("cannot parse number '" + token + "'");
    }
    return {};
  }

  static void skip_ws(const std::string& s, size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream os;
    os << "config line " << line_no_ << ": " << message;
    throw ConfigError(os.str());
  }

  const std::string& text_;
  int line_no_ = 0;
};

json parse_document(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') {
      try {
        return json::parse(text);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON config: ") + e.what());
      }
    }
    break;
  }
  return TomlLite(text).parse();
}

// ---------------------------------------------------------------------------
// Schema validation helpers. Every lookup tracks its key path so errors name
// the offending key exactly.

class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw ConfigError("config key '" + path_ + "' must be a table/object");
    }
  }

  const json& require(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) {
      throw ConfigError("missing required config key '" + path_ + "." + key + "'");
    }
    return node_.at(key);
  }

  const json* optional(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) ? &node_.at(key) : nullptr;
  }

  void reject_unknown() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("unknown config key '" + path_ + "." + item.key() + "'");
      }
    }
  }

  std::string path_of(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

long long as_integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_unsigned()) return static_cast<long long>(v.get<std::uint64_t>());
  throw ConfigError("config key '" + path + "' must be an integer");
}

double as_number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  throw ConfigError("config key '" + path + "' must be a number");
}

std::string as_string(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("config key '" + path + "' must be a string");
}

bool as_bool(const json& v, const std::string& path) {
  if (v.is_boolean()) return v.get<bool>();
  throw ConfigError("config key '" + path + "' must be a boolean");
}

Eigen::VectorXd as_vector(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("config key '" + path + "' must be an array");
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = as_number(v[i], path);
  }
  return out;
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError("config key '" + path + "' must be an array of rows");
  }
  const size_t rows = v.size();
  const size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw ConfigError("config key '" + path + "' rows must be arrays");
  Eigen::MatrixXd out(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      throw ConfigError("config key '" + path + "' rows must have equal length");
    }
    for (size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_number(v[i][j], path);
    }
  }
  return out;
}

sim::InstanceSource parse_instance(const json& node) {
  Section section(node, "instance");
  const std::string type = as_string(section.require("type"), "instance.type");

  sim::InstanceSource source;
  if (type == "iid") {
    sim::IidSource iid;
    iid.n_arms = as_integer(section.require("n_arms"), "instance.n_arms");
    iid.horizon = as_integer(section.require("horizon"), "instance.horizon");
    source = iid;
  } else if (type == "spike") {
    sim::SpikeSource spike;
    spike.n_arms = as_integer(section.require("n_arms"), "instance.n_arms");
    spike.horizon = as_integer(section.require("horizon"), "instance.horizon");
    spike.spike_index = static_cast<int>(
        as_integer(section.require("spike_index"), "instance.spike_index"));
    spike.spike_variance =
        as_number(section.require("spike_variance"), "instance.spike_variance");
    source = spike;
  } else if (type == "explicit") {
    sim::ExplicitSource expl;
    expl.instance.mean = as_vector(section.require("mean"), "instance.mean");
    expl.instance.covariance =
        as_matrix(section.require("covariance"), "instance.covariance");
    expl.instance.horizon =
        as_integer(section.require("horizon"), "instance.horizon");
    source = expl;
  } else if (type == "continuous") {
    sim::ContinuousSource cont;
    cont.instance.kernel.kind = continuous::kernel_from_string(
        as_string(section.require("kernel"), "instance.kernel"));
    cont.instance.kernel.length_scale =
        as_number(section.require("length_scale"), "instance.length_scale");
    cont.instance.kernel.variance =
        as_number(section.require("variance"), "instance.variance");
    cont.instance.kernel.dim =
        static_cast<int>(as_integer(section.require("dim"), "instance.dim"));
    cont.instance.horizon =
        as_integer(section.require("horizon"), "instance.horizon");
    source = cont;
  } else {
    throw ConfigError("config key 'instance.type' must be one of iid, spike, "
                      "explicit, continuous; got '" + type + "'");
  }
  section.reject_unknown();
  return source;
}

}  // namespace

sim::SimConfig parse_sim_config(const std::string& text) {
  const json root = parse_document(text);
  Section top(root, "config");

  sim::SimConfig config;
  config.source = parse_instance(top.require("instance"));

  Section policy(top.require("policy"), "policy");
  config.policy = policies::policy_from_string(
      as_string(policy.require("kind"), "policy.kind"));
  if (const json* tie = policy.optional("tie_break")) {
    const std::string name = as_string(*tie, "policy.tie_break");
    if (name == "lowest_index") {
      config.tie_break = policies::TieBreak::LowestIndex;
    } else if (name == "random") {
      config.tie_break = policies::TieBreak::Random;
    } else {
      throw ConfigError(
          "config key 'policy.tie_break' must be lowest_index or random");
    }
  }
  policy.reject_unknown();

  Section simulation(top.require("simulation"), "simulation");
  config.episodes =
      as_integer(simulation.require("episodes"), "simulation.episodes");
  if (config.episodes < 1) {
    throw ConfigError("config key 'simulation.episodes' must be >= 1");
  }
  config.master_seed = static_cast<std::uint64_t>(
      as_integer(simulation.require("master_seed"), "simulation.master_seed"));
  simulation.reject_unknown();

  if (const json* out = top.optional("output")) {
    Section section(*out, "output");
    section.optional("report_path");
    section.optional("dump_trajectories");
    section.optional("trajectory_path");
    section.optional("trajectory_episode_limit");
    section.reject_unknown();
  }
  top.reject_unknown();
  return config;
}

OutputConfig parse_output_config(const std::string& text) {
  const json root = parse_document(text);
  OutputConfig out;
  if (!root.is_object() || !root.contains("output")) return out;
  Section section(root.at("output"), "output");
  if (const json* v = section.optional("report_path")) {
    out.report_path = as_string(*v, "output.report_path");
  }
  if (const json* v = section.optional("dump_trajectories")) {
    out.dump_trajectories = as_bool(*v, "output.dump_trajectories");
  }
  if (const json* v = section.optional("trajectory_path")) {
    out.trajectory_path = as_string(*v, "output.trajectory_path");
  }
  if (const json* v = section.optional("trajectory_episode_limit")) {
    out.trajectory_episode_limit =
        as_integer(*v, "output.trajectory_episode_limit");
  }
  section.reject_unknown();
  return out;
}

sim::SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sim_config(buffer.str());
}

jsonout::Value report_to_json(const sim::RegretReport& report) {
  using jsonout::Value;

  auto estimate = [](const sim::Estimate& e) {
    Value v = Value::object();
    v.add("value", Value::num(e.value));
    v.add("stderr", Value::num(e.stderr_));
    return v;
  };

  Value instance = Value::object();
  instance.add("kind", Value::str(report.instance_kind));
  instance.add("n_arms", Value::integer(report.n_arms));
  instance.add("horizon", Value::integer(report.horizon));

  Value estimates = Value::object();
  estimates.add("mean_yhat", estimate(report.mean_yhat));
  estimates.add("mean_fhat", estimate(report.mean_fhat));
  estimates.add("mean_spread_y", estimate(report.mean_spread_y));
  estimates.add("mean_spread_f", estimate(report.mean_spread_f));
  estimates.add("normreg", estimate(report.normreg));
  estimates.add("spread_ratio", estimate(report.spread_ratio));

  Value bounds_json = Value::array();
  for (const auto& b : report.applicable_bounds) {
    Value one = Value::object();
    one.add("kind", Value::str(bounds::to_string(b.kind)));
    Value inputs = Value::object();
    if (b.n_arms > 0.0) inputs.add("n", Value::num(b.n_arms));
    if (b.horizon > 0.0) inputs.add("t", Value::num(b.horizon));
    if (b.dim > 0) inputs.add("d", Value::integer(b.dim));
    if (b.lipschitz > 0.0) inputs.add("lk", Value::num(b.lipschitz));
    if (b.sigma_cap > 0.0) inputs.add("sigma", Value::num(b.sigma_cap));
    one.add("inputs", std::move(inputs));
    one.add("value", Value::num(b.value));
    bounds_json.push(std::move(one));
  }

  Value doc = Value::object();
  doc.add("schema_version", Value::integer(1));
  doc.add("kind", Value::str("regret_report"));
  doc.add("instance", std::move(instance));
  doc.add("policy", Value::str(report.policy));
  doc.add("episodes", Value::integer(report.episodes));
  doc.add("master_seed", Value::uinteger(report.master_seed));
  doc.add("estimates", std::move(estimates));
  doc.add("applicable_bounds", std::move(bounds_json));
  return doc;
}

std::string trajectories_to_csv(const std::vector<sim::TrajectoryDump>& dumps) {
  std::string out = "episode,step,action,observation,running_max,running_min\n";
  for (const auto& dump : dumps) {
    double rmax = 0.0, rmin = 0.0;
    for (size_t step = 0; step < dump.trajectory.actions.size(); ++step) {
      const double y = dump.trajectory.observations[step];
      if (step == 0) {
        rmax = rmin = y;
      } else {
        rmax = std::max(rmax, y);
        rmin = std::min(rmin, y);
      }
      out += std::to_string(dump.episode);
      out += ',';
      out += std::to_string(step);
      out += ',';
      out += std::to_string(dump.trajectory.actions[step]);
      out += ',';
      out += jsonout::format_g12(y);
      out += ',';
      out += jsonout::format_g12(rmax);
      out += ',';
      out += jsonout::format_g12(rmin);
      out += '\n';
    }
  }
  return out;
}

}  // namespace gpfewshot::config
