#include "biomatch/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "biomatch/error.hpp"

namespace biomatch {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ConfigError("config: bad number for " + key + ": " + text);
    }
    if (used != text.size()) throw ConfigError("config: bad number for " + key + ": " + text);
  } else {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ConfigError("config: bad integer for " + key + ": " + text);
  }
  return value;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (entries.contains(key)) throw ConfigError("config: duplicate key " + key);
    entries[key] = trim(std::string_view(line).substr(eq + 1));
  }

  auto take = [&](const std::string& key) -> std::string {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("config: missing key " + key);
    std::string v = it->second;
    entries.erase(it);
    return v;
  };

  SystemConfig c;
  c.features = parse_number<int>("features", take("features"));
  c.bits = parse_number<int>("bits", take("bits"));
  c.delta = parse_number<double>("delta", take("delta"));
  c.threshold = parse_number<Score>("threshold", take("threshold"));
  std::istringstream rhos(take("rho"));
  std::string item;
  while (std::getline(rhos, item, ',')) c.rho.push_back(parse_number<double>("rho", trim(item)));
  if (entries.contains("curve")) c.curve = parse_curve(take("curve"));

  std::optional<Score> declared_max;
  if (entries.contains("score_max")) declared_max = parse_number<Score>("score_max", take("score_max"));
  if (!entries.empty()) throw ConfigError("config: unknown key " + entries.begin()->first);

  if (declared_max) {
    const SystemContext ctx(c);
    if (ctx.score_max() != *declared_max)
      throw ConfigError("config: score_max " + std::to_string(*declared_max) + " disagrees with derived " +
                        std::to_string(ctx.score_max()));
  }
  return c;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SystemConfig& config) {
  std::ostringstream out;
  out.precision(17);
  out << "features = " << config.features << "\n";
  out << "bits = " << config.bits << "\n";
  out << "delta = " << config.delta << "\n";
  out << "rho = ";
  for (std::size_t i = 0; i < config.rho.size(); ++i) out << (i ? ", " : "") << config.rho[i];
  out << "\nthreshold = " << config.threshold << "\n";
  out << "curve = " << curve_name(config.curve) << "\n";
  return out.str();
}

SystemContext::SystemContext(SystemConfig config) : config_(std::move(config)) {
  if (config_.features < 1) throw ConfigError("feature count must be positive");
  if (config_.bits < kMinBits || config_.bits > kMaxBits) throw ConfigError("bits must lie in [1, 8]");
  if (!(config_.delta > 0.0)) throw ConfigError("delta must be positive");
  if (config_.rho.size() != static_cast<std::size_t>(config_.features))
    throw ConfigError("rho vector length must equal the feature count");
  for (double r : config_.rho)
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("each rho must lie in [0, 1)");

  bins_ = make_bins(config_.bits);
  std::vector<ScoreDistribution> per_feature;
  for (double r : config_.rho) {
    tables_.push_back(build_table(config_.bits, r, config_.delta));
    per_feature.push_back(table_score_distribution(tables_.back()));
  }
  total_ = convolve(per_feature);
  check_threshold();
}

SystemContext SystemContext::with_threshold(Score threshold) const {
  SystemContext copy = *this;
  copy.config_.threshold = threshold;
  copy.check_threshold();
  return copy;
}

void SystemContext::check_threshold() const {
  if (config_.threshold < total_.min() || config_.threshold > total_.max())
    throw ConfigError("threshold " + std::to_string(config_.threshold) + " outside score domain [" +
                      std::to_string(total_.min()) + ", " + std::to_string(total_.max()) + "]");
}

}  // namespace biomatch
