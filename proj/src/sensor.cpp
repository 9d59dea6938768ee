#include "biomatch/sensor.hpp"

#include <fstream>
#include <sstream>

#include "biomatch/error.hpp"
#include "biomatch/sampling.hpp"

namespace biomatch {

std::vector<FeatureVector> parse_feature_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("k=", 0) != 0) throw FormatError("feature file must start with k=<n>");
  int k = 0;
  try {
    k = std::stoi(line.substr(2));
  } catch (const std::logic_error&) {
    throw FormatError("feature file: bad k header");
  }
  if (k < 1) throw FormatError("feature file: k must be positive");

  std::vector<FeatureVector> out;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string item;
    std::vector<double> values;
    while (std::getline(fields, item, ',')) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(item, &used);
      } catch (const std::logic_error&) {
        throw FormatError("feature file: bad number '" + item + "'");
      }
      if (item.find_first_not_of(" \t\r", used) != std::string::npos)
        throw FormatError("feature file: bad number '" + item + "'");
      values.push_back(v);
    }
    if (values.size() != static_cast<std::size_t>(k))
      throw FormatError("feature file: line " + std::to_string(out.size() + 2) + " has " +
                        std::to_string(values.size()) + " values, header says " + std::to_string(k));
    out.push_back(Eigen::Map<const FeatureVector>(values.data(), k));
  }
  return out;
}

std::vector<FeatureVector> read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open feature file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_feature_text(ss.str());
}

void write_feature_file(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) throw FormatError("no vectors to write");
  std::ofstream out(path);
  if (!out) throw IoError("cannot create feature file " + path.string());
  out.precision(17);
  out << "k=" << vectors.front().size() << "\n";
  for (const auto& v : vectors) {
    if (v.size() != vectors.front().size()) throw FormatError("vectors differ in length");
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? "," : "") << v(i);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureVector capture(const CaptureSource& source, const SystemContext& ctx) {
  FeatureVector v;
  if (const auto* file = std::get_if<FileCapture>(&source)) {
    const auto vectors = read_feature_file(file->path);
    if (file->index >= vectors.size()) throw ConfigError("feature file has no vector at index " + std::to_string(file->index));
    v = vectors[file->index];
  } else {
    const auto& syn = std::get<SyntheticCapture>(source);
    const auto& rho = ctx.config().rho;
    NormalSampler user(syn.user_seed);
    NormalSampler noise(syn.capture_seed);
    v = sample_capture(sample_user_mean(rho, user), rho, noise);
  }
  if (v.size() != ctx.features())
    throw ConfigError("captured vector has " + std::to_string(v.size()) + " features, configuration expects " +
                      std::to_string(ctx.features()));
  return v;
}

Frame SensorClient::expect_reply() {
  Frame f = channel_.receive();
  if (f.type == MessageType::malformed)
    throw ProtocolError("service rejected request: " + std::string(f.payload.begin(), f.payload.end()));
  return f;
}

void SensorClient::enroll(const std::string& user, const FeatureRef& features) {
  const SecureTemplate templ = biomatch::enroll(features, user, ctx_, pk_, rng_);
  channel_.send(Frame{MessageType::enroll_request, encode_template(templ)});
  const Frame reply = expect_reply();
  if (reply.type != MessageType::enroll_ack || decode_user_id(reply.payload) != user)
    throw ProtocolError("unexpected reply to enrollment");
}

VerifyOutcome SensorClient::verify(const std::string& user, const FeatureRef& probe, const SensorShare& share) {
  if (probe.size() != ctx_.features()) throw ConfigError("probe length does not match configuration");
  channel_.send(Frame{MessageType::verify_claim, encode_user_id(user)});
  Frame reply = expect_reply();
  if (reply.type == MessageType::unknown_user) return VerifyOutcome::unknown_user;
  if (reply.type == MessageType::locked_out) return VerifyOutcome::locked_out;
  if (reply.type != MessageType::template_reply) throw ProtocolError("expected a template");
  const SecureTemplate templ = decode_template(reply.payload);
  if (templ.user != user) throw ProtocolError("service returned another user's template");

  const Ciphertext score = sensor_lookup_and_sum(probe, templ, ctx_, pk_, rng_);
  channel_.send(Frame{MessageType::score, encode_ciphertext_payload(score)});
  reply = expect_reply();
  if (reply.type != MessageType::result_set) throw ProtocolError("expected a result set");
  const CompareSet set = decode_compare_set(ctx_.group(), reply.payload);
  if (set.elements.size() != static_cast<std::size_t>(ctx_.alpha()) + 1)
    throw ProtocolError("result set size does not match the configured score domain");
  return sensor_decide(set, share) ? VerifyOutcome::accept : VerifyOutcome::reject;
}

}  // namespace biomatch
