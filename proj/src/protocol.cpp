#include "biomatch/protocol.hpp"

#include <utility>

#include "biomatch/error.hpp"

namespace biomatch {
namespace {

void check_length(const FeatureRef& features, const SystemContext& ctx) {
  if (features.size() != ctx.features())
    throw ConfigError("feature vector has " + std::to_string(features.size()) + " entries, configuration expects " +
                      std::to_string(ctx.features()));
}

void check_group(const PublicKey& pk, const SystemContext& ctx) {
  if (&pk.group() != &ctx.group()) throw ConfigError("public key curve differs from configured curve");
}

}  // namespace

std::vector<int> quantize_vector(const FeatureRef& features, const BinScheme& bins) {
  std::vector<int> out(static_cast<std::size_t>(features.size()));
  for (Eigen::Index i = 0; i < features.size(); ++i) out[static_cast<std::size_t>(i)] = quantize_feature(features(i), bins);
  return out;
}

ScoreMatrix plaintext_template(const FeatureRef& features, const SystemContext& ctx) {
  check_length(features, ctx);
  const auto rows = quantize_vector(features, ctx.bins());
  ScoreMatrix out(ctx.features(), ctx.row_width());
  for (int i = 0; i < ctx.features(); ++i) out.row(i) = ctx.table(i).scores.row(rows[static_cast<std::size_t>(i)]);
  return out;
}

Score plaintext_score(const FeatureRef& enrolled, const FeatureRef& probe, const SystemContext& ctx) {
  check_length(enrolled, ctx);
  check_length(probe, ctx);
  const auto x = quantize_vector(enrolled, ctx.bins());
  const auto y = quantize_vector(probe, ctx.bins());
  Score sum = 0;
  for (int i = 0; i < ctx.features(); ++i) {
    const auto f = static_cast<std::size_t>(i);
    sum += ctx.table(i).at(x[f], y[f]);
  }
  return sum;
}

SecureTemplate enroll(const FeatureRef& features, std::string user, const SystemContext& ctx, const PublicKey& pk,
                      RandomSource& rng) {
  check_group(pk, ctx);
  if (user.size() > kMaxUserIdBytes) throw ConfigError("user id longer than 255 bytes");
  const ScoreMatrix rows = plaintext_template(features, ctx);
  SecureTemplate t{std::move(user), ctx.features(), ctx.bits(), {}};
  t.cells.reserve(static_cast<std::size_t>(rows.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j) t.cells.push_back(encrypt(pk, rows(i, j), rng));
  return t;
}

void check_template_shape(const SecureTemplate& templ, const SystemContext& ctx) {
  if (templ.features != ctx.features() || templ.bits != ctx.bits() ||
      templ.cells.size() != static_cast<std::size_t>(ctx.features()) * static_cast<std::size_t>(ctx.row_width()))
    throw ConfigError("template dimensions do not match the configuration");
}

Ciphertext sensor_lookup_and_sum(const FeatureRef& probe, const SecureTemplate& templ, const SystemContext& ctx,
                                 const PublicKey& pk, RandomSource& rng) {
  check_group(pk, ctx);
  check_length(probe, ctx);
  check_template_shape(templ, ctx);
  const auto cols = quantize_vector(probe, ctx.bins());
  Ciphertext sum = encrypt(pk, 0, rng);
  for (int i = 0; i < ctx.features(); ++i) sum = add(sum, templ.at(i, cols[static_cast<std::size_t>(i)]));
  return sum;
}

CompareSet service_compare(const Ciphertext& score, Score threshold, Score score_max, const ServiceShare& share,
                           const PublicKey& pk, RandomSource& rng) {
  if (score_max < threshold) throw DomainError("threshold above the score domain");
  const Group& group = pk.group();
  const Score alpha = score_max - threshold;
  CompareSet set;
  set.elements.reserve(static_cast<std::size_t>(alpha) + 1);
  for (Score i = 0; i <= alpha; ++i) {
    const Ciphertext shifted = add(score, encrypt(pk, -threshold - i, rng));
    const Ciphertext blinded = scalar_mul(shifted, Scalar::random(group, rng));
    set.elements.push_back(partial_decrypt(blinded, share));
  }
  // Fisher-Yates.
  for (std::size_t i = set.elements.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(set.elements[i - 1], set.elements[j]);
  }
  return set;
}

CompareSet service_compare(const Ciphertext& score, const SystemContext& ctx, const ServiceShare& share,
                           const PublicKey& pk, RandomSource& rng) {
  check_group(pk, ctx);
  return service_compare(score, ctx.threshold(), ctx.score_max(), share, pk, rng);
}

std::size_t count_zero_elements(const CompareSet& set, const SensorShare& share) {
  std::size_t zeros = 0;
  for (const auto& e : set.elements)
    if (is_zero(final_decrypt(e, share))) ++zeros;
  return zeros;
}

bool sensor_decide(const CompareSet& set, const SensorShare& share) { return count_zero_elements(set, share) > 0; }

}  // namespace biomatch
