#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biomatch/config.hpp"
#include "biomatch/ec_elgamal.hpp"

namespace biomatch {

using FeatureVector = Eigen::VectorXd;
using FeatureRef = Eigen::Ref<const FeatureVector>;

inline constexpr std::size_t kMaxUserIdBytes = 255;

/// Encrypted template: for each feature i, the lookup-table row selected by the
/// enrollment observation, encrypted element-wise. Stored row-major,
/// k rows of 2^b ciphertexts.
struct SecureTemplate {
  std::string user;
  int features = 0;
  int bits = 0;
  std::vector<Ciphertext> cells;

  int row_width() const { return 1 << bits; }
  const Ciphertext& at(int feature, int column) const {
    return cells.at(static_cast<std::size_t>(feature) * static_cast<std::size_t>(row_width()) +
                    static_cast<std::size_t>(column));
  }
};

/// Blinded, partially decrypted encryptions of {r_i (S - t - i) : 0 <= i <= alpha}
/// in uniformly random order.
struct CompareSet {
  std::vector<PartialCiphertext> elements;
};

/// Bin index of every feature.
std::vector<int> quantize_vector(const FeatureRef& features, const BinScheme& bins);

/// Plaintext template rows (k x 2^b), the matrix that `enroll` encrypts.
ScoreMatrix plaintext_template(const FeatureRef& features, const SystemContext& ctx);

/// Plaintext quantized comparator score of an enrollment/probe pair.
Score plaintext_score(const FeatureRef& enrolled, const FeatureRef& probe, const SystemContext& ctx);

/// Sensor side of enrollment.
SecureTemplate enroll(const FeatureRef& features, std::string user, const SystemContext& ctx, const PublicKey& pk,
                      RandomSource& rng);

/// Sensor side of the comparison round: selects column p_i of row i for every
/// feature and sums the selections plus a fresh encryption of zero.
Ciphertext sensor_lookup_and_sum(const FeatureRef& probe, const SecureTemplate& templ, const SystemContext& ctx,
                                 const PublicKey& pk, RandomSource& rng);

/// Service side of the matching round for an explicit score domain bound.
CompareSet service_compare(const Ciphertext& score, Score threshold, Score score_max, const ServiceShare& share,
                           const PublicKey& pk, RandomSource& rng);

CompareSet service_compare(const Ciphertext& score, const SystemContext& ctx, const ServiceShare& share,
                           const PublicKey& pk, RandomSource& rng);

/// Number of compare-set elements that decrypt to zero.
std::size_t count_zero_elements(const CompareSet& set, const SensorShare& share);

/// Accept iff some element decrypts to zero.
bool sensor_decide(const CompareSet& set, const SensorShare& share);

/// Checks template dimensions against the configuration.
void check_template_shape(const SecureTemplate& templ, const SystemContext& ctx);

}  // namespace biomatch
