#include "biomatch/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "biomatch/error.hpp"
#include "biomatch/protocol.hpp"
#include "biomatch/random.hpp"
#include "biomatch/sampling.hpp"
#include "biomatch/stats.hpp"

namespace biomatch {

FeatureSet feature_set(std::string_view name) {
  if (name == "fs1") {
    FeatureSet fs{"fs1", {}};
    for (int i = 70; i <= 90; ++i) fs.rho.push_back(i / 100.0);
    return fs;
  }
  if (name == "fs2") return FeatureSet{"fs2", std::vector<double>(20, 0.8)};
  if (name == "fs3") {
    FeatureSet fs{"fs3", {}};
    for (double r : {0.7, 0.8, 0.9}) fs.rho.insert(fs.rho.end(), 4, r);
    return fs;
  }
  throw ConfigError("unknown feature set: " + std::string(name));
}

FeatureSet single_feature(double rho) { return FeatureSet{"single", {rho}}; }

Population gen_population(const FeatureSet& fs, int users, int captures, std::uint64_t seed) {
  if (users < 1 || captures < 1) throw DomainError("population needs at least one user and capture");
  Population pop{users, captures, Eigen::MatrixXd(users * captures, fs.features())};
  NormalSampler sampler(seed);
  for (int u = 0; u < users; ++u) {
    const Eigen::VectorXd mean = sample_user_mean(fs.rho, sampler);
    for (int c = 0; c < captures; ++c) pop.samples.row(u * captures + c) = sample_capture(mean, fs.rho, sampler);
  }
  return pop;
}

namespace {

// Scores one (enrollment, probe) pair given by sample rows.
class PairScorer {
 public:
  PairScorer(const FeatureSet& fs, const ScoringMode& mode, const Population& pop) : fs_(fs), pop_(pop) {
    if (const auto* q = std::get_if<QuantizedScoring>(&mode)) {
      quantized_ = true;
      const BinScheme bins = make_bins(q->bits);
      for (double r : fs.rho) tables_.push_back(build_table(q->bits, r, q->delta));
      bins_.resize(pop.samples.rows(), pop.samples.cols());
      for (Eigen::Index i = 0; i < pop.samples.rows(); ++i)
        for (Eigen::Index j = 0; j < pop.samples.cols(); ++j) bins_(i, j) = quantize_feature(pop.samples(i, j), bins);
    } else {
      for (double r : fs.rho) models_.emplace_back(r);
    }
  }

  double operator()(Eigen::Index enrolled, Eigen::Index probe) const {
    if (quantized_) {
      Score s = 0;
      for (Eigen::Index f = 0; f < bins_.cols(); ++f)
        s += tables_[static_cast<std::size_t>(f)].at(bins_(enrolled, f), bins_(probe, f));
      return static_cast<double>(s);
    }
    return comparator_continuous(pop_.samples.row(probe).transpose(), pop_.samples.row(enrolled).transpose(),
                                 models_);
  }

 private:
  const FeatureSet& fs_;
  const Population& pop_;
  bool quantized_ = false;
  std::vector<LookupTable> tables_;
  Eigen::MatrixXi bins_;
  std::vector<FeatureModeld> models_;
};

struct Weighted {
  double score;
  double weight;
};

std::vector<Weighted> weighted_sorted(const std::vector<double>& scores, const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != scores.size()) throw DomainError("weights do not match scores");
  std::vector<Weighted> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = {scores[i], weights.empty() ? 1.0 : weights[i]};
  std::sort(out.begin(), out.end(), [](const Weighted& a, const Weighted& b) { return a.score < b.score; });
  return out;
}

// Error rates at every distinct threshold, ascending; accept iff score >= threshold.
struct Sweep {
  std::vector<double> threshold, far, frr;
};

Sweep sweep(const TrialSet& trials) {
  if (trials.genuine.empty() || trials.impostor.empty()) throw DomainError("trial set needs both classes");
  const auto gen = weighted_sorted(trials.genuine, trials.genuine_weight);
  const auto imp = weighted_sorted(trials.impostor, trials.impostor_weight);
  auto total = [](const std::vector<Weighted>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0, [](double s, const Weighted& w) { return s + w.weight; });
  };
  const double wg = total(gen);
  const double wi = total(imp);
  if (!(wg > 0.0 && wi > 0.0)) throw DomainError("trial weights must be positive");

  std::vector<double> values;
  values.reserve(gen.size() + imp.size() + 1);
  for (const auto& w : gen) values.push_back(w.score);
  for (const auto& w : imp) values.push_back(w.score);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  values.push_back(values.back() + 1.0);

  Sweep s;
  std::size_t gi = 0, ii = 0;
  double gen_below = 0.0, imp_below = 0.0;
  for (double t : values) {
    while (gi < gen.size() && gen[gi].score < t) gen_below += gen[gi++].weight;
    while (ii < imp.size() && imp[ii].score < t) imp_below += imp[ii++].weight;
    s.threshold.push_back(t);
    s.frr.push_back(gi == gen.size() ? 1.0 : gen_below / wg);
    s.far.push_back(ii == 0 ? 1.0 : ii == imp.size() ? 0.0 : 1.0 - imp_below / wi);
  }
  return s;
}

}  // namespace

TrialSet score_trials(const FeatureSet& fs, const ScoringMode& mode, const Population& population,
                      std::size_t impostor_pairs, std::uint64_t seed) {
  if (population.samples.cols() != fs.features()) throw DomainError("population does not match feature set");
  if (population.users < 2) throw DomainError("impostor trials need at least two users");
  const PairScorer score(fs, mode, population);
  TrialSet trials;
  for (int u = 0; u < population.users; ++u)
    for (int a = 0; a < population.captures; ++a)
      for (int b = a + 1; b < population.captures; ++b)
        trials.genuine.push_back(score(u * population.captures + a, u * population.captures + b));

  DeterministicRandom rng(seed);
  const auto users = static_cast<std::uint64_t>(population.users);
  const auto caps = static_cast<std::uint64_t>(population.captures);
  trials.impostor.reserve(impostor_pairs);
  while (trials.impostor.size() < impostor_pairs) {
    const auto u1 = rng.uniform_below(users);
    const auto u2 = rng.uniform_below(users);
    const auto c1 = rng.uniform_below(caps);
    const auto c2 = rng.uniform_below(caps);
    if (u1 == u2) continue;
    trials.impostor.push_back(score(static_cast<Eigen::Index>(u1 * caps + c1), static_cast<Eigen::Index>(u2 * caps + c2)));
  }
  return trials;
}

ScoreDistribution genuine_score_distribution(const LookupTable& table) {
  const BinScheme bins = make_bins(table.bits);
  const Eigen::MatrixXd raw = raw_llr_table(bins, table.rho);
  const double background = std::ldexp(1.0, -2 * table.bits);
  std::map<Score, double> masses;
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    for (Eigen::Index j = 0; j < raw.cols(); ++j) masses[table.scores(i, j)] += std::exp(raw(i, j)) * background;
  return ScoreDistribution(std::move(masses));
}

TrialSet exact_trials(const FeatureSet& fs, int bits, double delta) {
  std::vector<ScoreDistribution> genuine, impostor;
  for (double r : fs.rho) {
    const LookupTable t = build_table(bits, r, delta);
    genuine.push_back(genuine_score_distribution(t));
    impostor.push_back(table_score_distribution(t));
  }
  TrialSet trials;
  auto fill = [](const ScoreDistribution& d, std::vector<double>& scores, std::vector<double>& weights) {
    for (const auto& [v, m] : d.masses()) {
      scores.push_back(static_cast<double>(v));
      weights.push_back(m);
    }
  };
  fill(convolve(genuine), trials.genuine, trials.genuine_weight);
  fill(convolve(impostor), trials.impostor, trials.impostor_weight);
  return trials;
}

EerResult eer(const TrialSet& trials) {
  const Sweep s = sweep(trials);
  for (std::size_t j = 1; j < s.threshold.size(); ++j) {
    const double d1 = s.far[j] - s.frr[j];
    if (d1 > 0.0) continue;
    const double d0 = s.far[j - 1] - s.frr[j - 1];
    const double a = d0 / (d0 - d1);
    return EerResult{s.far[j - 1] + a * (s.far[j] - s.far[j - 1]), a < 0.5 ? s.threshold[j - 1] : s.threshold[j]};
  }
  // Unreachable: the last threshold rejects everything, so FAR - FRR = -1 there.
  throw DomainError("EER sweep did not cross");
}

std::vector<RocPoint> roc_points(const TrialSet& trials) {
  const Sweep s = sweep(trials);
  std::vector<RocPoint> out;
  out.reserve(s.threshold.size());
  for (std::size_t j = s.threshold.size(); j-- > 0;) out.push_back({s.threshold[j], s.far[j], 1.0 - s.frr[j]});
  return out;
}

std::string roc_csv(const std::vector<RocPoint>& points) {
  std::string out = "threshold,far,gar\n";
  char line[96];
  for (const auto& p : points) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.threshold, p.far, p.gar);
    out += line;
  }
  return out;
}

double gar_at_far(const std::vector<RocPoint>& points, double far) {
  if (points.empty()) throw DomainError("empty ROC");
  if (far <= points.front().far) return points.front().gar;
  for (std::size_t j = 1; j < points.size(); ++j) {
    if (points[j].far >= far) {
      const auto& a = points[j - 1];
      const auto& b = points[j];
      if (b.far == a.far) return b.gar;
      return a.gar + (far - a.far) / (b.far - a.far) * (b.gar - a.gar);
    }
  }
  return points.back().gar;
}

std::vector<BenchRow> bench_alpha(Curve curve, const std::vector<std::int64_t>& alphas, int repetitions,
                                  std::uint64_t seed) {
  if (repetitions < 1) throw DomainError("need at least one repetition");
  const Group& group = Group::get(curve);
  DeterministicRandom rng(seed);
  const KeyMaterial keys = keygen(group, rng);
  for (const auto alpha : alphas)
    if (alpha < 0) throw DomainError("alpha must be non-negative");
  auto round = [&](std::int64_t alpha) {
    const Ciphertext score = encrypt(keys.public_key, static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(alpha) + 1)), rng);
    const auto start = std::chrono::steady_clock::now();
    const CompareSet set = service_compare(score, 0, alpha, keys.service, keys.public_key, rng);
    const bool verdict = sensor_decide(set, keys.sensor);
    const auto stop = std::chrono::steady_clock::now();
    if (!verdict) throw CryptoError("benchmark round produced a wrong verdict");
    return std::chrono::duration<double, std::milli>(stop - start).count();
  };
  // one warm-up pass, then repetitions interleaved across alphas so a slow
  // stretch of wall time is spread over every alpha instead of landing on one
  for (const auto alpha : alphas) round(alpha);
  std::vector<std::vector<double>> times(alphas.size());
  for (int rep = 0; rep < repetitions; ++rep)
    for (std::size_t i = 0; i < alphas.size(); ++i) times[i].push_back(round(alphas[i]));
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    auto& t = times[i];
    std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
    double median = t[t.size() / 2];
    if (t.size() % 2 == 0) {
      const double lower = *std::max_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2));
      median = (median + lower) / 2.0;
    }
    rows.push_back({alphas[i], median});
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "alpha,median_ms\n";
  char line[64];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%lld,%.6f\n", static_cast<long long>(r.alpha), r.median_ms);
    out += line;
  }
  return out;
}

LinearFit linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear fit needs two or more paired points");
  Eigen::MatrixXd design(x.size(), 2);
  design.col(0) = x;
  design.col(1).setOnes();
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd residual = y - design * coef;
  const double ss_res = residual.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  return LinearFit{coef(0), coef(1), ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0};
}

}  // namespace biomatch
