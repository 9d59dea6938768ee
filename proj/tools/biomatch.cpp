// biomatch: key generation, sensor client, verification service and
// experiment runner in one binary.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biomatch/config.hpp"
#include "biomatch/error.hpp"
#include "biomatch/evaluation.hpp"
#include "biomatch/keys.hpp"
#include "biomatch/net.hpp"
#include "biomatch/protocol.hpp"
#include "biomatch/random.hpp"
#include "biomatch/sensor.hpp"
#include "biomatch/service.hpp"
#include "biomatch/store.hpp"

namespace fs = std::filesystem;
using namespace biomatch;

namespace {

// Exit codes shared by every subcommand except verify.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

// verify reports its verdict through the exit code.
constexpr int kVerifyAccept = 0;
constexpr int kVerifyReject = 1;
constexpr int kVerifyError = 2;
constexpr int kVerifyUnknownUser = 3;
constexpr int kVerifyLockedOut = 4;

// BIOMATCH_TEST_SEED switches every random draw to a seeded generator. Only
// meant for reproducible tests; keys made this way are not secret.
std::unique_ptr<RandomSource> make_rng() {
  if (const char* seed = std::getenv("BIOMATCH_TEST_SEED"); seed && *seed) {
    std::cerr << "warning: BIOMATCH_TEST_SEED is set, using deterministic randomness\n";
    return std::make_unique<DeterministicRandom>(std::stoull(seed));
  }
  return std::make_unique<SystemRandom>();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

int error_code(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitConfig;
}

struct CaptureOptions {
  std::string features_file;
  std::size_t index = 0;
  std::optional<std::uint64_t> user_seed;
  std::uint64_t capture_seed = 0;

  void add_to(CLI::App& cmd) {
    auto* file = cmd.add_option("--features", features_file, "feature file (header k=<n>, one vector per line)");
    cmd.add_option("--index", index, "vector to use from the feature file")->needs(file);
    auto* seed = cmd.add_option("--user-seed", user_seed, "synthetic subject: seed of the user mean");
    cmd.add_option("--capture-seed", capture_seed, "synthetic subject: seed of the capture noise")->needs(seed);
    file->excludes(seed);
  }

  CaptureSource source() const {
    if (!features_file.empty()) return FileCapture{features_file, index};
    if (user_seed) return SyntheticCapture{*user_seed, capture_seed};
    throw ConfigError("give either --features or --user-seed");
  }
};

// ---- keygen ----

struct KeygenOptions {
  std::string curve = "P-256";
  std::string config;
  std::string out_dir = ".";
};

int run_keygen(const KeygenOptions& o) {
  try {
    const Curve curve = o.config.empty() ? parse_curve(o.curve) : load_config(o.config).curve;
    auto rng = make_rng();
    const KeyMaterial keys = keygen(Group::get(curve), *rng);
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    write_file(dir / "public.key", encode_public_key(keys.public_key));
    write_file(dir / "service.share", encode_service_share(keys.service, keys.public_key));
    write_file(dir / "sensor.share", encode_sensor_share(keys.sensor, keys.public_key));
    std::cout << "wrote " << (dir / "public.key").string() << ", " << (dir / "service.share").string() << ", "
              << (dir / "sensor.share").string() << " (" << curve_name(curve) << ")\n";
    return kExitOk;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_code(e);
  }
}

// ---- serve ----

TcpListener* g_listener = nullptr;

extern "C" void on_signal(int) {
  if (g_listener) g_listener->shutdown();
}

struct ServeOptions {
  std::string listen = "127.0.0.1:7700";
  std::string db_dir;
  std::string config;
  std::string keyshare_file;
  unsigned lockout_n = 0;
  bool quiet = false;
};

int run_serve(const ServeOptions& o) {
  std::unique_ptr<SystemContext> ctx;
  std::unique_ptr<ServiceShare> share;
  std::unique_ptr<PublicKey> pk;
  try {
    ctx = std::make_unique<SystemContext>(load_config(o.config));
    auto [a1, key] = decode_service_share(read_file(o.keyshare_file));
    if (key.h.group().curve() != ctx->config().curve) throw ConfigError("key share curve does not match config");
    share = std::make_unique<ServiceShare>(std::move(a1));
    pk = std::make_unique<PublicKey>(std::move(key));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_code(e);
  }

  try {
    TemplateStore store(o.db_dir);
    TcpListener listener(parse_endpoint(o.listen));
    VerificationService service(*ctx, *share, *pk, store, o.lockout_n, o.quiet ? nullptr : &std::clog);
    g_listener = &listener;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on port " << listener.port() << std::endl;
    service.serve(listener);
    g_listener = nullptr;
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

// ---- enroll / verify ----

struct ClientOptions {
  std::string config;
  std::string connect = "127.0.0.1:7700";
  std::string user;
  std::string public_key;
  std::string keyshare_file;
  CaptureOptions capture;
};

int run_enroll(const ClientOptions& o) {
  try {
    const SystemContext ctx(load_config(o.config));
    const PublicKey pk = decode_public_key(read_file(o.public_key));
    const FeatureVector features = capture(o.capture.source(), ctx);
    auto rng = make_rng();
    TcpChannel channel = TcpChannel::connect(parse_endpoint(o.connect));
    SensorClient client(channel, ctx, pk, *rng);
    client.enroll(o.user, features);
    std::cout << "enrolled " << o.user << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_verify(const ClientOptions& o) {
  try {
    const SystemContext ctx(load_config(o.config));
    auto [a2, pk] = decode_sensor_share(read_file(o.keyshare_file));
    if (!o.public_key.empty() && !(decode_public_key(read_file(o.public_key)).h == pk.h))
      throw ConfigError("public key does not match the key share");
    const FeatureVector probe = capture(o.capture.source(), ctx);
    auto rng = make_rng();
    TcpChannel channel = TcpChannel::connect(parse_endpoint(o.connect));
    SensorClient client(channel, ctx, pk, *rng);
    switch (client.verify(o.user, probe, a2)) {
      case VerifyOutcome::accept:
        std::cout << "accept\n";
        return kVerifyAccept;
      case VerifyOutcome::reject:
        std::cout << "reject\n";
        return kVerifyReject;
      case VerifyOutcome::unknown_user:
        std::cout << "unknown user\n";
        return kVerifyUnknownUser;
      case VerifyOutcome::locked_out:
        std::cout << "locked out\n";
        return kVerifyLockedOut;
    }
    return kVerifyError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyError;
  }
}

// ---- tables ----

struct TablesOptions {
  int bits = 4;
  double rho = 0.8;
  double delta = 1.0;
  std::string out;
};

int run_tables(const TablesOptions& o) {
  try {
    const LookupTable table = build_table(o.bits, o.rho, o.delta);
    if (!o.out.empty()) {
      write_file(o.out, encode_table(table));
      return kExitOk;
    }
    for (int x = 0; x < table.size(); ++x) {
      for (int y = 0; y < table.size(); ++y) std::cout << (y ? "," : "") << table.at(x, y);
      std::cout << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_code(e);
  }
}

// ---- roc ----

struct RocOptions {
  std::string feature_set = "fs1";
  std::optional<double> rho;
  int bits = 4;
  double delta = 1.0;
  bool continuous = false;
  bool exact = false;
  std::uint64_t seed = 0;
  int users = 200;
  int captures = 10;
  std::size_t impostors = 100000;
  std::string out;
};

int run_roc(const RocOptions& o) {
  try {
    const FeatureSet fs = o.rho ? single_feature(*o.rho) : feature_set(o.feature_set);
    TrialSet trials;
    if (o.exact) {
      trials = exact_trials(fs, o.bits, o.delta);
    } else {
      const Population pop = gen_population(fs, o.users, o.captures, o.seed);
      const ScoringMode mode = o.continuous ? ScoringMode{ContinuousScoring{}}
                                            : ScoringMode{QuantizedScoring{o.bits, o.delta}};
      trials = score_trials(fs, mode, pop, o.impostors, o.seed + 1);
    }
    const EerResult e = eer(trials);
    write_text(o.out, roc_csv(roc_points(trials)));
    std::fprintf(o.out.empty() || o.out == "-" ? stderr : stdout, "eer=%.6f threshold=%.17g\n", e.rate, e.threshold);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_code(e);
  }
}

// ---- bench ----

struct BenchOptions {
  std::string curve = "P-256";
  std::vector<std::int64_t> alphas{10, 20, 30, 40, 50, 60, 80};
  int reps = 20;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bench(const BenchOptions& o) {
  try {
    const auto rows = bench_alpha(parse_curve(o.curve), o.alphas, o.reps, o.seed);
    Eigen::VectorXd x(static_cast<Eigen::Index>(rows.size())), y(x.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      x(static_cast<Eigen::Index>(i)) = static_cast<double>(rows[i].alpha);
      y(static_cast<Eigen::Index>(i)) = rows[i].median_ms;
    }
    write_text(o.out, bench_csv(rows));
    if (rows.size() >= 2) {
      const LinearFit fit = linear_fit(x, y);
      std::fprintf(o.out.empty() || o.out == "-" ? stderr : stdout, "slope_ms=%.6f intercept_ms=%.6f r2=%.6f\n",
                   fit.slope, fit.intercept, fit.r2);
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_code(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biomatch: privacy-preserving biometric verification"};
  app.require_subcommand(1);

  KeygenOptions keygen_opts;
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a public key and the two decryption shares");
  keygen_cmd->add_option("--curve", keygen_opts.curve, "P-256 or secp112r1");
  keygen_cmd->add_option("--config", keygen_opts.config, "take the curve from a config file");
  keygen_cmd->add_option("--out-dir", keygen_opts.out_dir, "directory for public.key, service.share, sensor.share");

  ServeOptions serve_opts;
  auto* serve_cmd = app.add_subcommand("serve", "run the verification service");
  serve_cmd->add_option("--listen", serve_opts.listen, "host:port (port 0 picks a free port)");
  serve_cmd->add_option("--db-dir", serve_opts.db_dir, "template store directory")->required();
  serve_cmd->add_option("--config", serve_opts.config, "system config file")->required();
  serve_cmd->add_option("--keyshare-file", serve_opts.keyshare_file, "service share file")->required();
  serve_cmd->add_option("--lockout-n", serve_opts.lockout_n, "verification rounds allowed per enrollment (0 = off)");
  serve_cmd->add_flag("--quiet", serve_opts.quiet, "no session log");

  ClientOptions enroll_opts;
  auto* enroll_cmd = app.add_subcommand("enroll", "enroll a user with the service");
  enroll_cmd->add_option("--config", enroll_opts.config, "system config file")->required();
  enroll_cmd->add_option("--connect", enroll_opts.connect, "service host:port");
  enroll_cmd->add_option("--user", enroll_opts.user, "user id")->required();
  enroll_cmd->add_option("--public-key", enroll_opts.public_key, "public key file")->required();
  enroll_opts.capture.add_to(*enroll_cmd);

  ClientOptions verify_opts;
  auto* verify_cmd = app.add_subcommand(
      "verify", "verify a claimed identity; exit 0 accept, 1 reject, 2 error, 3 unknown user, 4 locked out");
  verify_cmd->add_option("--config", verify_opts.config, "system config file")->required();
  verify_cmd->add_option("--connect", verify_opts.connect, "service host:port");
  verify_cmd->add_option("--user", verify_opts.user, "claimed user id")->required();
  verify_cmd->add_option("--keyshare-file", verify_opts.keyshare_file, "sensor share file")->required();
  verify_cmd->add_option("--public-key", verify_opts.public_key, "optional public key file to cross-check");
  verify_opts.capture.add_to(*verify_cmd);

  TablesOptions tables_opts;
  auto* tables_cmd = app.add_subcommand("tables", "print or export one lookup table");
  tables_cmd->add_option("--bits", tables_opts.bits, "bits per feature");
  tables_cmd->add_option("--rho", tables_opts.rho, "between-user variance");
  tables_cmd->add_option("--delta", tables_opts.delta, "score quantization step");
  tables_cmd->add_option("--out", tables_opts.out, "write the binary table blob here instead of printing");

  RocOptions roc_opts;
  auto* roc_cmd = app.add_subcommand("roc", "ROC curve as CSV (threshold,far,gar) and the EER");
  auto* fs_opt = roc_cmd->add_option("--feature-set", roc_opts.feature_set, "fs1, fs2 or fs3");
  roc_cmd->add_option("--rho", roc_opts.rho, "single feature with this between-user variance")->excludes(fs_opt);
  roc_cmd->add_option("--bits", roc_opts.bits, "bits per feature");
  roc_cmd->add_option("--delta", roc_opts.delta, "score quantization step");
  roc_cmd->add_flag("--continuous", roc_opts.continuous, "unquantized comparator");
  roc_cmd->add_flag("--exact", roc_opts.exact, "exact score distributions instead of sampled trials");
  roc_cmd->add_option("--seed", roc_opts.seed, "population seed")->required();
  roc_cmd->add_option("--users", roc_opts.users, "synthetic users");
  roc_cmd->add_option("--captures", roc_opts.captures, "captures per user");
  roc_cmd->add_option("--impostors", roc_opts.impostors, "sampled impostor pairs");
  roc_cmd->add_option("--out", roc_opts.out, "CSV path (default stdout)");

  BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "compare-round time against alpha as CSV (alpha,median_ms)");
  bench_cmd->add_option("--curve", bench_opts.curve, "P-256 or secp112r1");
  bench_cmd->add_option("--alphas", bench_opts.alphas, "alpha values")->delimiter(',');
  bench_cmd->add_option("--reps", bench_opts.reps, "repetitions per alpha");
  bench_cmd->add_option("--seed", bench_opts.seed, "seed for keys and scores")->required();
  bench_cmd->add_option("--out", bench_opts.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // Usage errors on verify must not look like a verdict.
    return code == 0 ? 0 : (verify_cmd->parsed() ? kVerifyError : kExitConfig);
  }

  if (*keygen_cmd) return run_keygen(keygen_opts);
  if (*serve_cmd) return run_serve(serve_opts);
  if (*enroll_cmd) return run_enroll(enroll_opts);
  if (*verify_cmd) return run_verify(verify_opts);
  if (*tables_cmd) return run_tables(tables_opts);
  if (*roc_cmd) return run_roc(roc_opts);
  if (*bench_cmd) return run_bench(bench_opts);
  return kExitConfig;
}
