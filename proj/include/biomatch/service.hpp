#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "biomatch/config.hpp"
#include "biomatch/net.hpp"
#include "biomatch/store.hpp"
#include "biomatch/wire.hpp"

namespace biomatch {

/// Per-user budget of verification attempts. The service never learns
/// verdicts, so every completed compare round counts; re-enrollment resets the
/// budget. A limit of zero disables lockout.
class AttemptLimiter {
 public:
  explicit AttemptLimiter(unsigned limit) : limit_(limit) {}

  bool locked(const std::string& user) const;
  void record(const std::string& user);
  void reset(const std::string& user);
  unsigned attempts(const std::string& user) const;

 private:
  unsigned limit_;
  mutable std::mutex mutex_;
  std::map<std::string, unsigned> counts_;
};

/// Long-lived state of the verification service: configuration, key share a1,
/// template store, lockout counters. Shared read-mostly by all sessions.
class VerificationService {
 public:
  VerificationService(const SystemContext& ctx, ServiceShare share, PublicKey pk, TemplateStore& store,
                      unsigned lockout_limit = 0, std::ostream* log = nullptr);

  const SystemContext& context() const { return ctx_; }
  const PublicKey& public_key() const { return pk_; }
  const ServiceShare& share() const { return share_; }
  TemplateStore& store() { return store_; }
  AttemptLimiter& limiter() { return limiter_; }

  /// FetchTemplate(u): the stored template, or nullopt for an unknown user.
  std::optional<SecureTemplate> fetch_template(const std::string& user) const;

  void log(const std::string& line);

  /// Accepts connections until `stop()`; one thread per session.
  void serve(TcpListener& listener);
  void stop();

 private:
  void run_session(Socket socket);

  const SystemContext& ctx_;
  ServiceShare share_;
  PublicKey pk_;
  TemplateStore& store_;
  AttemptLimiter limiter_;
  std::ostream* log_;
  std::mutex log_mutex_;

  std::atomic<bool> stopping_{false};
  TcpListener* listener_ = nullptr;
  std::mutex sessions_mutex_;
  std::map<int, int> open_fds_;
};

/// Service side of one connection, driven frame by frame.
class ServiceSession {
 public:
  struct Reply {
    std::vector<Frame> frames;
    bool close = false;
  };

  ServiceSession(VerificationService& service, RandomSource& rng) : service_(service), rng_(rng) {}

  Reply handle(const Frame& frame);

 private:
  Reply on_enroll(const Frame& frame);
  Reply on_claim(const Frame& frame);
  Reply on_score(const Frame& frame);
  static Reply malformed(const std::string& reason);

  VerificationService& service_;
  RandomSource& rng_;
  std::optional<std::string> claimed_;
};

/// In-process channel that feeds a ServiceSession directly.
class LoopbackChannel final : public Channel {
 public:
  explicit LoopbackChannel(ServiceSession& session) : session_(session) {}
  void send(const Frame& frame) override;
  Frame receive() override;
  bool closed() const { return closed_; }

 private:
  ServiceSession& session_;
  std::vector<Frame> pending_;
  bool closed_ = false;
};

}  // namespace biomatch
