#include "biomatch/service.hpp"

#include <cstring>

#include <sys/socket.h>

#include "biomatch/error.hpp"

namespace biomatch {

bool AttemptLimiter::locked(const std::string& user) const {
  if (limit_ == 0) return false;
  std::lock_guard guard(mutex_);
  auto it = counts_.find(user);
  return it != counts_.end() && it->second >= limit_;
}

void AttemptLimiter::record(const std::string& user) {
  std::lock_guard guard(mutex_);
  ++counts_[user];
}

void AttemptLimiter::reset(const std::string& user) {
  std::lock_guard guard(mutex_);
  counts_.erase(user);
}

unsigned AttemptLimiter::attempts(const std::string& user) const {
  std::lock_guard guard(mutex_);
  auto it = counts_.find(user);
  return it == counts_.end() ? 0 : it->second;
}

VerificationService::VerificationService(const SystemContext& ctx, ServiceShare share, PublicKey pk,
                                         TemplateStore& store, unsigned lockout_limit, std::ostream* log)
    : ctx_(ctx), share_(std::move(share)), pk_(std::move(pk)), store_(store), limiter_(lockout_limit), log_(log) {
  if (&pk_.group() != &ctx_.group()) throw ConfigError("key share curve differs from configured curve");
}

std::optional<SecureTemplate> VerificationService::fetch_template(const std::string& user) const {
  auto bytes = store_.fetch(user);
  if (!bytes) return std::nullopt;
  return decode_template(*bytes);
}

void VerificationService::log(const std::string& line) {
  if (!log_) return;
  std::lock_guard guard(log_mutex_);
  *log_ << line << std::endl;
}

void VerificationService::serve(TcpListener& listener) {
  listener_ = &listener;
  std::vector<std::thread> workers;
  while (!stopping_) {
    Socket s = listener.accept();
    if (!s.valid()) break;
    workers.emplace_back([this, sock = std::move(s)]() mutable { run_session(std::move(sock)); });
  }
  {
    std::lock_guard guard(sessions_mutex_);
    for (auto& [fd, unused] : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& w : workers) w.join();
}

void VerificationService::stop() {
  stopping_ = true;
  if (listener_) listener_->shutdown();
}

void VerificationService::run_session(Socket socket) {
  {
    std::lock_guard guard(sessions_mutex_);
    open_fds_[socket.fd()] = 0;
  }
  const int fd = socket.fd();
  TcpChannel channel(std::move(socket));
  SystemRandom rng;
  ServiceSession session(*this, rng);
  try {
    for (;;) {
      Frame frame;
      try {
        frame = channel.receive();
      } catch (const FormatError& e) {
        channel.send(Frame{MessageType::malformed, Bytes(e.what(), e.what() + std::strlen(e.what()))});
        break;
      }
      auto reply = session.handle(frame);
      for (const auto& f : reply.frames) channel.send(f);
      if (reply.close) break;
    }
  } catch (const IoError&) {
    // peer went away
  } catch (const std::exception& e) {
    log(std::string("session aborted: ") + e.what());
  }
  std::lock_guard guard(sessions_mutex_);
  open_fds_.erase(fd);
}

ServiceSession::Reply ServiceSession::malformed(const std::string& reason) {
  return Reply{{Frame{MessageType::malformed, Bytes(reason.begin(), reason.end())}}, true};
}

ServiceSession::Reply ServiceSession::handle(const Frame& frame) {
  try {
    switch (frame.type) {
      case MessageType::enroll_request: return on_enroll(frame);
      case MessageType::verify_claim: return on_claim(frame);
      case MessageType::score: return on_score(frame);
      default: return malformed("unexpected message type");
    }
  } catch (const FormatError& e) {
    return malformed(e.what());
  } catch (const ConfigError& e) {
    return malformed(e.what());
  } catch (const ProtocolError& e) {
    return malformed(e.what());
  }
}

ServiceSession::Reply ServiceSession::on_enroll(const Frame& frame) {
  const SecureTemplate templ = decode_template(frame.payload);
  check_template_shape(templ, service_.context());
  if (&templ.cells.front().c1.group() != &service_.context().group())
    throw ConfigError("template curve differs from configured curve");
  // Store the canonical encoding so fetches are byte-identical to what was sent.
  service_.store().store(templ.user, frame.payload);
  service_.limiter().reset(templ.user);
  service_.log("enrolled user " + sha256_hex(templ.user).substr(0, 16));
  return Reply{{Frame{MessageType::enroll_ack, encode_user_id(templ.user)}}, false};
}

ServiceSession::Reply ServiceSession::on_claim(const Frame& frame) {
  const std::string user = decode_user_id(frame.payload);
  if (service_.limiter().locked(user)) return Reply{{Frame{MessageType::locked_out, encode_user_id(user)}}, false};
  auto bytes = service_.store().fetch(user);
  if (!bytes) return Reply{{Frame{MessageType::unknown_user, encode_user_id(user)}}, false};
  claimed_ = user;
  return Reply{{Frame{MessageType::template_reply, std::move(*bytes)}}, false};
}

ServiceSession::Reply ServiceSession::on_score(const Frame& frame) {
  if (!claimed_) throw ProtocolError("score received before an identity claim");
  const auto& ctx = service_.context();
  const Ciphertext score = decode_ciphertext_payload(ctx.group(), frame.payload);
  const CompareSet set = service_compare(score, ctx, service_.share(), service_.public_key(), rng_);
  service_.limiter().record(*claimed_);
  service_.log("compare round for user " + sha256_hex(*claimed_).substr(0, 16) + ", " +
               std::to_string(set.elements.size()) + " elements");
  claimed_.reset();
  return Reply{{Frame{MessageType::result_set, encode_compare_set(set)}}, false};
}

void LoopbackChannel::send(const Frame& frame) {
  if (closed_) throw IoError("loopback channel closed");
  // Round-trip through the wire encoding so both ends see exactly what TCP would carry.
  auto reply = session_.handle(decode_frame(encode_frame(frame)));
  for (auto& f : reply.frames) pending_.push_back(decode_frame(encode_frame(f)));
  closed_ = reply.close;
}

Frame LoopbackChannel::receive() {
  if (pending_.empty()) throw IoError("connection closed by peer");
  Frame f = std::move(pending_.front());
  pending_.erase(pending_.begin());
  return f;
}

}  // namespace biomatch
