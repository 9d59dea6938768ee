#include "biomatch/store.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <openssl/evp.h>

#include "biomatch/error.hpp"
#include "biomatch/keys.hpp"

namespace biomatch {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw CryptoError("SHA-256 failed");
  return to_hex(ByteView(digest, len));
}

TemplateStore::TemplateStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) throw IoError("cannot use template directory " + dir_.string());
}

fs::path TemplateStore::path_for(const std::string& user) const { return dir_ / (sha256_hex(user) + ".tpl"); }

std::mutex& TemplateStore::user_lock(const std::string& user) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = user_locks_[user];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void TemplateStore::store(const std::string& user, ByteView serialized) {
  const fs::path target = path_for(user);
  {
    std::lock_guard guard(user_lock(user));
    const fs::path tmp = target.string() + ".tmp";
    write_file(tmp, serialized);
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot commit template for user: " + ec.message());
  }

  std::lock_guard guard(index_mutex_);
  const std::string line = target.stem().string() + " " + to_hex(ByteView(
                               reinterpret_cast<const std::uint8_t*>(user.data()), user.size()));
  const fs::path index = dir_ / "index";
  if (fs::exists(index)) {
    std::ifstream in(index);
    std::string existing;
    while (std::getline(in, existing))
      if (existing == line) return;
  }
  std::ofstream out(index, std::ios::app);
  out << line << "\n";
  if (!out) throw IoError("cannot update template index");
}

std::optional<Bytes> TemplateStore::fetch(const std::string& user) const {
  const fs::path p = path_for(user);
  std::error_code ec;
  const bool present = fs::exists(p, ec);
  if (ec) throw IoError("cannot stat template: " + ec.message());
  if (!present) return std::nullopt;
  return read_file(p);
}

bool TemplateStore::contains(const std::string& user) const { return fs::exists(path_for(user)); }

}  // namespace biomatch
