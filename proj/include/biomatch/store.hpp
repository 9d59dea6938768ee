#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "biomatch/bytes.hpp"

namespace biomatch {

/// Directory-backed map from user id to serialized template. One file per user,
/// named by the SHA-256 of the id, plus an `index` file listing
/// "<file hash> <hex user id>" lines. Writes replace files atomically, so
/// readers always see a complete snapshot; re-enrollment overwrites.
class TemplateStore {
 public:
  /// Creates the directory if needed; throws IoError.
  explicit TemplateStore(std::filesystem::path dir);

  void store(const std::string& user, ByteView serialized);
  /// std::nullopt for an unknown user; IoError for failures.
  std::optional<Bytes> fetch(const std::string& user) const;
  bool contains(const std::string& user) const;

  const std::filesystem::path& directory() const { return dir_; }
  std::filesystem::path path_for(const std::string& user) const;

 private:
  std::mutex& user_lock(const std::string& user);

  std::filesystem::path dir_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> user_locks_;
  std::mutex index_mutex_;
};

std::string sha256_hex(std::string_view data);

}  // namespace biomatch
