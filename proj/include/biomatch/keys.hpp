#pragma once

#include <filesystem>
#include <utility>

#include "biomatch/ec_elgamal.hpp"

namespace biomatch {

// Key file layouts (all integers big-endian):
//   public key:  "BMPK" | version u8 | curve id u8 | compressed point
//   share file:  "BMKS" | version u8 | curve id u8 | role u8 | scalar | compressed public point
// role 1 is the service share a1, role 2 the sensor share a2.
inline constexpr std::uint8_t kKeyFileVersion = 1;

enum class ShareRole : std::uint8_t { service = 1, sensor = 2 };

Bytes encode_public_key(const PublicKey& pk);
PublicKey decode_public_key(ByteView bytes);

Bytes encode_service_share(const ServiceShare& share, const PublicKey& pk);
Bytes encode_sensor_share(const SensorShare& share, const PublicKey& pk);

/// Rejects files that carry the other party's share.
std::pair<ServiceShare, PublicKey> decode_service_share(ByteView bytes);
std::pair<SensorShare, PublicKey> decode_sensor_share(ByteView bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView bytes);

}  // namespace biomatch
