#include "biomatch/keys.hpp"

#include <fstream>
#include <iterator>

#include "biomatch/error.hpp"

namespace biomatch {
namespace {

Bytes encode_share(ShareRole role, const Scalar& s, const PublicKey& pk) {
  ByteWriter w;
  w.raw(std::string_view("BMKS"));
  w.u8(kKeyFileVersion);
  w.u8(static_cast<std::uint8_t>(pk.group().curve()));
  w.u8(static_cast<std::uint8_t>(role));
  w.raw(s.encode());
  w.raw(pk.h.encode());
  return std::move(w).take();
}

std::pair<Scalar, PublicKey> decode_share(ShareRole expected, ByteView bytes) {
  ByteReader r(bytes);
  if (r.str(4) != "BMKS") throw FormatError("share file: bad magic");
  if (r.u8() != kKeyFileVersion) throw FormatError("share file: unsupported version");
  const Group& group = Group::get(curve_from_id(r.u8()));
  if (r.u8() != static_cast<std::uint8_t>(expected)) throw FormatError("share file belongs to the other party");
  Scalar s = Scalar::decode(group, r.raw(group.scalar_width()));
  PublicKey pk{Point::decode(group, r.raw(group.point_width()))};
  r.expect_end();
  if (pk.h.is_identity()) throw FormatError("share file: public key is the identity");
  return {std::move(s), std::move(pk)};
}

}  // namespace

Bytes encode_public_key(const PublicKey& pk) {
  ByteWriter w;
  w.raw(std::string_view("BMPK"));
  w.u8(kKeyFileVersion);
  w.u8(static_cast<std::uint8_t>(pk.group().curve()));
  w.raw(pk.h.encode());
  return std::move(w).take();
}

PublicKey decode_public_key(ByteView bytes) {
  ByteReader r(bytes);
  if (r.str(4) != "BMPK") throw FormatError("public key: bad magic");
  if (r.u8() != kKeyFileVersion) throw FormatError("public key: unsupported version");
  const Group& group = Group::get(curve_from_id(r.u8()));
  PublicKey pk{Point::decode(group, r.raw(group.point_width()))};
  r.expect_end();
  if (pk.h.is_identity()) throw FormatError("public key is the identity");
  return pk;
}

Bytes encode_service_share(const ServiceShare& share, const PublicKey& pk) {
  return encode_share(ShareRole::service, share.a1, pk);
}

Bytes encode_sensor_share(const SensorShare& share, const PublicKey& pk) {
  return encode_share(ShareRole::sensor, share.a2, pk);
}

std::pair<ServiceShare, PublicKey> decode_service_share(ByteView bytes) {
  auto [s, pk] = decode_share(ShareRole::service, bytes);
  return {ServiceShare{std::move(s)}, std::move(pk)};
}

std::pair<SensorShare, PublicKey> decode_sensor_share(ByteView bytes) {
  auto [s, pk] = decode_share(ShareRole::sensor, bytes);
  return {SensorShare{std::move(s)}, std::move(pk)};
}

Bytes read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) throw IoError("not a regular file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace biomatch
