#include "biomatch/wire.hpp"

#include "biomatch/error.hpp"

namespace biomatch {
namespace {

bool known_type(std::uint8_t t) { return t >= 0x01 && t <= 0x09; }

void write_user_id(ByteWriter& w, const std::string& user) {
  if (user.size() > kMaxUserIdBytes) throw FormatError("user id longer than 255 bytes");
  w.u8(static_cast<std::uint8_t>(user.size()));
  w.raw(user);
}

}  // namespace

Bytes encode_frame(const Frame& frame) {
  if (!known_type(static_cast<std::uint8_t>(frame.type))) throw FormatError("unknown message type");
  if (frame.payload.size() > kMaxPayload) throw FormatError("payload exceeds frame limit");
  ByteWriter w;
  w.raw(kFrameMagic);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(frame.type));
  w.u32(static_cast<std::uint32_t>(frame.payload.size()));
  w.raw(frame.payload);
  return std::move(w).take();
}

FrameHeader decode_frame_header(ByteView header) {
  if (header.size() != kFrameHeaderSize) throw FormatError("frame header has wrong size");
  ByteReader r(header);
  if (r.u8() != kFrameMagic[0] || r.u8() != kFrameMagic[1]) throw FormatError("bad frame magic");
  if (r.u8() != kWireVersion) throw FormatError("unsupported wire version");
  const std::uint8_t type = r.u8();
  if (!known_type(type)) throw FormatError("unknown message type");
  const std::uint32_t length = r.u32();
  if (length > kMaxPayload) throw FormatError("payload exceeds frame limit");
  return {static_cast<MessageType>(type), length};
}

Frame decode_frame(ByteView bytes) {
  if (bytes.size() < kFrameHeaderSize) throw FormatError("truncated frame");
  const FrameHeader h = decode_frame_header(bytes.first(kFrameHeaderSize));
  if (bytes.size() - kFrameHeaderSize != h.length) throw FormatError("frame length does not match payload");
  const auto body = bytes.subspan(kFrameHeaderSize);
  return Frame{h.type, Bytes(body.begin(), body.end())};
}

Bytes encode_user_id(const std::string& user) {
  ByteWriter w;
  write_user_id(w, user);
  return std::move(w).take();
}

std::string decode_user_id(ByteView payload) {
  ByteReader r(payload);
  std::string user = r.str(r.u8());
  r.expect_end();
  return user;
}

Bytes encode_template(const SecureTemplate& templ) {
  if (templ.features < 1 || templ.features > 0xFFFF) throw FormatError("feature count out of range");
  if (templ.bits < kMinBits || templ.bits > kMaxBits) throw FormatError("bits out of range");
  if (templ.cells.size() != static_cast<std::size_t>(templ.features) * static_cast<std::size_t>(templ.row_width()))
    throw FormatError("template cell count does not match its dimensions");
  ByteWriter w;
  write_user_id(w, templ.user);
  w.u16(static_cast<std::uint16_t>(templ.features));
  w.u8(static_cast<std::uint8_t>(templ.bits));
  w.u8(static_cast<std::uint8_t>(templ.cells.front().c1.group().curve()));
  for (const auto& ct : templ.cells) w.raw(ct.encode());
  return std::move(w).take();
}

SecureTemplate decode_template(ByteView payload) {
  ByteReader r(payload);
  SecureTemplate t;
  t.user = r.str(r.u8());
  t.features = r.u16();
  t.bits = r.u8();
  if (t.features < 1) throw FormatError("template has no features");
  if (t.bits < kMinBits || t.bits > kMaxBits) throw FormatError("template bits out of range");
  const Group& group = Group::get(curve_from_id(r.u8()));
  const std::size_t count = static_cast<std::size_t>(t.features) * static_cast<std::size_t>(t.row_width());
  const std::size_t width = 2 * group.point_width();
  if (r.remaining() != count * width) throw FormatError("template body has wrong length");
  t.cells.reserve(count);
  for (std::size_t i = 0; i < count; ++i) t.cells.push_back(Ciphertext::decode(group, r.raw(width)));
  return t;
}

Bytes encode_compare_set(const CompareSet& set) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(set.elements.size()));
  for (const auto& e : set.elements) w.raw(e.encode());
  return std::move(w).take();
}

CompareSet decode_compare_set(const Group& group, ByteView payload) {
  ByteReader r(payload);
  const std::uint32_t count = r.u32();
  const std::size_t width = 2 * group.point_width();
  if (r.remaining() != static_cast<std::size_t>(count) * width) throw FormatError("compare set has wrong length");
  CompareSet set;
  set.elements.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) set.elements.push_back(PartialCiphertext::decode(group, r.raw(width)));
  return set;
}

Bytes encode_ciphertext_payload(const Ciphertext& ct) { return ct.encode(); }

Ciphertext decode_ciphertext_payload(const Group& group, ByteView payload) {
  return Ciphertext::decode(group, payload);
}

}  // namespace biomatch
