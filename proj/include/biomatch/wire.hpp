#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "biomatch/bytes.hpp"
#include "biomatch/protocol.hpp"

namespace biomatch {

// Frame: 0x42 0x4D | version 0x01 | type u8 | payload length u32 BE | payload.
inline constexpr std::array<std::uint8_t, 2> kFrameMagic = {0x42, 0x4D};
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::size_t kFrameHeaderSize = 8;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

enum class MessageType : std::uint8_t {
  enroll_request = 0x01,  // SecureTemplate
  enroll_ack = 0x02,      // user id
  verify_claim = 0x03,    // user id
  template_reply = 0x04,  // SecureTemplate
  score = 0x05,           // Ciphertext
  result_set = 0x06,      // CompareSet
  unknown_user = 0x07,    // user id
  malformed = 0x08,       // UTF-8 reason
  locked_out = 0x09,      // user id
};

struct Frame {
  MessageType type{};
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

Bytes encode_frame(const Frame& frame);

struct FrameHeader {
  MessageType type;
  std::uint32_t length;
};

/// Validates magic, version, type tag, and length bound.
FrameHeader decode_frame_header(ByteView header);

/// Decodes one complete frame; the buffer must hold exactly header + payload.
Frame decode_frame(ByteView bytes);

// Payload codecs. User ids are u8 length-prefixed UTF-8.
Bytes encode_user_id(const std::string& user);
std::string decode_user_id(ByteView payload);

// Template: user id | k u16 | b u8 | curve u8 | k * 2^b ciphertexts.
Bytes encode_template(const SecureTemplate& templ);
SecureTemplate decode_template(ByteView payload);

// Compare set: u32 count | count partial ciphertexts.
Bytes encode_compare_set(const CompareSet& set);
CompareSet decode_compare_set(const Group& group, ByteView payload);

Bytes encode_ciphertext_payload(const Ciphertext& ct);
Ciphertext decode_ciphertext_payload(const Group& group, ByteView payload);

}  // namespace biomatch
