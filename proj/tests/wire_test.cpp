#include <random>

#include <gtest/gtest.h>

#include "biomatch/bytes.hpp"
#include "biomatch/error.hpp"
#include "biomatch/protocol.hpp"
#include "biomatch/random.hpp"
#include "biomatch/wire.hpp"

using namespace biomatch;

namespace {

constexpr MessageType kAllTypes[] = {
    MessageType::enroll_request, MessageType::enroll_ack,   MessageType::verify_claim,
    MessageType::template_reply, MessageType::score,        MessageType::result_set,
    MessageType::unknown_user,   MessageType::malformed,    MessageType::locked_out,
};

Bytes random_bytes(std::mt19937_64& gen, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(gen());
  return b;
}

std::string random_user(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> len(0, 255), ch(0x20, 0x7e);
  std::string s(static_cast<std::size_t>(len(gen)), ' ');
  for (auto& c : s) c = static_cast<char>(ch(gen));
  return s;
}

}  // namespace

TEST(Bytes, WriterReaderRoundTrip) {
  ByteWriter w;
  w.u8(0xAB);
  w.u16(0x1234);
  w.u32(0xDEADBEEF);
  w.i32(-2);
  w.i64(-1234567890123LL);
  w.f64(0.9);
  w.raw(std::string_view("hi"));
  const Bytes b = std::move(w).take();
  EXPECT_EQ(to_hex(b), "ab1234deadbeeffffffffefffffee08e04fb353feccccccccccccd6869");
  ByteReader r(b);
  EXPECT_EQ(r.u8(), 0xAB);
  EXPECT_EQ(r.u16(), 0x1234);
  EXPECT_EQ(r.u32(), 0xDEADBEEFu);
  EXPECT_EQ(r.i32(), -2);
  EXPECT_EQ(r.i64(), -1234567890123LL);
  EXPECT_EQ(r.f64(), 0.9);
  EXPECT_EQ(r.str(2), "hi");
  EXPECT_NO_THROW(r.expect_end());
  EXPECT_THROW(r.u8(), FormatError);
  EXPECT_EQ(from_hex("00ff10"), (Bytes{0x00, 0xff, 0x10}));
  EXPECT_THROW(from_hex("abc"), FormatError);
  EXPECT_THROW(from_hex("zz"), FormatError);
}

TEST(Frame, Layout) {
  const Bytes enc = encode_frame(Frame{MessageType::verify_claim, encode_user_id("bob")});
  EXPECT_EQ(to_hex(enc), "424d010300000004" "03626f62");
}

TEST(Frame, RoundTripEveryTypeRandomSizes) {
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<std::size_t> size(0, 5000);
  for (int i = 0; i < 500; ++i)
    for (MessageType t : kAllTypes) {
      const Frame f{t, random_bytes(gen, i == 0 ? 0 : size(gen))};
      const Bytes enc = encode_frame(f);
      ASSERT_EQ(enc.size(), kFrameHeaderSize + f.payload.size());
      ASSERT_EQ(decode_frame(enc), f);
      const FrameHeader h = decode_frame_header(ByteView(enc).first(kFrameHeaderSize));
      ASSERT_EQ(h.type, t);
      ASSERT_EQ(h.length, f.payload.size());
    }
}

TEST(Frame, RejectsViolations) {
  const Bytes good = encode_frame(Frame{MessageType::score, Bytes(10, 1)});
  auto mutated = [&](std::size_t at, std::uint8_t v) {
    Bytes b = good;
    b[at] = v;
    return b;
  };
  EXPECT_THROW(decode_frame(mutated(0, 0x00)), FormatError);
  EXPECT_THROW(decode_frame(mutated(1, 0x00)), FormatError);
  EXPECT_THROW(decode_frame(mutated(2, 0x02)), FormatError);
  EXPECT_THROW(decode_frame(mutated(3, 0x00)), FormatError);
  EXPECT_THROW(decode_frame(mutated(3, 0x0A)), FormatError);
  EXPECT_THROW(decode_frame(mutated(7, 11)), FormatError);
  EXPECT_THROW(decode_frame(mutated(7, 9)), FormatError);
  EXPECT_THROW(decode_frame(ByteView(good).first(5)), FormatError);
  Bytes huge = good;
  huge[4] = 0x7F;
  EXPECT_THROW(decode_frame_header(ByteView(huge).first(kFrameHeaderSize)), FormatError);
  EXPECT_THROW(encode_frame(Frame{static_cast<MessageType>(0x33), {}}), FormatError);
}

TEST(UserId, RoundTrip) {
  std::mt19937_64 gen(13);
  for (int i = 0; i < 300; ++i) {
    const std::string u = random_user(gen);
    ASSERT_EQ(decode_user_id(encode_user_id(u)), u);
  }
  EXPECT_EQ(decode_user_id(encode_user_id("")), "");
  EXPECT_THROW(encode_user_id(std::string(256, 'a')), FormatError);
  Bytes b = encode_user_id("abc");
  b.push_back(0);
  EXPECT_THROW(decode_user_id(b), FormatError);
  b.resize(3);
  EXPECT_THROW(decode_user_id(b), FormatError);
}

class WireCrypto : public ::testing::TestWithParam<Curve> {};

TEST_P(WireCrypto, TemplateRoundTrip) {
  const Group& g = Group::get(GetParam());
  DeterministicRandom rng(14);
  std::mt19937_64 gen(14);
  const KeyMaterial k = keygen(g, rng);
  for (int i = 0; i < 40; ++i) {
    SecureTemplate t;
    t.user = random_user(gen);
    t.features = 1 + static_cast<int>(gen() % 4);
    t.bits = 1 + static_cast<int>(gen() % 3);
    for (int c = 0; c < t.features * t.row_width(); ++c)
      t.cells.push_back(encrypt(k.public_key, static_cast<std::int64_t>(gen() % 50) - 25, rng));
    const Bytes enc = encode_template(t);
    const SecureTemplate back = decode_template(enc);
    ASSERT_EQ(back.user, t.user);
    ASSERT_EQ(back.features, t.features);
    ASSERT_EQ(back.bits, t.bits);
    ASSERT_EQ(back.cells, t.cells);
    ASSERT_EQ(&back.cells[0].c1.group(), &g);
    ASSERT_EQ(encode_template(back), enc);
    Bytes cut = enc;
    cut.pop_back();
    ASSERT_THROW(decode_template(cut), FormatError);
  }
}

TEST_P(WireCrypto, CompareSetAndScoreRoundTrip) {
  const Group& g = Group::get(GetParam());
  DeterministicRandom rng(15);
  const KeyMaterial k = keygen(g, rng);
  for (std::size_t n : {0u, 1u, 7u, 81u}) {
    CompareSet set;
    for (std::size_t i = 0; i < n; ++i)
      set.elements.push_back(partial_decrypt(encrypt(k.public_key, static_cast<std::int64_t>(i), rng), k.service));
    const CompareSet back = decode_compare_set(g, encode_compare_set(set));
    ASSERT_EQ(back.elements, set.elements);
  }
  const Ciphertext ct = encrypt(k.public_key, 3, rng);
  EXPECT_EQ(decode_ciphertext_payload(g, encode_ciphertext_payload(ct)), ct);
  Bytes bad = encode_ciphertext_payload(ct);
  bad.push_back(0);
  EXPECT_THROW(decode_ciphertext_payload(g, bad), FormatError);
  Bytes bad_set = encode_compare_set(CompareSet{{partial_decrypt(ct, k.service)}});
  bad_set[3] = 2;
  EXPECT_THROW(decode_compare_set(g, bad_set), FormatError);
}

INSTANTIATE_TEST_SUITE_P(Curves, WireCrypto, ::testing::Values(Curve::p256, Curve::secp112r1),
                         [](const auto& info) { return std::string(info.param == Curve::p256 ? "P256" : "secp112r1"); });
