#include "biomatch/ec_elgamal.hpp"

#include <algorithm>
#include <array>

#include <openssl/obj_mac.h>

#include "biomatch/error.hpp"

namespace biomatch {
namespace {

struct CtxFree {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};

BN_CTX* ctx() {
  thread_local std::unique_ptr<BN_CTX, CtxFree> c(BN_CTX_new());
  if (!c) throw CryptoError("BN_CTX_new failed");
  return c.get();
}

void check(int rc, const char* what) {
  if (rc != 1) throw CryptoError(what);
}

detail::BnPtr new_bn() {
  detail::BnPtr bn(BN_new());
  if (!bn) throw CryptoError("BN_new failed");
  return bn;
}

detail::PointPtr new_point(const EC_GROUP* g) {
  detail::PointPtr p(EC_POINT_new(g));
  if (!p) throw CryptoError("EC_POINT_new failed");
  return p;
}

int nid_for(Curve curve) {
  switch (curve) {
    case Curve::p256: return NID_X9_62_prime256v1;
    case Curve::secp112r1: return NID_secp112r1;
  }
  throw ConfigError("unknown curve");
}

}  // namespace

std::string_view curve_name(Curve curve) {
  switch (curve) {
    case Curve::p256: return "P-256";
    case Curve::secp112r1: return "secp112r1";
  }
  return "unknown";
}

Curve parse_curve(std::string_view name) {
  if (name == "P-256" || name == "p256" || name == "prime256v1") return Curve::p256;
  if (name == "secp112r1") return Curve::secp112r1;
  throw ConfigError("unknown curve name: " + std::string(name));
}

Curve curve_from_id(std::uint8_t id) {
  if (id == static_cast<std::uint8_t>(Curve::p256)) return Curve::p256;
  if (id == static_cast<std::uint8_t>(Curve::secp112r1)) return Curve::secp112r1;
  throw FormatError("unknown curve id");
}

// ---- Group ----

Group::Group(Curve curve) : curve_(curve), group_(EC_GROUP_new_by_curve_name(nid_for(curve))) {
  if (!group_) throw CryptoError("curve not available in this OpenSSL build");
  if (!BN_is_one(EC_GROUP_get0_cofactor(group_.get())))
    throw CryptoError("curve is not of prime order");
  const int field_bits = EC_GROUP_get_degree(group_.get());
  point_width_ = 1 + static_cast<std::size_t>((field_bits + 7) / 8);
  scalar_width_ = static_cast<std::size_t>(BN_num_bytes(EC_GROUP_get0_order(group_.get())));
}

const Group& Group::get(Curve curve) {
  static const Group p256(Curve::p256);
  if (curve == Curve::p256) return p256;
  static const Group secp112(Curve::secp112r1);
  return secp112;
}

const BIGNUM* Group::order() const { return EC_GROUP_get0_order(group_.get()); }
int Group::order_bits() const { return BN_num_bits(order()); }

Point Group::generator() const {
  Point g(*this);
  check(EC_POINT_copy(g.raw(), EC_GROUP_get0_generator(group_.get())), "EC_POINT_copy");
  return g;
}

Point Group::identity() const { return Point(*this); }

// ---- Scalar ----

Scalar::Scalar(const Group& group) : group_(&group), bn_(new_bn()) { BN_zero(bn_.get()); }

Scalar::Scalar(const Scalar& other) : group_(other.group_), bn_(BN_dup(other.bn_.get())) {
  if (!bn_) throw CryptoError("BN_dup failed");
}

Scalar& Scalar::operator=(const Scalar& other) {
  if (this != &other) *this = Scalar(other);
  return *this;
}

Scalar Scalar::random(const Group& group, RandomSource& rng, bool allow_zero) {
  // Rejection sampling of `bits`-bit candidates below the bound.
  detail::BnPtr bound(BN_dup(group.order()));
  if (!bound) throw CryptoError("BN_dup failed");
  if (!allow_zero) check(BN_sub_word(bound.get(), 1), "BN_sub_word");
  const int bits = BN_num_bits(bound.get());
  Bytes buf(group.scalar_width());
  const int excess = static_cast<int>(buf.size()) * 8 - bits;
  Scalar out(group);
  for (;;) {
    rng.fill(buf);
    if (excess > 0) buf[0] &= static_cast<std::uint8_t>(0xFF >> excess);
    if (!BN_bin2bn(buf.data(), static_cast<int>(buf.size()), out.bn_.get())) throw CryptoError("BN_bin2bn");
    if (BN_cmp(out.bn_.get(), bound.get()) < 0) break;
  }
  if (!allow_zero) check(BN_add_word(out.bn_.get(), 1), "BN_add_word");
  return out;
}

Scalar Scalar::from_int(const Group& group, std::int64_t m) {
  Scalar out(group);
  const std::uint64_t mag = m < 0 ? 0 - static_cast<std::uint64_t>(m) : static_cast<std::uint64_t>(m);
  check(BN_set_word(out.bn_.get(), mag), "BN_set_word");
  if (m < 0) BN_set_negative(out.bn_.get(), 1);
  check(BN_nnmod(out.bn_.get(), out.bn_.get(), group.order(), ctx()), "BN_nnmod");
  return out;
}

Scalar Scalar::decode(const Group& group, ByteView bytes) {
  if (bytes.size() != group.scalar_width()) throw FormatError("scalar has wrong width");
  Scalar out(group);
  if (!BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), out.bn_.get())) throw CryptoError("BN_bin2bn");
  if (BN_cmp(out.bn_.get(), group.order()) >= 0) throw FormatError("scalar not reduced modulo group order");
  return out;
}

Bytes Scalar::encode() const {
  Bytes out(group_->scalar_width());
  if (BN_bn2binpad(bn_.get(), out.data(), static_cast<int>(out.size())) < 0) throw CryptoError("BN_bn2binpad");
  return out;
}

bool Scalar::is_zero() const { return BN_is_zero(bn_.get()); }

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar out(*group_);
  check(BN_mod_add(out.bn_.get(), bn_.get(), o.bn_.get(), group_->order(), ctx()), "BN_mod_add");
  return out;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar out(*group_);
  check(BN_mod_sub(out.bn_.get(), bn_.get(), o.bn_.get(), group_->order(), ctx()), "BN_mod_sub");
  return out;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar out(*group_);
  check(BN_mod_mul(out.bn_.get(), bn_.get(), o.bn_.get(), group_->order(), ctx()), "BN_mod_mul");
  return out;
}

Scalar Scalar::operator-() const { return Scalar(*group_) - *this; }

bool operator==(const Scalar& a, const Scalar& b) {
  return a.group_ == b.group_ && BN_cmp(a.bn_.get(), b.bn_.get()) == 0;
}

// ---- Point ----

Point::Point(const Group& group) : group_(&group), p_(new_point(group.raw())) {
  check(EC_POINT_set_to_infinity(group.raw(), p_.get()), "EC_POINT_set_to_infinity");
}

Point::Point(const Point& other) : group_(other.group_), p_(EC_POINT_dup(other.p_.get(), other.group_->raw())) {
  if (!p_) throw CryptoError("EC_POINT_dup failed");
}

Point& Point::operator=(const Point& other) {
  if (this != &other) *this = Point(other);
  return *this;
}

Point Point::decode(const Group& group, ByteView bytes) {
  if (bytes.size() != group.point_width()) throw FormatError("point has wrong width");
  Point out(group);
  if (std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; })) return out;
  if (bytes[0] != 0x02 && bytes[0] != 0x03) throw FormatError("point is not in compressed form");
  if (EC_POINT_oct2point(group.raw(), out.p_.get(), bytes.data(), bytes.size(), ctx()) != 1)
    throw FormatError("bytes do not encode a curve point");
  if (!out.is_on_curve()) throw FormatError("point not on curve");
  return out;
}

Bytes Point::encode() const {
  Bytes out(group_->point_width(), 0);
  if (is_identity()) return out;
  const std::size_t n = EC_POINT_point2oct(group_->raw(), p_.get(), POINT_CONVERSION_COMPRESSED, out.data(),
                                           out.size(), ctx());
  if (n != out.size()) throw CryptoError("EC_POINT_point2oct");
  return out;
}

bool Point::is_identity() const { return EC_POINT_is_at_infinity(group_->raw(), p_.get()) == 1; }

bool Point::is_on_curve() const { return EC_POINT_is_on_curve(group_->raw(), p_.get(), ctx()) == 1; }

Point Point::operator+(const Point& o) const {
  Point out(*group_);
  check(EC_POINT_add(group_->raw(), out.p_.get(), p_.get(), o.p_.get(), ctx()), "EC_POINT_add");
  return out;
}

Point Point::operator*(const Scalar& k) const {
  Point out(*group_);
  check(EC_POINT_mul(group_->raw(), out.p_.get(), nullptr, p_.get(), k.raw(), ctx()), "EC_POINT_mul");
  return out;
}

bool operator==(const Point& a, const Point& b) {
  return a.group_ == b.group_ && EC_POINT_cmp(a.group_->raw(), a.p_.get(), b.p_.get(), ctx()) == 0;
}

Point base_mul(const Group& group, const Scalar& k) {
  Point out(group);
  check(EC_POINT_mul(group.raw(), out.raw(), k.raw(), nullptr, nullptr, ctx()), "EC_POINT_mul");
  return out;
}

Point encode_message(const Group& group, std::int64_t m) { return base_mul(group, Scalar::from_int(group, m)); }

// ---- ciphertexts ----

namespace {

template <typename Pair>
Bytes encode_pair(const Pair& p) {
  Bytes out = p.c1.encode();
  const Bytes second = p.c2.encode();
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

template <typename Pair>
Pair decode_pair(const Group& group, ByteView bytes) {
  const std::size_t w = group.point_width();
  if (bytes.size() != 2 * w) throw FormatError("ciphertext has wrong width");
  return Pair{Point::decode(group, bytes.first(w)), Point::decode(group, bytes.subspan(w))};
}

}  // namespace

Bytes Ciphertext::encode() const { return encode_pair(*this); }
Ciphertext Ciphertext::decode(const Group& group, ByteView bytes) { return decode_pair<Ciphertext>(group, bytes); }
Bytes PartialCiphertext::encode() const { return encode_pair(*this); }
PartialCiphertext PartialCiphertext::decode(const Group& group, ByteView bytes) {
  return decode_pair<PartialCiphertext>(group, bytes);
}

// ---- scheme ----

KeyMaterial keygen(const Group& group, RandomSource& rng) {
  Scalar a = Scalar::random(group, rng);
  Scalar a1 = Scalar::random(group, rng, /*allow_zero=*/true);
  Scalar a2 = a - a1;
  PublicKey pk{base_mul(group, a)};
  return KeyMaterial{std::move(pk), std::move(a), ServiceShare{std::move(a1)}, SensorShare{std::move(a2)}};
}

Ciphertext encrypt(const PublicKey& pk, const Scalar& m, RandomSource& rng) {
  const Group& group = pk.group();
  const Scalar r = Scalar::random(group, rng);
  Ciphertext ct{Point(group), Point(group)};
  check(EC_POINT_mul(group.raw(), ct.c1.raw(), r.raw(), nullptr, nullptr, ctx()), "EC_POINT_mul");
  // c2 = g^m * h^r in one multi-exponentiation.
  check(EC_POINT_mul(group.raw(), ct.c2.raw(), m.raw(), pk.h.raw(), r.raw(), ctx()), "EC_POINT_mul");
  return ct;
}

Ciphertext encrypt(const PublicKey& pk, std::int64_t m, RandomSource& rng) {
  return encrypt(pk, Scalar::from_int(pk.group(), m), rng);
}

Ciphertext add(const Ciphertext& a, const Ciphertext& b) { return Ciphertext{a.c1 + b.c1, a.c2 + b.c2}; }

Ciphertext scalar_mul(const Ciphertext& ct, const Scalar& r) {
  if (r.is_zero()) throw DomainError("scalar_mul: blinding factor must be nonzero");
  return Ciphertext{ct.c1 * r, ct.c2 * r};
}

Ciphertext scalar_mul(const Ciphertext& ct, std::int64_t r) {
  if (r <= 0) throw DomainError("scalar_mul: blinding factor must lie in [1, q - 1]");
  return scalar_mul(ct, Scalar::from_int(ct.c1.group(), r));
}

Point decrypt(const Ciphertext& ct, const Scalar& secret) { return ct.c2 + ct.c1 * (-secret); }

PartialCiphertext partial_decrypt(const Ciphertext& ct, const Scalar& share) {
  return PartialCiphertext{ct.c1, ct.c2 + ct.c1 * (-share)};
}

PartialCiphertext partial_decrypt(const Ciphertext& ct, const ServiceShare& share) {
  return partial_decrypt(ct, share.a1);
}

Point final_decrypt(const PartialCiphertext& pct, const Scalar& share) { return pct.c2 + pct.c1 * (-share); }

Point final_decrypt(const PartialCiphertext& pct, const SensorShare& share) { return final_decrypt(pct, share.a2); }

}  // namespace biomatch
