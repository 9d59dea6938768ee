#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include <openssl/bn.h>
#include <openssl/ec.h>

#include "biomatch/bytes.hpp"
#include "biomatch/random.hpp"

namespace biomatch {

/// Named prime-order curves. secp112r1 exists only for parity benchmarks
/// against historical measurements; its security margin is obsolete.
enum class Curve : std::uint8_t { p256 = 1, secp112r1 = 2 };

std::string_view curve_name(Curve curve);
Curve parse_curve(std::string_view name);
Curve curve_from_id(std::uint8_t id);

namespace detail {
struct BnFree {
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct PointFree {
  void operator()(EC_POINT* p) const { EC_POINT_clear_free(p); }
};
struct GroupFree {
  void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using PointPtr = std::unique_ptr<EC_POINT, PointFree>;
}  // namespace detail

class Point;

/// Curve parameters: generator, prime order q, encoding widths. Instances are
/// process-wide singletons and immutable, so they may be shared across threads.
class Group {
 public:
  static const Group& get(Curve curve);

  Group(const Group&) = delete;
  Group& operator=(const Group&) = delete;

  Curve curve() const { return curve_; }
  const EC_GROUP* raw() const { return group_.get(); }
  const BIGNUM* order() const;
  int order_bits() const;
  /// Compressed point width: tag byte plus field element.
  std::size_t point_width() const { return point_width_; }
  std::size_t scalar_width() const { return scalar_width_; }

  Point generator() const;
  Point identity() const;

 private:
  explicit Group(Curve curve);

  Curve curve_;
  std::unique_ptr<EC_GROUP, detail::GroupFree> group_;
  std::size_t point_width_ = 0;
  std::size_t scalar_width_ = 0;
};

/// Exponent in Z_q.
class Scalar {
 public:
  explicit Scalar(const Group& group);
  Scalar(const Scalar& other);
  Scalar& operator=(const Scalar& other);
  Scalar(Scalar&&) noexcept = default;
  Scalar& operator=(Scalar&&) noexcept = default;

  /// Uniform in [1, q - 1], or [0, q - 1] when `allow_zero`.
  static Scalar random(const Group& group, RandomSource& rng, bool allow_zero = false);
  /// m mod q; negative values wrap.
  static Scalar from_int(const Group& group, std::int64_t m);
  static Scalar decode(const Group& group, ByteView bytes);

  Bytes encode() const;
  bool is_zero() const;
  const Group& group() const { return *group_; }
  const BIGNUM* raw() const { return bn_.get(); }

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  friend bool operator==(const Scalar& a, const Scalar& b);

 private:
  const Group* group_;
  detail::BnPtr bn_;
};

/// Element of the prime-order group.
class Point {
 public:
  explicit Point(const Group& group);  // identity
  Point(const Point& other);
  Point& operator=(const Point& other);
  Point(Point&&) noexcept = default;
  Point& operator=(Point&&) noexcept = default;

  /// Fixed-width compressed encoding; the identity is all zero bytes.
  static Point decode(const Group& group, ByteView bytes);
  Bytes encode() const;

  bool is_identity() const;
  bool is_on_curve() const;
  const Group& group() const { return *group_; }
  const EC_POINT* raw() const { return p_.get(); }
  EC_POINT* raw() { return p_.get(); }

  Point operator+(const Point& o) const;
  Point operator*(const Scalar& k) const;
  friend bool operator==(const Point& a, const Point& b);

 private:
  const Group* group_;
  detail::PointPtr p_;
};

/// g^k.
Point base_mul(const Group& group, const Scalar& k);
/// g^m, the exponent encoding of a message.
Point encode_message(const Group& group, std::int64_t m);

struct Ciphertext {
  Point c1;
  Point c2;

  Bytes encode() const;
  static Ciphertext decode(const Group& group, ByteView bytes);
  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

/// Output of the first threshold decryption step: an ElGamal pair under the
/// remaining share's public key.
struct PartialCiphertext {
  Point c1;
  Point c2;

  Bytes encode() const;
  static PartialCiphertext decode(const Group& group, ByteView bytes);
  friend bool operator==(const PartialCiphertext&, const PartialCiphertext&) = default;
};

struct PublicKey {
  Point h;
  const Group& group() const { return h.group(); }
};

/// Key share held by the verification service.
struct ServiceShare {
  Scalar a1;
};

/// Key share held by the sensor device.
struct SensorShare {
  Scalar a2;
};

/// Output of key generation. `secret` exists only here; deployments hand out
/// the two shares and drop the rest.
struct KeyMaterial {
  PublicKey public_key;
  Scalar secret;
  ServiceShare service;
  SensorShare sensor;
};

KeyMaterial keygen(const Group& group, RandomSource& rng);

/// (g^r, g^m h^r) with fresh r in [1, q - 1].
Ciphertext encrypt(const PublicKey& pk, std::int64_t m, RandomSource& rng);
Ciphertext encrypt(const PublicKey& pk, const Scalar& m, RandomSource& rng);

/// Component-wise product; adds plaintexts.
Ciphertext add(const Ciphertext& a, const Ciphertext& b);

/// (c1^r, c2^r); multiplies the plaintext by r. Zero is rejected.
Ciphertext scalar_mul(const Ciphertext& ct, const Scalar& r);
Ciphertext scalar_mul(const Ciphertext& ct, std::int64_t r);

/// Full decryption with the whole secret: c2 * c1^-a.
Point decrypt(const Ciphertext& ct, const Scalar& secret);

/// Strips one additive share: (c1, c2 * c1^-share).
PartialCiphertext partial_decrypt(const Ciphertext& ct, const Scalar& share);
PartialCiphertext partial_decrypt(const Ciphertext& ct, const ServiceShare& share);

/// Strips the remaining share and returns the message point g^m.
Point final_decrypt(const PartialCiphertext& pct, const Scalar& share);
Point final_decrypt(const PartialCiphertext& pct, const SensorShare& share);

/// m == 0 iff g^m is the identity.
inline bool is_zero(const Point& p) { return p.is_identity(); }

}  // namespace biomatch
