#include "tender/crypto/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>

#include <algorithm>
#include <cstring>
#include <memory>

#include "tender/common/codec.hpp"

namespace tender::crypto {

namespace {

struct BnFree {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
struct CtxFree {
  void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
struct PointFree {
  void operator()(EC_POINT* p) const { EC_POINT_clear_free(p); }
};
struct CipherCtxFree {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using CtxPtr = std::unique_ptr<BN_CTX, CtxFree>;
using PointPtr = std::unique_ptr<EC_POINT, PointFree>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree>;

void check(int ok, const char* what) {
  if (ok != 1) throw std::runtime_error(std::string("openssl: ") + what);
}

BnPtr bn_new() {
  BnPtr b(BN_new());
  if (!b) throw std::bad_alloc();
  return b;
}

BnPtr bn_from(ByteView bytes) {
  BnPtr b(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
  if (!b) throw std::bad_alloc();
  return b;
}

Bytes bn_to_32(const BIGNUM* b) {
  Bytes out(kScalarSize);
  check(BN_bn2binpad(b, out.data(), static_cast<int>(out.size())) == static_cast<int>(kScalarSize)
            ? 1
            : 0,
        "BN_bn2binpad");
  return out;
}

class Curve {
 public:
  static const Curve& instance() {
    static const Curve curve;
    return curve;
  }

  const EC_GROUP* group() const { return group_.get(); }
  const BIGNUM* order() const { return order_.get(); }
  const BIGNUM* half_order() const { return half_.get(); }

  PointPtr new_point() const {
    PointPtr p(EC_POINT_new(group()));
    if (!p) throw std::bad_alloc();
    return p;
  }

  Bytes compress(const EC_POINT* p, BN_CTX* ctx) const {
    Bytes out(kPublicKeySize);
    auto n = EC_POINT_point2oct(group(), p, POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx);
    if (n != kPublicKeySize) throw std::runtime_error("openssl: point2oct");
    return out;
  }

  std::optional<PointPtr> decode(ByteView bytes, BN_CTX* ctx) const {
    if (bytes.size() != kPublicKeySize) return std::nullopt;
    auto p = new_point();
    if (EC_POINT_oct2point(group(), p.get(), bytes.data(), bytes.size(), ctx) != 1) return std::nullopt;
    if (EC_POINT_is_at_infinity(group(), p.get())) return std::nullopt;
    return p;
  }

  // Scalar in [1, n-1] from the generator.
  BnPtr random_scalar(Drbg& rng) const {
    for (;;) {
      auto raw = rng.generate(kScalarSize);
      auto k = bn_from(raw);
      if (!BN_is_zero(k.get()) && BN_cmp(k.get(), order()) < 0) return k;
    }
  }

  bool in_range(const BIGNUM* x) const { return !BN_is_zero(x) && BN_cmp(x, order()) < 0; }

 private:
  Curve() {
    group_.reset(EC_GROUP_new_by_curve_name(NID_secp256k1));
    if (!group_) throw std::runtime_error("openssl: secp256k1 unavailable");
    order_ = bn_new();
    half_ = bn_new();
    check(EC_GROUP_get_order(group_.get(), order_.get(), nullptr), "EC_GROUP_get_order");
    check(BN_rshift1(half_.get(), order_.get()), "BN_rshift1");
  }

  struct GroupFree {
    void operator()(EC_GROUP* g) const { EC_GROUP_free(g); }
  };
  std::unique_ptr<EC_GROUP, GroupFree> group_;
  BnPtr order_;
  BnPtr half_;
};

CtxPtr new_ctx() {
  CtxPtr c(BN_CTX_new());
  if (!c) throw std::bad_alloc();
  return c;
}

constexpr std::size_t kNonceSize = 12;
constexpr std::size_t kTagSize = 16;

Bytes aead_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext) {
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr), "gcm init");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr),
        "gcm ivlen");
  check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()), "gcm key");
  int len = 0;
  if (!aad.empty()) {
    check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "gcm aad");
  }
  Bytes out(plaintext.size() + kTagSize);
  int written = 0;
  if (!plaintext.empty()) {
    check(EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                            static_cast<int>(plaintext.size())),
          "gcm update");
    written = len;
  }
  check(EVP_EncryptFinal_ex(ctx.get(), out.data() + written, &len), "gcm final");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize, out.data() + plaintext.size()),
        "gcm tag");
  return out;
}

std::optional<Bytes> aead_open(ByteView key, ByteView nonce, ByteView aad, ByteView sealed) {
  if (sealed.size() < kTagSize) return std::nullopt;
  const auto ct = sealed.first(sealed.size() - kTagSize);
  Bytes tag(sealed.end() - kTagSize, sealed.end());
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr), "gcm init");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr),
        "gcm ivlen");
  check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()), "gcm key");
  int len = 0;
  if (!aad.empty()) {
    check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "gcm aad");
  }
  Bytes out(ct.size() + 16);
  int written = 0;
  if (!ct.empty()) {
    check(EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct.data(), static_cast<int>(ct.size())),
          "gcm update");
    written = len;
  }
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()), "gcm set tag");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + written, &len) != 1) return std::nullopt;
  out.resize(static_cast<std::size_t>(written + len));
  return out;
}

Hash32 seal_kdf(ByteView ephemeral, ByteView shared_x) {
  ByteWriter w;
  w.str("tender-seal-kdf").raw(ephemeral).raw(shared_x);
  return w.digest();
}

// x coordinate of scalar * point, 32 bytes.
Bytes ecdh_x(const BIGNUM* scalar, const EC_POINT* point, BN_CTX* ctx) {
  const auto& curve = Curve::instance();
  auto shared = curve.new_point();
  check(EC_POINT_mul(curve.group(), shared.get(), nullptr, point, scalar, ctx), "ecdh mul");
  auto x = bn_new();
  check(EC_POINT_get_affine_coordinates(curve.group(), shared.get(), x.get(), nullptr, ctx),
        "ecdh affine");
  return bn_to_32(x.get());
}

constexpr std::string_view kBidAad = "tender-bid-v1";

}  // namespace

// ---------------------------------------------------------------------------
// Drbg

Drbg::Drbg(std::uint64_t seed) {
  ByteWriter w;
  w.str("tender-drbg").u64(seed);
  key_ = w.digest();
}

Drbg::Drbg(ByteView seed) {
  ByteWriter w;
  w.str("tender-drbg").bytes(seed);
  key_ = w.digest();
}

void Drbg::fill(std::span<std::uint8_t> out) {
  for (auto& byte : out) {
    if (used_ == block_.size()) {
      ByteWriter w;
      w.fixed(key_).u64(counter_++);
      block_ = w.digest().bytes;
      used_ = 0;
    }
    byte = block_[used_++];
  }
}

Bytes Drbg::generate(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Drbg::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Drbg::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be non-zero");
  const std::uint64_t limit = max() - (max() % bound);
  for (;;) {
    auto v = next_u64();
    if (v < limit) return v % bound;
  }
}

double Drbg::uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

Drbg Drbg::fork(std::string_view label) {
  ByteWriter w;
  w.raw(generate(32)).str(label);
  return Drbg(ByteView(w.data()));
}

// ---------------------------------------------------------------------------
// Keys and signatures

AsymmetricKeyPair AsymmetricKeyPair::generate(Drbg& rng) {
  const auto& curve = Curve::instance();
  auto ctx = new_ctx();
  auto d = curve.random_scalar(rng);
  auto q = curve.new_point();
  check(EC_POINT_mul(curve.group(), q.get(), d.get(), nullptr, nullptr, ctx.get()), "keygen mul");
  return AsymmetricKeyPair{curve.compress(q.get(), ctx.get()), bn_to_32(d.get())};
}

RecoverableSignature sign_recoverable(ByteView private_key, const Hash32& digest, Drbg& rng) {
  const auto& curve = Curve::instance();
  if (private_key.size() != kPrivateKeySize) throw std::invalid_argument("private key must be 32 bytes");
  auto ctx = new_ctx();
  auto d = bn_from(private_key);
  if (!curve.in_range(d.get())) throw std::invalid_argument("private key out of range");
  auto e = bn_from(digest.view());

  for (;;) {
    auto k = curve.random_scalar(rng);
    auto big_r = curve.new_point();
    check(EC_POINT_mul(curve.group(), big_r.get(), k.get(), nullptr, nullptr, ctx.get()), "sign mul");
    auto x = bn_new();
    auto y = bn_new();
    check(EC_POINT_get_affine_coordinates(curve.group(), big_r.get(), x.get(), y.get(), ctx.get()),
          "sign affine");
    // Recovery ids 2/3 (x >= n) are astronomically rare; redraw instead.
    if (BN_cmp(x.get(), curve.order()) >= 0) continue;
    auto r = bn_new();
    check(BN_nnmod(r.get(), x.get(), curve.order(), ctx.get()), "r mod n");
    if (BN_is_zero(r.get())) continue;
    int recid = BN_is_odd(y.get()) ? 1 : 0;

    BnPtr kinv(BN_mod_inverse(nullptr, k.get(), curve.order(), ctx.get()));
    if (!kinv) throw std::runtime_error("openssl: mod inverse");
    auto rd = bn_new();
    check(BN_mod_mul(rd.get(), r.get(), d.get(), curve.order(), ctx.get()), "r*d");
    auto sum = bn_new();
    check(BN_mod_add(sum.get(), e.get(), rd.get(), curve.order(), ctx.get()), "e+rd");
    auto s = bn_new();
    check(BN_mod_mul(s.get(), kinv.get(), sum.get(), curve.order(), ctx.get()), "s");
    if (BN_is_zero(s.get())) continue;
    if (BN_cmp(s.get(), curve.half_order()) > 0) {
      check(BN_sub(s.get(), curve.order(), s.get()), "low s");
      recid ^= 1;
    }
    return RecoverableSignature{static_cast<std::uint8_t>(27 + recid), bn_to_32(r.get()),
                                bn_to_32(s.get())};
  }
}

std::optional<Bytes> recover_public_key(const Hash32& digest, std::uint8_t v, ByteView r_bytes,
                                        ByteView s_bytes) {
  const auto& curve = Curve::instance();
  if (v != 27 && v != 28) return std::nullopt;
  if (r_bytes.size() != kScalarSize || s_bytes.size() != kScalarSize) return std::nullopt;
  auto ctx = new_ctx();
  auto r = bn_from(r_bytes);
  auto s = bn_from(s_bytes);
  if (!curve.in_range(r.get()) || !curve.in_range(s.get())) return std::nullopt;
  if (BN_cmp(s.get(), curve.half_order()) > 0) return std::nullopt;

  auto big_r = curve.new_point();
  if (EC_POINT_set_compressed_coordinates(curve.group(), big_r.get(), r.get(), v - 27, ctx.get()) != 1) {
    return std::nullopt;
  }

  // Q = r^-1 (s*R - e*G)
  BnPtr rinv(BN_mod_inverse(nullptr, r.get(), curve.order(), ctx.get()));
  if (!rinv) return std::nullopt;
  auto e = bn_from(digest.view());
  auto u1 = bn_new();
  auto u2 = bn_new();
  check(BN_mod_mul(u1.get(), e.get(), rinv.get(), curve.order(), ctx.get()), "u1");
  check(BN_mod_sub(u1.get(), curve.order(), u1.get(), curve.order(), ctx.get()), "-u1");
  check(BN_mod_mul(u2.get(), s.get(), rinv.get(), curve.order(), ctx.get()), "u2");
  auto q = curve.new_point();
  check(EC_POINT_mul(curve.group(), q.get(), u1.get(), big_r.get(), u2.get(), ctx.get()), "recover mul");
  if (EC_POINT_is_at_infinity(curve.group(), q.get())) return std::nullopt;
  return curve.compress(q.get(), ctx.get());
}

bool verify_signature(ByteView public_key, ByteView digest, std::uint8_t v, ByteView r, ByteView s) {
  if (digest.size() != Hash32::size()) {
    throw ProtocolError(ErrorCode::kMalformedCertificate, "msg_hash must be 32 bytes");
  }
  if (r.size() != kScalarSize || s.size() != kScalarSize) {
    throw ProtocolError(ErrorCode::kMalformedCertificate, "r and s must be 32 bytes");
  }
  if (v != 27 && v != 28) {
    throw ProtocolError(ErrorCode::kMalformedCertificate, "v must be 27 or 28");
  }
  auto recovered = recover_public_key(Hash32::from_span(digest), v, r, s);
  return recovered && std::ranges::equal(*recovered, public_key);
}

// ---------------------------------------------------------------------------
// Certificates

Bytes Certificate::serialize() const {
  ByteWriter w;
  w.str(bidder_id).fixed(msg_hash).u8(v).raw(r).raw(s);
  return std::move(w).take();
}

Certificate Certificate::deserialize(ByteView bytes) {
  try {
    ByteReader rd(bytes);
    Certificate c;
    c.bidder_id = rd.str();
    c.msg_hash = rd.fixed<Hash32>();
    c.v = rd.u8();
    c.r = rd.raw(kScalarSize);
    c.s = rd.raw(kScalarSize);
    rd.expect_done();
    return c;
  } catch (const ProtocolError& e) {
    throw ProtocolError(ErrorCode::kMalformedCertificate, e.what());
  }
}

Hash32 certificate_message(std::string_view bidder_id, const Address& rft) {
  ByteWriter w;
  w.str("tender-certificate").str(bidder_id).fixed(rft);
  return w.digest();
}

Certificate issue_certificate(ByteView to_private_key, std::string bidder_id, const Address& rft,
                              Drbg& rng) {
  Certificate c;
  c.msg_hash = certificate_message(bidder_id, rft);
  c.bidder_id = std::move(bidder_id);
  auto sig = sign_recoverable(to_private_key, c.msg_hash, rng);
  c.v = sig.v;
  c.r = std::move(sig.r);
  c.s = std::move(sig.s);
  return c;
}

bool verify_certificate(ByteView public_key, ByteView msg_hash, std::uint8_t v, ByteView r,
                        ByteView s) {
  return verify_signature(public_key, msg_hash, v, r, s);
}

// ---------------------------------------------------------------------------
// Bid keys

BidKey BidKey::generate(Drbg& rng) {
  BidKey k;
  rng.fill(k.key_material);
  return k;
}

BidKey BidKey::from_bytes(ByteView bytes) {
  if (bytes.size() != kBidKeySize) throw std::invalid_argument("bid key must be 32 bytes");
  BidKey k;
  std::copy(bytes.begin(), bytes.end(), k.key_material.begin());
  return k;
}

SealedBidKey SealedBidKey::split(Bytes sealed) {
  SealedBidKey out;
  out.total_len = static_cast<std::uint32_t>(sealed.size());
  const std::size_t cut = (sealed.size() + 1) / 2;
  out.half_a.assign(sealed.begin(), sealed.begin() + static_cast<std::ptrdiff_t>(cut));
  out.half_b.assign(sealed.begin() + static_cast<std::ptrdiff_t>(cut), sealed.end());
  return out;
}

Bytes SealedBidKey::joined() const {
  Bytes out = half_a;
  out.insert(out.end(), half_b.begin(), half_b.end());
  return out;
}

Bytes SealedBidKey::serialize_half_a() const {
  ByteWriter w;
  w.u32(total_len).raw(half_a);
  return std::move(w).take();
}

Bytes SealedBidKey::serialize_half_b() const {
  ByteWriter w;
  w.u32(total_len).raw(half_b);
  return std::move(w).take();
}

SealedBidKey SealedBidKey::from_half_a(ByteView serialized) {
  ByteReader rd(serialized);
  SealedBidKey out;
  out.total_len = rd.u32();
  const std::size_t cut = (static_cast<std::size_t>(out.total_len) + 1) / 2;
  out.half_a = rd.raw(cut);
  rd.expect_done();
  return out;
}

SealedBidKey SealedBidKey::with_half_b(ByteView serialized) const {
  ByteReader rd(serialized);
  if (rd.u32() != total_len) {
    throw ProtocolError(ErrorCode::kMalformedPayload, "half_b belongs to a different sealed key");
  }
  SealedBidKey out = *this;
  out.half_b = rd.raw(total_len - half_a.size());
  rd.expect_done();
  return out;
}

Bytes seal_bytes(ByteView secret, ByteView to_public_key, Drbg& rng) {
  const auto& curve = Curve::instance();
  auto ctx = new_ctx();
  auto recipient = curve.decode(to_public_key, ctx.get());
  if (!recipient) throw std::invalid_argument("recipient public key is not a curve point");

  auto eph = curve.random_scalar(rng);
  auto eph_point = curve.new_point();
  check(EC_POINT_mul(curve.group(), eph_point.get(), eph.get(), nullptr, nullptr, ctx.get()),
        "ephemeral mul");
  auto eph_bytes = curve.compress(eph_point.get(), ctx.get());
  auto key = seal_kdf(eph_bytes, ecdh_x(eph.get(), recipient->get(), ctx.get()));
  auto nonce = rng.generate(kNonceSize);
  auto body = aead_seal(key.view(), nonce, eph_bytes, secret);

  Bytes out = std::move(eph_bytes);
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Bytes unseal_bytes(ByteView sealed, ByteView to_private_key) {
  const auto& curve = Curve::instance();
  if (sealed.size() < kPublicKeySize + kNonceSize + kTagSize) {
    throw ProtocolError(ErrorCode::kDecryptionFailed, "sealed key truncated");
  }
  if (to_private_key.size() != kPrivateKeySize) {
    throw ProtocolError(ErrorCode::kDecryptionFailed, "private key must be 32 bytes");
  }
  auto ctx = new_ctx();
  const auto eph_bytes = sealed.first(kPublicKeySize);
  auto eph_point = curve.decode(eph_bytes, ctx.get());
  if (!eph_point) throw ProtocolError(ErrorCode::kDecryptionFailed, "bad ephemeral point");
  auto d = bn_from(to_private_key);
  auto key = seal_kdf(eph_bytes, ecdh_x(d.get(), eph_point->get(), ctx.get()));
  const auto nonce = sealed.subspan(kPublicKeySize, kNonceSize);
  auto plain = aead_open(key.view(), nonce, eph_bytes, sealed.subspan(kPublicKeySize + kNonceSize));
  if (!plain) throw ProtocolError(ErrorCode::kDecryptionFailed, "authentication failed");
  return std::move(*plain);
}

SealedBidKey seal_bid_key(const BidKey& key, ByteView to_public_key, Drbg& rng) {
  return SealedBidKey::split(seal_bytes(key.view(), to_public_key, rng));
}

BidKey unseal_bid_key(ByteView sealed, ByteView to_private_key) {
  auto raw = unseal_bytes(sealed, to_private_key);
  if (raw.size() != kBidKeySize) throw ProtocolError(ErrorCode::kDecryptionFailed, "not a bid key");
  return BidKey::from_bytes(raw);
}

Bytes encrypt_bid(ByteView plaintext, const BidKey& key, Drbg& rng) {
  auto nonce = rng.generate(kNonceSize);
  auto body = aead_seal(key.view(), nonce, as_bytes(kBidAad), plaintext);
  Bytes out = std::move(nonce);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Bytes decrypt_bid(ByteView ciphertext, const BidKey& key) {
  if (ciphertext.size() < kNonceSize + kTagSize) {
    throw ProtocolError(ErrorCode::kAuthFailed, "ciphertext truncated");
  }
  auto plain = aead_open(key.view(), ciphertext.first(kNonceSize), as_bytes(kBidAad),
                         ciphertext.subspan(kNonceSize));
  if (!plain) throw ProtocolError(ErrorCode::kAuthFailed, "bid ciphertext does not authenticate");
  return std::move(*plain);
}

}  // namespace tender::crypto
