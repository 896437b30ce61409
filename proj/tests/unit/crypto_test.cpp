#include <gtest/gtest.h>

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ecdsa.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>

#include <memory>

#include "tender/common/codec.hpp"
#include "tender/crypto/crypto.hpp"

using namespace tender;
using namespace tender::crypto;

namespace {

// Verifies (r, s) over digest through OpenSSL's own EVP path, independently of
// the library's recovery-based verification.
bool openssl_verify(const Bytes& public_key, const Hash32& digest, const Bytes& r, const Bytes& s) {
  std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld(OSSL_PARAM_BLD_new(), OSSL_PARAM_BLD_free);
  OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "secp256k1", 0);
  OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, public_key.data(), public_key.size());
  std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params(OSSL_PARAM_BLD_to_param(bld.get()), OSSL_PARAM_free);
  std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)> fctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr),
                                                                   EVP_PKEY_CTX_free);
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_fromdata_init(fctx.get()) != 1 ||
      EVP_PKEY_fromdata(fctx.get(), &raw, EVP_PKEY_PUBLIC_KEY, params.get()) != 1) {
    return false;
  }
  std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)> pkey(raw, EVP_PKEY_free);

  ECDSA_SIG* sig = ECDSA_SIG_new();
  ECDSA_SIG_set0(sig, BN_bin2bn(r.data(), static_cast<int>(r.size()), nullptr),
                 BN_bin2bn(s.data(), static_cast<int>(s.size()), nullptr));
  unsigned char* der = nullptr;
  const int der_len = i2d_ECDSA_SIG(sig, &der);
  ECDSA_SIG_free(sig);

  std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)> vctx(EVP_PKEY_CTX_new(pkey.get(), nullptr),
                                                                   EVP_PKEY_CTX_free);
  const bool ok = EVP_PKEY_verify_init(vctx.get()) == 1 &&
                  EVP_PKEY_verify(vctx.get(), der, static_cast<std::size_t>(der_len), digest.bytes.data(),
                                  digest.bytes.size()) == 1;
  OPENSSL_free(der);
  return ok;
}

Address rft_address(std::uint8_t b) {
  Address a;
  a.bytes.fill(b);
  return a;
}

}  // namespace

TEST(Drbg, IsDeterministicPerSeed) {
  Drbg a(5), b(5), c(6);
  const auto x = a.generate(64);
  EXPECT_EQ(x, b.generate(64));
  EXPECT_NE(x, c.generate(64));
  Drbg d(5);
  EXPECT_EQ(d.fork("bidder").generate(16), Drbg(5).fork("bidder").generate(16));
  EXPECT_NE(Drbg(5).fork("a").generate(16), Drbg(5).fork("b").generate(16));
}

TEST(Drbg, UniformStaysInRange) {
  Drbg rng(9);
  for (int i = 0; i < 2000; ++i) {
    EXPECT_LT(rng.uniform(7), 7u);
    const double u = rng.uniform_real();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Signature, RecoversSignerAndMatchesOpenSsl) {
  Drbg rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto kp = AsymmetricKeyPair::generate(rng);
    ASSERT_EQ(kp.public_key.size(), kPublicKeySize);
    const auto digest = sha256(rng.generate(40));
    const auto sig = sign_recoverable(kp.private_key, digest, rng);
    EXPECT_TRUE(sig.v == 27 || sig.v == 28);
    EXPECT_EQ(recover_public_key(digest, sig.v, sig.r, sig.s), kp.public_key);
    EXPECT_TRUE(verify_signature(kp.public_key, digest.view(), sig.v, sig.r, sig.s));
    EXPECT_TRUE(openssl_verify(kp.public_key, digest, sig.r, sig.s));

    auto other = digest;
    other.bytes[0] ^= 1;
    EXPECT_FALSE(verify_signature(kp.public_key, other.view(), sig.v, sig.r, sig.s));
    EXPECT_FALSE(openssl_verify(kp.public_key, other, sig.r, sig.s));
  }
}

TEST(Signature, MalformedComponentsThrow) {
  Drbg rng(12);
  const auto kp = AsymmetricKeyPair::generate(rng);
  const auto digest = sha256(as_bytes("x"));
  const auto sig = sign_recoverable(kp.private_key, digest, rng);
  EXPECT_THROW(verify_signature(kp.public_key, digest.view(), sig.v, Bytes(31), sig.s), ProtocolError);
  EXPECT_THROW(verify_signature(kp.public_key, digest.view(), 40, sig.r, sig.s), ProtocolError);
}

TEST(Certificate, BindsBidderAndTender) {
  Drbg rng(13);
  const auto to = AsymmetricKeyPair::generate(rng);
  const auto intruder = AsymmetricKeyPair::generate(rng);
  const auto cert = issue_certificate(to.private_key, "B01", rft_address(1), rng);
  EXPECT_EQ(cert.msg_hash, certificate_message("B01", rft_address(1)));
  EXPECT_TRUE(verify_certificate(to.public_key, cert.msg_hash.view(), cert.v, cert.r, cert.s));
  EXPECT_FALSE(verify_certificate(intruder.public_key, cert.msg_hash.view(), cert.v, cert.r, cert.s));
  EXPECT_NE(certificate_message("B01", rft_address(1)), certificate_message("B01", rft_address(2)));
  EXPECT_NE(certificate_message("B01", rft_address(1)), certificate_message("B02", rft_address(1)));
}

TEST(Certificate, SerializationRoundTripsAndRejectsGarbage) {
  Drbg rng(14);
  const auto to = AsymmetricKeyPair::generate(rng);
  const auto cert = issue_certificate(to.private_key, "bidder-7", rft_address(3), rng);
  const auto bytes = cert.serialize();
  EXPECT_EQ(Certificate::deserialize(bytes), cert);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(Certificate::deserialize(truncated), ProtocolError);
  auto extended = bytes;
  extended.push_back(0);
  EXPECT_THROW(Certificate::deserialize(extended), ProtocolError);
}

TEST(Ecies, SealsToRecipientOnly) {
  Drbg rng(15);
  const auto to = AsymmetricKeyPair::generate(rng);
  const auto other = AsymmetricKeyPair::generate(rng);
  const auto secret = rng.generate(32);
  const auto sealed = seal_bytes(secret, to.public_key, rng);
  EXPECT_EQ(sealed.size(), 33u + 12u + secret.size() + 16u);
  EXPECT_EQ(unseal_bytes(sealed, to.private_key), secret);
  EXPECT_THROW(unseal_bytes(sealed, other.private_key), ProtocolError);
}

TEST(SealedBidKey, NeedsBothHalves) {
  Drbg rng(16);
  const auto to = AsymmetricKeyPair::generate(rng);
  const auto key = BidKey::generate(rng);
  const auto sealed = seal_bid_key(key, to.public_key, rng);
  EXPECT_EQ(sealed.half_a.size(), (sealed.total_len + 1) / 2);
  EXPECT_EQ(sealed.half_a.size() + sealed.half_b.size(), sealed.total_len);

  const auto on_chain = SealedBidKey::from_half_a(sealed.serialize_half_a());
  EXPECT_TRUE(on_chain.half_b.empty());
  try {
    unseal_bid_key(on_chain.joined(), to.private_key);
    FAIL() << "half_a alone must not open";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDecryptionFailed);
  }
  const auto completed = on_chain.with_half_b(sealed.serialize_half_b());
  EXPECT_EQ(completed, sealed);
  EXPECT_EQ(unseal_bid_key(completed.joined(), to.private_key), key);
}

TEST(BidEncryption, RoundTripsAndDetectsTampering) {
  Drbg rng(17);
  const auto key = BidKey::generate(rng);
  const auto plain = rng.generate(200);
  const auto ct = encrypt_bid(plain, key, rng);
  EXPECT_EQ(ct.size(), 12u + plain.size() + 16u);
  EXPECT_EQ(decrypt_bid(ct, key), plain);
  for (std::size_t i = 0; i < ct.size(); i += 7) {
    auto bad = ct;
    bad[i] ^= 0x10;
    EXPECT_THROW(decrypt_bid(bad, key), ProtocolError) << "byte " << i;
  }
  EXPECT_THROW(decrypt_bid(ct, BidKey::generate(rng)), ProtocolError);
  EXPECT_THROW(decrypt_bid(Bytes(10), key), ProtocolError);
}
