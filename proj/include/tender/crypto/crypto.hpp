#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "tender/common/types.hpp"

// Key handling for the tendering protocol: secp256k1 key pairs, certificates
// carrying Ethereum-style recoverable (v, r, s) signatures, ECIES sealing of
// per-bid symmetric keys, and AES-256-GCM bid encryption.
namespace tender::crypto {

/// Deterministic byte source (SHA-256 in counter mode). Every random choice in
/// a scenario flows through one of these so replays are byte-identical.
/// Satisfies UniformRandomBitGenerator.
class Drbg {
 public:
  using result_type = std::uint64_t;

  explicit Drbg(std::uint64_t seed);
  explicit Drbg(ByteView seed);

  void fill(std::span<std::uint8_t> out);
  Bytes generate(std::size_t n);
  std::uint64_t next_u64();
  // Uniform in [0, bound); bound must be non-zero.
  std::uint64_t uniform(std::uint64_t bound);
  // Uniform in [0, 1).
  double uniform_real();
  // Independent child stream, for handing to another actor.
  Drbg fork(std::string_view label);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  Hash32 key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t used_ = 32;
};

constexpr std::size_t kPublicKeySize = 33;  // compressed point
constexpr std::size_t kPrivateKeySize = 32;
constexpr std::size_t kScalarSize = 32;

struct AsymmetricKeyPair {
  Bytes public_key;
  // Confined to the owning actor; never written to the ledger.
  Bytes private_key;

  static AsymmetricKeyPair generate(Drbg& rng);
};

struct RecoverableSignature {
  std::uint8_t v = 27;  // 27 + recovery id
  Bytes r;
  Bytes s;
};

// Low-s ECDSA over secp256k1 with the nonce drawn from rng.
RecoverableSignature sign_recoverable(ByteView private_key, const Hash32& digest, Drbg& rng);

// Recovers the signer's compressed public key, or nullopt if the components do
// not describe a valid signature. Components must already be well-formed.
std::optional<Bytes> recover_public_key(const Hash32& digest, std::uint8_t v, ByteView r,
                                        ByteView s);

// True iff (v, r, s) over digest recovers to public_key. Throws
// ProtocolError(kMalformedCertificate) when a component has the wrong shape.
bool verify_signature(ByteView public_key, ByteView digest, std::uint8_t v, ByteView r,
                      ByteView s);

/// TO-issued authorisation for one bidder id on one request-for-tender.
struct Certificate {
  std::string bidder_id;
  Hash32 msg_hash;
  std::uint8_t v = 27;
  Bytes r;
  Bytes s;

  // bidder_id_len (u32 BE) | bidder_id | msg_hash | v | r | s
  Bytes serialize() const;
  // Throws ProtocolError(kMalformedCertificate).
  static Certificate deserialize(ByteView bytes);

  bool operator==(const Certificate&) const = default;
};

// Binds the bidder id and the tender contract address.
Hash32 certificate_message(std::string_view bidder_id, const Address& rft);

Certificate issue_certificate(ByteView to_private_key, std::string bidder_id, const Address& rft,
                              Drbg& rng);

bool verify_certificate(ByteView public_key, ByteView msg_hash, std::uint8_t v, ByteView r,
                        ByteView s);

constexpr std::size_t kBidKeySize = 32;

struct BidKey {
  std::array<std::uint8_t, kBidKeySize> key_material{};

  static BidKey generate(Drbg& rng);
  static BidKey from_bytes(ByteView bytes);  // throws std::invalid_argument
  ByteView view() const { return {key_material.data(), key_material.size()}; }

  bool operator==(const BidKey&) const = default;
};

/// The bid key sealed to the organisation, split at ceil(total_len / 2): half_a goes on chain with the
/// bid, half_b stays with the bidder until it chooses to hand it over.
struct SealedBidKey {
  Bytes half_a;
  Bytes half_b;
  std::uint32_t total_len = 0;

  static SealedBidKey split(Bytes sealed);
  // half_a | half_b; incomplete when half_b is still withheld.
  Bytes joined() const;

  // total_len (u32 BE) | half bytes
  Bytes serialize_half_a() const;
  Bytes serialize_half_b() const;
  // Throws ProtocolError(kMalformedPayload).
  static SealedBidKey from_half_a(ByteView serialized);
  // Attaches a withheld half produced by serialize_half_b.
  SealedBidKey with_half_b(ByteView serialized) const;

  bool operator==(const SealedBidKey&) const = default;
};

// ECIES: ephemeral ECDH on secp256k1, SHA-256 KDF, AES-256-GCM.
// Layout: ephemeral point (33) | nonce (12) | ciphertext | tag (16).
Bytes seal_bytes(ByteView secret, ByteView to_public_key, Drbg& rng);
// Throws ProtocolError(kDecryptionFailed).
Bytes unseal_bytes(ByteView sealed, ByteView to_private_key);

SealedBidKey seal_bid_key(const BidKey& key, ByteView to_public_key, Drbg& rng);
// Throws ProtocolError(kDecryptionFailed).
BidKey unseal_bid_key(ByteView sealed, ByteView to_private_key);

// AES-256-GCM, layout nonce (12) | ciphertext | tag (16).
Bytes encrypt_bid(ByteView plaintext, const BidKey& key, Drbg& rng);
// Throws ProtocolError(kAuthFailed).
Bytes decrypt_bid(ByteView ciphertext, const BidKey& key);

}  // namespace tender::crypto
