#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tender {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Gas = std::uint64_t;
// Unix epoch milliseconds.
using EpochMs = std::int64_t;

enum class ErrorCode : std::uint8_t {
  kUnknownSender,
  kTimestampNotMonotonic,
  kTimestampTooFarAhead,
  kUnmeteredOperation,
  kNoSuchContract,
  kMalformedCertificate,
  kDecryptionFailed,
  kAuthFailed,
  kInvalidTenderParams,
  kDataTooLarge,
  kCertificateRejected,
  kBiddingStillOpen,
  kSchemeHasNoState,
  kWrongScheme,
  kTenderImmutable,
  kNotOwner,
  kRepublishForbidden,
  kResultsBeforeDeadline,
  kEvaluationBeforeDeadline,
  kResultsNotPublished,
  kIncomparableScenarios,
  kMalformedPayload,
  kInvalidConfig,
  kParseError,
};

std::string_view to_string(ErrorCode code);

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

std::string to_hex(ByteView bytes);
// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Fixed-width byte strings with a phantom tag so hashes and addresses do not
/// mix. Ordering is lexicographic over the bytes.
template <std::size_t N, typename Tag>
struct FixedBytes {
  std::array<std::uint8_t, N> bytes{};

  static constexpr std::size_t size() { return N; }

  auto operator<=>(const FixedBytes&) const = default;

  bool is_zero() const {
    for (auto b : bytes) {
      if (b != 0) return false;
    }
    return true;
  }

  ByteView view() const { return {bytes.data(), bytes.size()}; }

  std::string hex() const { return to_hex(view()); }

  static FixedBytes from_span(ByteView src) {
    if (src.size() != N) {
      throw std::invalid_argument("expected " + std::to_string(N) + " bytes, got " +
                                  std::to_string(src.size()));
    }
    FixedBytes out;
    std::copy(src.begin(), src.end(), out.bytes.begin());
    return out;
  }

  static FixedBytes from_hex(std::string_view hex) {
    auto raw = tender::from_hex(hex);
    return from_span(raw);
  }
};

struct HashTag;
struct AddressTag;
using Hash32 = FixedBytes<32, HashTag>;
using Address = FixedBytes<20, AddressTag>;

}  // namespace tender
