#include "tender/common/types.hpp"

namespace tender {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSender: return "UNKNOWN_SENDER";
    case ErrorCode::kTimestampNotMonotonic: return "TIMESTAMP_NOT_MONOTONIC";
    case ErrorCode::kTimestampTooFarAhead: return "TIMESTAMP_TOO_FAR_AHEAD";
    case ErrorCode::kUnmeteredOperation: return "UNMETERED_OPERATION";
    case ErrorCode::kNoSuchContract: return "NO_SUCH_CONTRACT";
    case ErrorCode::kMalformedCertificate: return "MALFORMED_CERTIFICATE";
    case ErrorCode::kDecryptionFailed: return "DECRYPTION_FAILED";
    case ErrorCode::kAuthFailed: return "AUTH_FAILED";
    case ErrorCode::kInvalidTenderParams: return "INVALID_TENDER_PARAMS";
    case ErrorCode::kDataTooLarge: return "DATA_TOO_LARGE";
    case ErrorCode::kCertificateRejected: return "CERTIFICATE_REJECTED";
    case ErrorCode::kBiddingStillOpen: return "BIDDING_STILL_OPEN";
    case ErrorCode::kSchemeHasNoState: return "SCHEME_HAS_NO_STATE";
    case ErrorCode::kWrongScheme: return "WRONG_SCHEME";
    case ErrorCode::kTenderImmutable: return "TENDER_IMMUTABLE";
    case ErrorCode::kNotOwner: return "NOT_OWNER";
    case ErrorCode::kRepublishForbidden: return "REPUBLISH_FORBIDDEN";
    case ErrorCode::kResultsBeforeDeadline: return "RESULTS_BEFORE_DEADLINE";
    case ErrorCode::kEvaluationBeforeDeadline: return "EVALUATION_BEFORE_DEADLINE";
    case ErrorCode::kResultsNotPublished: return "RESULTS_NOT_PUBLISHED";
    case ErrorCode::kIncomparableScenarios: return "INCOMPARABLE_SCENARIOS";
    case ErrorCode::kMalformedPayload: return "MALFORMED_PAYLOAD";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN_ERROR";
}

ProtocolError::ProtocolError(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
      code_(code) {}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.starts_with("0x")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("non-hex character");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace tender
