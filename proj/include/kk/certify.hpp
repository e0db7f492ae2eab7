#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kk/classify.hpp"
#include "kk/error.hpp"

namespace kk {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

/// The document's `schema` field is missing or names an unsupported version.
class SchemaError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Not JSON, missing or unexpected fields, wrong types, unsorted or duplicate elements.
class MalformedError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// An element index, permutation entry or shift outside its range.
class RangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct Provenance {
  std::string tool = "kk";
  std::string version{kToolVersion};
  std::uint64_t seed = 0;
  /// Seconds since the epoch as text; taken from SOURCE_DATE_EPOCH, "0" when unset.
  std::string timestamp = "0";

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

Provenance default_provenance(std::uint64_t seed = 0);

struct CertificateDocument {
  int schema = kSchemaVersion;
  Certificate certificate;
  Provenance provenance;
};

/// Canonical text: sorted keys, one step per line, ascending element lists, LF endings.
/// Throws ContractViolation for an empty certificate.
std::string render(const Certificate& c, const Provenance& p = default_provenance());

/// Syntax-only: the result may still fail verify_certificate().
CertificateDocument parse_document(std::string_view text);
Certificate parse_certificate(std::string_view text);

struct BatchSummary {
  std::vector<std::string> ok;
  std::vector<std::pair<std::string, std::string>> failed;      ///< file, reason
  std::vector<std::pair<std::string, std::string>> unreadable;  ///< file, reason
};

/// Parses and verifies every regular file in `dir`, in file-name order.
BatchSummary batch_verify(const std::filesystem::path& dir, int workers = 0);
std::string render_summary(const BatchSummary& s);

}  // namespace kk
