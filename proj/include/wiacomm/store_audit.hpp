#pragma once

// Allowlist file persistence and the append-only JSON-lines audit log.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wiacomm/auth_engine.hpp"
#include "wiacomm/clock.hpp"
#include "wiacomm/core_model.hpp"

namespace wiacomm {

class StoreError : public std::runtime_error {
 public:
  enum class Kind { FileMissing, Parse, Io };

  StoreError(Kind kind, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  /// 1-based line number for Parse errors, 0 otherwise.
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

// --- allowlist file -------------------------------------------------------
//
// One entry per line: MAC, whitespace, optional label (rest of the line).
// Lines starting with '#' are comments; blank lines are ignored. Duplicate
// MACs are a parse error.

[[nodiscard]] Allowlist parse_allowlist(std::string_view text);
[[nodiscard]] std::string serialize_allowlist(const Allowlist& allowlist);

[[nodiscard]] Allowlist load_allowlist(const std::filesystem::path& path);

/// Writes a sibling temp file, then renames it over `path`. `before_rename`
/// runs between the two steps; if it throws, `path` is left untouched.
void save_allowlist(const Allowlist& allowlist, const std::filesystem::path& path,
                    const std::function<void()>& before_rename = {});

/// Labels are stored verbatim on one line, so they must have no line breaks
/// and no leading or trailing whitespace.
[[nodiscard]] bool valid_label(std::string_view label);

// --- audit log --------------------------------------------------------------

enum class AuditKind {
  AuthGranted,
  AuthDenied,
  Alert,
  CommandSent,
  CommandAcked,
  CommandFailed,
  AdminAdd,
  AdminRemove,
};

[[nodiscard]] std::string_view to_string(AuditKind kind);
[[nodiscard]] std::optional<AuditKind> audit_kind_from_string(std::string_view text);

struct AuditRecord {
  Timestamp ts;
  AuditKind kind = AuditKind::AuthGranted;
  std::optional<MacAddress> mac;
  std::string detail;

  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

/// {"ts":"...","kind":"...","mac":"..."|null,"detail":"..."} without a trailing newline.
[[nodiscard]] std::string to_json_line(const AuditRecord& record);
/// Throws StoreError{Parse}.
[[nodiscard]] AuditRecord parse_audit_line(std::string_view line);

/// Opens, appends one line, flushes and closes. Throws StoreError{Io}.
void append_audit(const AuditRecord& record, const std::filesystem::path& log_path);

struct AuditFilter {
  std::optional<AuditKind> kind;
  std::optional<MacAddress> mac;
  std::optional<Timestamp> from;  // inclusive
  std::optional<Timestamp> until;  // exclusive

  [[nodiscard]] bool matches(const AuditRecord& record) const;
};

/// Records in file order. A line that fails to parse raises StoreError{Parse}
/// carrying its line number.
[[nodiscard]] std::vector<AuditRecord> read_audit(const std::filesystem::path& log_path, const AuditFilter& filter = {});

/// Single writer holding the log open; every append is flushed before returning.
class AuditWriter {
 public:
  explicit AuditWriter(const std::filesystem::path& log_path);

  void append(const AuditRecord& record);
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace wiacomm
