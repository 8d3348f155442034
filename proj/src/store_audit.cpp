#include "wiacomm/store_audit.hpp"

#include <array>
#include <cctype>
#include <sstream>
#include <system_error>
#include <utility>

#include <json.hpp>

namespace wiacomm {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

constexpr std::array<std::pair<AuditKind, std::string_view>, 8> kKindNames{{
    {AuditKind::AuthGranted, "auth_granted"},
    {AuditKind::AuthDenied, "auth_denied"},
    {AuditKind::Alert, "alert"},
    {AuditKind::CommandSent, "command_sent"},
    {AuditKind::CommandAcked, "command_acked"},
    {AuditKind::CommandFailed, "command_failed"},
    {AuditKind::AdminAdd, "admin_add"},
    {AuditKind::AdminRemove, "admin_remove"},
}};

}  // namespace

Allowlist parse_allowlist(std::string_view text) {
  Allowlist allowlist;
  std::size_t line_number = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_number;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::size_t split = 0;
    while (split < line.size() && !is_space(line[split])) ++split;
    const std::string_view mac_text = line.substr(0, split);
    const std::string_view label = trim(line.substr(split));

    MacAddress mac;
    try {
      mac = parse_mac(mac_text);
    } catch (const MalformedMac&) {
      throw StoreError(StoreError::Kind::Parse,
                       "line " + std::to_string(line_number) + ": MalformedMac '" + std::string(mac_text) + "'",
                       line_number);
    }
    if (!allowlist.emplace(mac, std::string(label)).second) {
      throw StoreError(StoreError::Kind::Parse,
                       "line " + std::to_string(line_number) + ": duplicate MAC " + format_mac(mac), line_number);
    }
  }
  return allowlist;
}

std::string serialize_allowlist(const Allowlist& allowlist) {
  std::string out;
  for (const auto& [mac, label] : allowlist) {
    out += format_mac(mac);
    if (!label.empty()) {
      out += ' ';
      out += label;
    }
    out += '\n';
  }
  return out;
}

Allowlist load_allowlist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw StoreError(StoreError::Kind::FileMissing, "cannot open allowlist " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_allowlist(buffer.str());
}

void save_allowlist(const Allowlist& allowlist, const std::filesystem::path& path,
                    const std::function<void()>& before_rename) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << serialize_allowlist(allowlist);
    out.flush();
    if (!out) throw StoreError(StoreError::Kind::Io, "cannot write " + temp.string());
  }
  try {
    if (before_rename) before_rename();
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(temp, ignored);
    throw;
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) throw StoreError(StoreError::Kind::Io, "cannot replace " + path.string() + ": " + ec.message());
}

bool valid_label(std::string_view label) {
  if (label != trim(label)) return false;
  for (char c : label) {
    if (c == '\n' || c == '\r') return false;
  }
  return true;
}

std::string_view to_string(AuditKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<AuditKind> audit_kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::string to_json_line(const AuditRecord& record) {
  nlohmann::ordered_json j;
  j["ts"] = format_iso8601(record.ts);
  j["kind"] = to_string(record.kind);
  j["mac"] = record.mac ? nlohmann::ordered_json(format_mac(*record.mac)) : nlohmann::ordered_json(nullptr);
  j["detail"] = record.detail;
  return j.dump();
}

AuditRecord parse_audit_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    AuditRecord record;
    record.ts = parse_iso8601(j.at("ts").get<std::string>());
    const auto kind = audit_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw StoreError(StoreError::Kind::Parse, "unknown audit kind");
    record.kind = *kind;
    if (const auto& mac = j.at("mac"); !mac.is_null()) record.mac = parse_mac(mac.get<std::string>());
    record.detail = j.at("detail").get<std::string>();
    return record;
  } catch (const StoreError&) {
    throw;
  } catch (const std::exception& e) {
    throw StoreError(StoreError::Kind::Parse, std::string("bad audit record: ") + e.what());
  }
}

void append_audit(const AuditRecord& record, const std::filesystem::path& log_path) {
  std::ofstream out(log_path, std::ios::binary | std::ios::app);
  out << to_json_line(record) << '\n';
  out.flush();
  if (!out) throw StoreError(StoreError::Kind::Io, "cannot append to " + log_path.string());
}

bool AuditFilter::matches(const AuditRecord& record) const {
  if (kind && record.kind != *kind) return false;
  if (mac && record.mac != mac) return false;
  if (from && record.ts < *from) return false;
  if (until && record.ts >= *until) return false;
  return true;
}

std::vector<AuditRecord> read_audit(const std::filesystem::path& log_path, const AuditFilter& filter) {
  std::ifstream in(log_path, std::ios::binary);
  if (!in) throw StoreError(StoreError::Kind::Io, "cannot open audit log " + log_path.string());
  std::vector<AuditRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    AuditRecord record;
    try {
      record = parse_audit_line(line);
    } catch (const StoreError& e) {
      throw StoreError(StoreError::Kind::Parse, "line " + std::to_string(line_number) + ": " + e.what(),
                       line_number);
    }
    if (filter.matches(record)) records.push_back(std::move(record));
  }
  if (in.bad()) throw StoreError(StoreError::Kind::Io, "read error on " + log_path.string());
  return records;
}

AuditWriter::AuditWriter(const std::filesystem::path& log_path)
    : path_(log_path), out_(log_path, std::ios::binary | std::ios::app) {
  if (!out_) throw StoreError(StoreError::Kind::Io, "cannot open audit log " + log_path.string());
}

void AuditWriter::append(const AuditRecord& record) {
  std::lock_guard lock(mutex_);
  out_ << to_json_line(record) << '\n';
  out_.flush();
  if (!out_) throw StoreError(StoreError::Kind::Io, "cannot append to " + path_.string());
}

}  // namespace wiacomm
